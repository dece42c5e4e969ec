"""Benchmark harness: synthesize each task and validate it against a reference.

A manifest lists one task per line as whitespace-separated fields::

    path  tag  expected  objective  timeout

`tag` is the experiment (1, 2a, 3a, sketch, neg), `expected` is `pass` or
`fail`, `objective` is `top1` or `top1r`, and `timeout` is in seconds.  Paths
are relative to the manifest.  The reference for `dir/name.smy` is
`refs/name.smy` next to the manifest.
"""
from __future__ import annotations

import dataclasses
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .core import EMPTY_ENV, RPair, TArr, TData, TPair, TUnit, Type, XCtor, XPair, XUnit, coerce, value_to_result
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted, apply_value, eval_fueled
from .surface import ElabError, ParseError, Problem, load_file, pretty, pretty_value
from .synth import SynthConfig, closed_program, synthesize

# inputs per definition before falling back to an evenly strided subset
MAX_INPUTS = 2000
TOP_NAT = 4
NESTED_NAT = 2
STRUCTURE = 3


@dataclasses.dataclass(frozen=True)
class Task:
    path: str
    tag: str
    expected: str
    objective: str
    timeout: float
    root: str = "."  # directory of the manifest

    @property
    def name(self) -> str:
        return os.path.splitext(os.path.basename(self.path))[0]

    @property
    def full_path(self) -> str:
        return os.path.join(self.root, self.path)


def load_manifest(path: str) -> list:
    base = os.path.dirname(os.path.abspath(path))
    tasks = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            p, tag, expected, objective, timeout = parts
            if expected not in ("pass", "fail"):
                raise ValueError(f"{path}:{lineno}: expected outcome must be pass or fail")
            if objective not in ("top1", "top1r"):
                raise ValueError(f"{path}:{lineno}: objective must be top1 or top1r")
            tasks.append(Task(p, tag, expected, objective, float(timeout), base))
    return tasks


def reference_path(task: Task) -> str:
    return os.path.join(task.root, "refs", task.name + ".smy")


# --------------------------------------------------------------------------
# Validation inputs


class _Inputs:
    """Exhaustive small values per type.

    Nat-like datatypes (every constructor argument is unit or the type itself)
    go up to TOP_NAT at the top level and NESTED_NAT inside other values; other
    datatypes have at most STRUCTURE constructor nodes carrying data.
    """

    def __init__(self, sigma):
        self.sigma = sigma
        self.memo = {}

    def nat_like(self, d: str) -> bool:
        def ok(t):
            if isinstance(t, TUnit):
                return True
            if isinstance(t, TData):
                return t.name == d
            if isinstance(t, TPair):
                return ok(t.fst) and ok(t.snd)
            return False

        return all(ok(t) for _, t in self.sigma.constructors(d))

    def values(self, t: Type, top: bool = True) -> list:
        key = (t, top)
        if key in self.memo:
            return self.memo[key]
        if isinstance(t, TUnit):
            out = [XUnit()]
        elif isinstance(t, TPair):
            out = [XPair(a, b) for a in self.values(t.fst, False) for b in self.values(t.snd, False)]
        elif isinstance(t, TData):
            if self.nat_like(t.name):
                n = TOP_NAT if top else NESTED_NAT
            else:
                n = STRUCTURE
            out = [v for v, _ in self._data(t.name, n)]
        else:
            raise ValueError(f"cannot enumerate inputs of type {t}")
        self.memo[key] = out
        return out

    def _data(self, d: str, n: int) -> list:
        key = ("data", d, n)
        if key in self.memo:
            return self.memo[key]
        out = []
        for c, targ in self.sigma.constructors(d):
            if isinstance(targ, TUnit):
                out.append((XCtor(c, XUnit()), 0))
            elif n >= 1:
                for v, used in self._arg(d, targ, n - 1):
                    out.append((XCtor(c, v), used + 1))
        self.memo[key] = out
        return out

    def _arg(self, d: str, t: Type, n: int) -> list:
        if isinstance(t, TData) and t.name == d:
            return self._data(d, n)
        if isinstance(t, TPair):
            out = []
            for a, ua in self._arg(d, t.fst, n):
                for b, ub in self._arg(d, t.snd, n - ua):
                    out.append((XPair(a, b), ua + ub))
            return out
        return [(v, 0) for v in self.values(t, False)]


def input_tuples(sigma, arg_types) -> list:
    gen = _Inputs(sigma)
    pools = [gen.values(t) for t in arg_types]
    total = 1
    for p in pools:
        total *= len(p)
    if total <= MAX_INPUTS:
        return list(itertools.product(*pools))
    # deterministic subset: every k-th tuple of the full product
    stride = -(-total // MAX_INPUTS)
    return list(itertools.islice(itertools.product(*pools), 0, None, stride))


def arg_types(t: Type) -> tuple:
    out = []
    while isinstance(t, TArr):
        out.append(t.dom)
        t = t.cod
    return tuple(out)


# --------------------------------------------------------------------------
# Comparing definitions


@dataclasses.dataclass
class Validation:
    ok: bool
    checked: int = 0
    counterexample: Optional[str] = None


def definitions(problem: Problem, holes: dict, fuel: int = DEFAULT_FUEL) -> dict:
    """Evaluate the closed program and return each definition's result."""
    closed = closed_program(problem, holes)
    r = eval_fueled(EMPTY_ENV, closed.main, fuel)
    out = {}
    n = len(problem.defs)
    for i, d in enumerate(problem.defs):
        cur = r
        if n > 1:
            for _ in range(i):
                cur = cur.snd if isinstance(cur, RPair) else None
            if i < n - 1 and isinstance(cur, RPair):
                cur = cur.fst
        out[d.name] = cur
    return out


def _run(fn, args, fuel):
    try:
        r = apply_value({}, fn, [value_to_result(a) for a in args], fuel)
    except (FuelExhausted, EvalError, RecursionError):
        return None
    return coerce(r)


def validate(problem: Problem, holes: dict, reference: Problem, fuel: int = DEFAULT_FUEL) -> Validation:
    """Compare every definition that had holes against the reference."""
    mine = definitions(problem, holes, fuel)
    theirs = definitions(reference, {}, fuel)
    checked = 0
    for d in problem.defs:
        if not d.holes:
            continue
        if d.name not in theirs:
            return Validation(False, checked, f"reference has no definition of {d.name}")
        ref_def = reference.defs[reference.def_index(d.name)]
        if ref_def.typ != d.typ:
            return Validation(False, checked, f"{d.name}: reference type {ref_def.typ} differs")
        types = arg_types(d.typ)
        if not types:
            inputs = [()]
        else:
            try:
                inputs = input_tuples(problem.sigma, types)
            except ValueError:
                continue
        for args in inputs:
            checked += 1
            want = _run(theirs[d.name], args, fuel) if types else coerce(theirs[d.name])
            got = _run(mine[d.name], args, fuel) if types else coerce(mine[d.name])
            if want != got:
                shown = " ".join(pretty_value(a) for a in args)
                w = pretty_value(want) if want is not None else "<no value>"
                g = pretty_value(got) if got is not None else "<no value>"
                return Validation(False, checked, f"{d.name} {shown} = {g}, expected {w}")
    return Validation(True, checked)


# --------------------------------------------------------------------------
# Running tasks


@dataclasses.dataclass
class TaskReport:
    name: str
    path: str
    tag: str
    expected: str
    objective: str
    outcome: str  # pass | overspec | timeout | none | error
    examples: int
    solution: dict
    size: Optional[int]
    stage: Optional[str]
    wall_time: float
    detail: str = ""

    @property
    def satisfied(self) -> bool:
        return (self.outcome == "pass") == (self.expected == "pass")

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["satisfied"] = self.satisfied
        return d


def run_task(task: Task, base: Optional[SynthConfig] = None) -> TaskReport:
    cfg = dataclasses.replace(base or SynthConfig(), timeout=task.timeout, objective=task.objective)
    start = time.monotonic()

    def report(outcome, problem=None, res=None, detail=""):
        sol = res.best if res is not None else None
        return TaskReport(
            name=task.name,
            path=task.path,
            tag=task.tag,
            expected=task.expected,
            objective=task.objective,
            outcome=outcome,
            examples=len(problem.program.asserts) if problem else 0,
            solution={f"??{h}": _text(e) for h, e in sorted(sol.holes.items())} if sol else {},
            size=sol.size if sol else None,
            stage=str(res.stage) if res is not None and res.stage is not None else None,
            wall_time=time.monotonic() - start,
            detail=detail,
        )

    try:
        problem = load_file(task.full_path)
    except (OSError, ParseError, ElabError) as exc:
        return report("error", detail=str(exc))
    res = synthesize(problem, cfg)
    if res.status == "timeout":
        return report("timeout", problem, res, res.message)
    if res.status != "solved":
        return report("none", problem, res, res.message)
    sol = res.best
    if task.objective == "top1r" and not sol.recursive:
        return report("overspec", problem, res, "top solution is not recursive")
    try:
        reference = load_file(reference_path(task))
    except (OSError, ParseError, ElabError) as exc:
        return report("error", problem, res, f"reference: {exc}")
    v = validate(problem, sol.holes, reference, cfg.fuel)
    if not v.ok:
        return report("overspec", problem, res, v.counterexample or "")
    return report("pass", problem, res, f"validated on {v.checked} inputs")


def _text(e):
    return pretty(e)


def _run_one(args):
    task, cfg = args
    return run_task(task, cfg)


def run_suite(tasks, base: Optional[SynthConfig] = None, jobs: int = 1) -> list:
    if jobs <= 1:
        return [run_task(t, base) for t in tasks]
    # separate processes: each task gets its own interpreter and solver state
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [(t, base) for t in tasks]))


TSV_FIELDS = ("name", "tag", "expected", "objective", "outcome", "satisfied", "examples", "size", "wall_time")


def format_tsv(reports) -> str:
    lines = ["\t".join(TSV_FIELDS)]
    for r in reports:
        row = []
        for f in TSV_FIELDS:
            v = r.satisfied if f == "satisfied" else getattr(r, f)
            if f == "wall_time":
                v = f"{v:.3f}"
            row.append("" if v is None else str(v))
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def suite_json(reports) -> dict:
    return {
        "schema": 1,
        "tasks": [r.to_json() for r in reports],
        "satisfied": sum(r.satisfied for r in reports),
        "total": len(reports),
    }
