"""Top-level synthesis driver: collect constraints, solve stage by stage, rank."""
from __future__ import annotations

import dataclasses
import time
from typing import Optional

from .collect import Inconsistent, assertion_satisfaction, eval_assert, simplify
from .constraints import merge_semantic
from .core import BindKind, EApp, ECase, EFix, EPair, EProj, ECtor, EVar, Program, holes_of, size, substitute_holes
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted
from .solve import DEFAULT_STAGES, Solver, Stage
from .surface import Problem, pretty
from .termgen import TermGen
from .typecheck import IllTyped, check_program
from .uneval import Session, SynthesisTimeout


@dataclasses.dataclass
class SynthConfig:
    # solutions reported; the search keeps this many per stage and prunes
    # partial fillings that cannot beat the worst of them
    top: int = 1
    timeout: float = 120.0
    fuel: int = DEFAULT_FUEL
    max_lazy_case: int = 1
    stages: tuple = DEFAULT_STAGES
    objective: str = "top1"  # or "top1r": first recursive solution


@dataclasses.dataclass
class Solution:
    holes: dict  # original hole -> closed expression
    size: int
    recursive: bool
    raw: dict  # the solver's filling, including intermediate holes

    def lines(self) -> list:
        return [f"??{h} := {pretty(e)}" for h, e in sorted(self.holes.items())]


@dataclasses.dataclass
class SynthResult:
    status: str  # solved | refuted | timeout
    solutions: list
    stage: Optional[Stage]
    stage_index: Optional[int]
    elapsed: float
    message: str = ""

    @property
    def best(self) -> Optional[Solution]:
        return self.solutions[0] if self.solutions else None


def _rec_names(problem: Problem, h: int) -> set:
    info = problem.delta.get(h)
    if info is None:
        return set()
    return {b.name for b in info.ctx.bindings if b.kind is BindKind.REC}


def _fix_names(e) -> set:
    out = set()

    def go(e):
        if isinstance(e, EFix):
            if e.fname:
                out.add(e.fname)
            go(e.body)
        elif isinstance(e, EApp):
            go(e.fn)
            go(e.arg)
        elif isinstance(e, EPair):
            go(e.fst)
            go(e.snd)
        elif isinstance(e, (EProj, ECtor)):
            go(e.arg)
        elif isinstance(e, ECase):
            go(e.scrutinee)
            for b in e.branches:
                go(b.body)

    go(e)
    return out


def _calls(e, names) -> bool:
    if isinstance(e, EApp):
        head = e
        while isinstance(head, EApp):
            head = head.fn
        if isinstance(head, EVar) and head.name in names:
            return True
        return _calls(e.fn, names) or _calls(e.arg, names)
    if isinstance(e, EFix):
        return _calls(e.body, names)
    if isinstance(e, EPair):
        return _calls(e.fst, names) or _calls(e.snd, names)
    if isinstance(e, (EProj, ECtor)):
        return _calls(e.arg, names)
    if isinstance(e, ECase):
        return _calls(e.scrutinee, names) or any(_calls(b.body, names) for b in e.branches)
    return False


def is_recursive(problem: Problem, holes: dict) -> bool:
    for h, e in holes.items():
        if _calls(e, _rec_names(problem, h) | _fix_names(e)):
            return True
    return False


def closed_program(problem: Problem, holes: dict) -> Program:
    p = problem.program
    return Program(
        substitute_holes(p.main, holes),
        tuple((substitute_holes(a, holes), substitute_holes(b, holes)) for a, b in p.asserts),
    )


def verify(problem: Problem, holes: dict, assertions, fuel: int) -> bool:
    """A solution must close every hole, type-check, and satisfy the assertions."""
    closed = closed_program(problem, holes)
    if holes_of(closed.main) or any(holes_of(a) or holes_of(b) for a, b in closed.asserts):
        return False
    try:
        check_program({}, problem.sigma, closed)
    except IllTyped:
        return False
    try:
        return not eval_assert(closed, fuel) and assertion_satisfaction(holes, assertions, fuel)
    except (Inconsistent, FuelExhausted, EvalError):
        return False


def synthesize(problem: Problem, config: Optional[SynthConfig] = None) -> SynthResult:
    config = config or SynthConfig()
    start = time.monotonic()
    deadline = start + config.timeout if config.timeout else None

    def done(status, sols, stage=None, idx=None, msg=""):
        return SynthResult(status, sols, stage, idx, time.monotonic() - start, msg)

    try:
        assertions = eval_assert(problem.program, config.fuel)
    except Inconsistent as exc:
        return done("refuted", [], msg=str(exc))
    except (FuelExhausted, EvalError) as exc:
        return done("refuted", [], msg=f"evaluation failed: {exc}")

    originals = list(problem.holes)
    if not originals:
        if not assertions:
            return done("solved", [Solution({}, 0, False, {})])
        return done("refuted", [], msg="no holes to fill")

    fallback = None
    for idx, stage in enumerate(config.stages):
        cx = Session(
            dict(problem.delta),
            problem.sigma,
            fuel=config.fuel,
            max_lazy_case=config.max_lazy_case,
            deadline=deadline,
        )
        solver = Solver(cx, stage, TermGen(problem.sigma))
        pool = _Pool(max(1, config.top), config.objective == "top1r")
        solver.prune = lambda f: pool.prunes(_partial_size(originals, f))
        seen = set()
        timed_out = False
        try:
            for k0 in simplify(cx, assertions):
                for k in merge_semantic(cx, k0):
                    for filling in solver.solve(k):
                        holes = {h: substitute_holes(filling.get(h, _hole(h)), filling) for h in originals}
                        key = tuple(holes[h] for h in originals)
                        if key in seen:
                            continue
                        seen.add(key)
                        if not verify(problem, holes, assertions, config.fuel):
                            continue
                        total = sum(size(e) for e in holes.values())
                        pool.add(Solution(holes, total, is_recursive(problem, holes), filling))
        except SynthesisTimeout:
            timed_out = True
        except RecursionError:
            pass
        found = pool.ranked()
        if config.objective == "top1r":
            rec = [s for s in found if s.recursive]
            if rec:
                return done("solved", rec + [s for s in found if not s.recursive], stage, idx)
            if found and fallback is None:
                fallback = (found, stage, idx)
        elif found:
            return done("solved", found, stage, idx)
        if timed_out:
            if fallback:
                return done("solved", *fallback, msg="timed out before a recursive solution")
            return done("timeout", [], stage, idx, "timed out")
    if fallback:
        return done("solved", *fallback, msg="no recursive solution found")
    return done("refuted", [], msg="search space exhausted")


def _partial_size(originals, filling) -> int:
    return sum(size(substitute_holes(filling.get(h, _hole(h)), filling)) for h in originals)


class _Pool:
    """The smallest solutions seen so far, in discovery order among equals.

    With `split`, recursive and non-recursive solutions are kept in separate
    pools.  Pruning looks only at the recursive pool; the other one is a
    best-effort fallback for when no recursive solution turns up.
    """

    def __init__(self, cap: int, split: bool):
        self.cap = cap
        self.split = split
        self.pools = ([], []) if split else ([],)
        self.order = 0

    def _pool(self, s):
        return self.pools[0 if (s.recursive or not self.split) else 1]

    def add(self, s):
        pool = self._pool(s)
        pool.append((s.size, self.order, s))
        self.order += 1
        pool.sort(key=lambda t: (t[0], t[1]))
        del pool[self.cap:]

    def prunes(self, partial: int) -> bool:
        # solutions only grow as holes are filled; a tie cannot displace
        # an entry found earlier
        p = self.pools[0]
        return len(p) >= self.cap and partial >= p[-1][0]

    def ranked(self) -> list:
        out = [t for p in self.pools for t in p]
        out.sort(key=lambda t: (t[0], t[1]))
        return [t[2] for t in out]


def _hole(h):
    from .core import EHole

    return EHole(h)
