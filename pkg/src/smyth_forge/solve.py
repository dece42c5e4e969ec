"""Constraint solving: fill one hole at a time, merging the new constraints.

Search is depth-first over Python generators.  Each stage bounds the size of
guessed terms, the size of case scrutinees, and how deeply synthesized case
expressions may nest.
"""
from __future__ import annotations

import dataclasses
import itertools
from typing import Iterator, Optional

from .constraints import is_deferred, merge_semantic, try_merge
from .core import (
    EMPTY_K,
    E_UNIT,
    BindKind,
    Branch,
    Constraints,
    ECase,
    ECtor,
    EFix,
    EHole,
    EPair,
    HoleInfo,
    RCtor,
    RFix,
    RInverse,
    TArr,
    TData,
    TPair,
    TUnit,
    TOP,
    World,
    X_UNIT,
    XCtor,
    XInOut,
    XPair,
    XUnit,
    filter_worlds,
    value_to_result,
)
from .evaluation import EvalError, FuelExhausted
from .termgen import TermGen
from .typecheck import extend_case
from .uneval import Session, check, uneval

MAX_BRANCH_CHOICES = 64


@dataclasses.dataclass(frozen=True)
class Stage:
    term_size: int
    scrutinee_size: int
    match_depth: int

    def __str__(self):
        return f"{self.term_size},{self.scrutinee_size},{self.match_depth}"


DEFAULT_STAGES = (
    Stage(1, 0, 0),
    Stage(5, 0, 0),
    Stage(5, 1, 1),
    Stage(7, 1, 1),
    Stage(9, 3, 2),
    Stage(13, 6, 2),
)


def parse_stages(text: str) -> tuple:
    """Parse `t,s,d;t,s,d;...` into stages."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        t, s, d = (int(x) for x in part.split(","))
        out.append(Stage(t, s, d))
    if not out:
        raise ValueError("no stages given")
    return tuple(out)


_NAME_BASES = {"Nat": "n", "Bool": "b", "NatList": "xs", "NatTree": "t", "MaybeNat": "mb"}


def fresh_name(taken, t) -> str:
    if isinstance(t, TData):
        base = _NAME_BASES.get(t.name, t.name[0].lower())
    elif isinstance(t, TPair):
        base = "p"
    elif isinstance(t, TArr):
        base = "f"
    else:
        base = "u"
    if base not in taken:
        return base
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in taken:
            return name


class Solver:
    def __init__(self, cx: Session, stage: Stage, termgen: Optional[TermGen] = None):
        self.cx = cx
        self.stage = stage
        self.termgen = termgen or TermGen(cx.sigma)
        self.next_hole = max(cx.delta, default=-1) + 1
        # optional predicate on partial fillings; True cuts the branch
        self.prune = None

    @property
    def delta(self):
        return self.cx.delta

    def fresh_hole(self, info: HoleInfo) -> int:
        h = self.next_hole
        self.next_hole += 1
        self.delta[h] = info
        return h

    # ------------------------------------------------------------------
    # solving

    def solve(self, k: Constraints) -> Iterator[dict]:
        self.cx.tick()
        if self.prune is not None and self.prune(k.filling):
            return
        if not k.unfilled:
            yield k.filling
            return
        h = min(k.unfilled)
        worlds = k.unfilled[h]
        f = k.filling
        if is_deferred(f, h):
            f = {g: e for g, e in f.items() if g != h}
        rest = Constraints(f, {g: ws for g, ws in k.unfilled.items() if g != h})
        for kf in self.fill(h, f, worlds):
            m = try_merge(rest, kf)
            if m is None:
                continue
            for k2 in merge_semantic(self.cx, m):
                yield from self.solve(k2)

    def fill(self, h: int, filling: dict, worlds) -> Iterator[Constraints]:
        info = self.delta[h]
        xs = filter_worlds(worlds)
        if not xs:
            yield Constraints({h: EHole(h)}, {})
            return
        yield from self.refine(h, info, xs)
        yield from self.guess_and_check(h, info, filling, xs)
        if info.match_depth < self.stage.match_depth:
            yield from self.branch(h, info, filling, xs)

    # ------------------------------------------------------------------
    # rules

    def refine(self, h: int, info: HoleInfo, xs) -> Iterator[Constraints]:
        t = info.typ
        exs = [w.ex for w in xs]
        if isinstance(t, TUnit):
            if all(isinstance(x, XUnit) for x in exs):
                yield Constraints({h: E_UNIT}, {})
        elif isinstance(t, TPair):
            if all(isinstance(x, XPair) for x in exs):
                h1 = self.fresh_hole(HoleInfo(info.ctx, t.fst, info.match_depth, scrutinized=info.scrutinized))
                h2 = self.fresh_hole(HoleInfo(info.ctx, t.snd, info.match_depth, scrutinized=info.scrutinized))
                u = _unfilled(
                    (h1, [World(w.env, w.ex.fst) for w in xs]),
                    (h2, [World(w.env, w.ex.snd) for w in xs]),
                )
                yield Constraints({h: EPair(EHole(h1), EHole(h2))}, u)
        elif isinstance(t, TData):
            if all(isinstance(x, XCtor) for x in exs) and len({x.ctor for x in exs}) == 1:
                c = exs[0].ctor
                targ = self.cx.sigma.ctor_type(c)
                if isinstance(targ, TUnit):
                    yield Constraints({h: ECtor(c, E_UNIT)}, {})
                    return
                h1 = self.fresh_hole(HoleInfo(info.ctx, targ, info.match_depth, scrutinized=info.scrutinized))
                u = _unfilled((h1, [World(w.env, w.ex.arg) for w in xs]))
                yield Constraints({h: ECtor(c, EHole(h1))}, u)
        elif isinstance(t, TArr):
            if all(isinstance(x, XInOut) for x in exs):
                yield self._refine_fix(h, info, xs)

    def _refine_fix(self, h, info, xs) -> Constraints:
        # one layer per argument that every example supplies; only the
        # outermost layer is recursive; later layers are plain lambdas
        layers = []
        ctx = info.ctx
        t = info.typ
        exs = [w.ex for w in xs]
        while True:
            taken = ctx.names()
            if not layers:
                hint = info.name_hint
                fname = hint if hint and hint not in taken else fresh_name(taken, t)
                param = fresh_name(taken | {fname}, t.dom)
                ctx = ctx.extend(fname, t, BindKind.REC, fname).extend(param, t.dom, BindKind.ARG, fname)
            else:
                fname = None
                param = fresh_name(taken, t.dom)
                ctx = ctx.extend(param, t.dom, BindKind.PLAIN)
            layers.append((fname, param, t))
            exs = [x.output for x in exs if x.output != TOP]
            if isinstance(t.cod, TArr) and exs and all(isinstance(x, XInOut) for x in exs):
                t = t.cod
                continue
            break
        h1 = self.fresh_hole(HoleInfo(ctx, t.cod, info.match_depth, scrutinized=info.scrutinized))
        body = EHole(h1)
        for fname, param, ty in reversed(layers):
            body = EFix(fname, param, ty, body)
        fixes = [body]
        while len(fixes) < len(layers):
            fixes.append(fixes[-1].body)
        worlds = []
        for w in xs:
            env, ex = w.env, w.ex
            for fix in fixes:
                if not isinstance(ex, XInOut):
                    break
                if fix.fname is not None:
                    env = env.extend(fix.fname, RFix(env, fix))
                env = env.extend(fix.param, value_to_result(ex.input))
                ex = ex.output
            else:
                if ex != TOP:
                    worlds.append(World(env, ex))
        return Constraints({h: body}, _unfilled((h1, worlds)))

    def guess_and_check(self, h, info, filling, xs) -> Iterator[Constraints]:
        for n in range(1, self.stage.term_size + 1):
            for e in self.termgen.elim(info.ctx, info.typ, n):
                self.cx.tick()
                for k in check(self.cx, filling, e, xs):
                    m = try_merge(Constraints({h: e}, {}), k)
                    if m is not None:
                        yield m

    def branch(self, h, info, filling, xs) -> Iterator[Constraints]:
        sigma = self.cx.sigma
        for n in range(1, self.stage.scrutinee_size + 1):
            for d in sigma:
                for scrut in self.termgen.elim(info.ctx, TData(d), n):
                    # the enclosing case already decided this scrutinee
                    if scrut in info.scrutinized:
                        continue
                    self.cx.tick()
                    yield from self._branch_on(h, info, filling, xs, d, scrut)

    def _branch_on(self, h, info, filling, xs, d, scrut):
        sigma = self.cx.sigma
        ctors = sigma.constructors(d)
        per_world = []
        for w in xs:
            try:
                r = self.cx.live(w.env, filling, scrut)
            except (FuelExhausted, EvalError):
                return
            if type(r) is RCtor:
                per_world.append([(r.ctor, r.arg, EMPTY_K)])
                continue
            opts = []
            for c, targ in ctors:
                inner = X_UNIT if isinstance(targ, TUnit) else TOP
                for k in itertools.islice(uneval(self.cx, filling, r, XCtor(c, inner)), MAX_BRANCH_CHOICES):
                    opts.append((c, RInverse(c, r), k))
            if not opts:
                return
            per_world.append(opts)
        taken = info.ctx.names()
        binders = {c: fresh_name(taken, targ) for c, targ in ctors}
        for combo in itertools.islice(itertools.product(*per_world), MAX_BRANCH_CHOICES):
            k = EMPTY_K
            for _, _, kj in combo:
                k = try_merge(k, kj)
                if k is None:
                    break
            if k is None:
                continue
            branches = []
            unfilled = []
            for c, targ in ctors:
                x = binders[c]
                ctx = extend_case(info.ctx, scrut, x, targ)
                hc = self.fresh_hole(HoleInfo(ctx, info.typ, info.match_depth + 1, scrutinized=info.scrutinized + (scrut,)))
                branches.append(Branch(c, x, EHole(hc)))
                ws = [
                    World(w.env.extend(x, bound), w.ex)
                    for w, (cj, bound, _) in zip(xs, combo)
                    if cj == c
                ]
                unfilled.append((hc, ws))
            out = try_merge(Constraints({h: ECase(scrut, tuple(branches))}, _unfilled(*unfilled)), k)
            if out is not None:
                yield out


def _unfilled(*pairs) -> dict:
    return {h: tuple(ws) for h, ws in pairs if ws}
