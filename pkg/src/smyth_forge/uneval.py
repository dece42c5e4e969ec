"""Example satisfaction, unevaluation, and live bidirectional example checking."""
from __future__ import annotations

import dataclasses
import time
from typing import Iterator, Optional

from .constraints import try_merge
from .core import (
    Constraints,
    Datatypes,
    EMPTY_K,
    EProj,
    EVar,
    Env,
    Expr,
    RApp,
    RCase,
    RCtor,
    RFix,
    RHole,
    RInverse,
    RPair,
    RProj,
    RUnit,
    Result,
    TOP,
    TPair,
    TUnit,
    World,
    X_UNIT,
    XCtor,
    XInOut,
    XPair,
    XTop,
    XUnit,
    Example,
    coerce,
    value_to_result,
)
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted, apply_value, live_eval, resume


class SynthesisTimeout(Exception):
    pass


@dataclasses.dataclass
class Session:
    """Shared state for one synthesis query."""

    delta: dict
    sigma: Datatypes
    fuel: int = DEFAULT_FUEL
    max_lazy_case: int = 1
    # total lazy case unevaluations along one derivation; keeps
    # recursion through indeterminate scrutinees finite
    max_lazy_chain: int = 6
    deadline: Optional[float] = None

    def __post_init__(self):
        self._memo = {}

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SynthesisTimeout()

    # The same (filling, term) pairs recur across search branches, and
    # runaway recursion through a bad guess is costly to rediscover.
    def _cached(self, key, keep, thunk):
        hit = self._memo.get(key)
        if hit is not None:
            if hit[1] is _FAILED:
                raise FuelExhausted()
            return hit[1]
        if len(self._memo) > MEMO_LIMIT:
            self._memo.clear()
        try:
            out = thunk()
        except (FuelExhausted, EvalError):
            self._memo[key] = (keep, _FAILED)
            raise FuelExhausted() from None
        self._memo[key] = (keep, out)
        return out

    def live(self, env: Env, filling: dict, e: Expr) -> Result:
        key = ("e", env, e, frozenset(filling.items()))
        return self._cached(key, env, lambda: live_eval(env, filling, e, self.fuel))

    def resume(self, filling: dict, r: Result) -> Result:
        if not filling:
            return r
        key = ("r", r, frozenset(filling.items()))
        return self._cached(key, r, lambda: resume(filling, r, self.fuel))


_FAILED = object()
MEMO_LIMIT = 200_000


# --------------------------------------------------------------------------
# Example satisfaction


def satisfies(filling: dict, r: Result, ex: Example, fuel: int = DEFAULT_FUEL) -> bool:
    t = type(ex)
    if t is XTop:
        return True
    if t is XUnit:
        return type(r) is RUnit
    if t is XPair:
        return (
            type(r) is RPair
            and satisfies(filling, r.fst, ex.fst, fuel)
            and satisfies(filling, r.snd, ex.snd, fuel)
        )
    if t is XCtor:
        return type(r) is RCtor and r.ctor == ex.ctor and satisfies(filling, r.arg, ex.arg, fuel)
    if t is XInOut:
        try:
            out = apply_value(filling, r, [value_to_result(ex.input)], fuel)
        except (FuelExhausted, EvalError):
            return False
        return satisfies(filling, out, ex.output, fuel)
    raise TypeError(ex)


def satisfies_world(filling: dict, e: Expr, w: World, fuel: int = DEFAULT_FUEL) -> bool:
    try:
        r = live_eval(w.env, filling, e, fuel)
    except (FuelExhausted, EvalError):
        return False
    return satisfies(filling, r, w.ex, fuel)


# --------------------------------------------------------------------------
# Candidate fillings for a hole blocking a case scrutinee


def blocking_hole(r: Result) -> Optional[RHole]:
    while True:
        t = type(r)
        if t is RHole:
            return r
        if t is RApp:
            r = r.fn
        elif t in (RProj, RInverse):
            r = r.arg
        elif t is RCase:
            r = r.scrutinee
        else:
            return None


def hole_candidates(info) -> list:
    """Variables and single projections of variables at the hole's type."""
    out = []
    for b in reversed(info.ctx.visible()):
        if b.typ == info.typ:
            out.append(EVar(b.name))
        if isinstance(b.typ, TPair):
            if b.typ.fst == info.typ:
                out.append(EProj(1, EVar(b.name)))
            if b.typ.snd == info.typ:
                out.append(EProj(2, EVar(b.name)))
    return out


def guesses(cx: Session, filling: dict, r: Result) -> Iterator[dict]:
    """Fillings of the hole blocking `r` under which `r` resumes to a constructor."""
    hr = blocking_hole(r)
    if hr is None or hr.name in filling:
        return
    info = cx.delta.get(hr.name)
    if info is None:
        return
    for e in hole_candidates(info):
        f2 = {hr.name: e}
        try:
            s = cx.resume({**filling, **f2}, r)
        except (FuelExhausted, EvalError):
            continue
        if type(s) is RCtor:
            yield f2


# --------------------------------------------------------------------------
# Unevaluation


class _Cached:
    """Re-iterable view of a generator, computed at most once."""

    def __init__(self, gen):
        self.gen = gen
        self.items = []
        self.done = False

    def __iter__(self):
        i = 0
        while True:
            if i < len(self.items):
                yield self.items[i]
                i += 1
            elif self.done:
                return
            else:
                try:
                    self.items.append(next(self.gen))
                except StopIteration:
                    self.done = True


def uneval(
    cx: Session, filling: dict, r: Result, ex: Example, depth: int = 0, chain: int = 0
) -> Iterator[Constraints]:
    """Constraints on holes sufficient for `r` to satisfy `ex`.

    `depth` counts lazy case unevaluations enclosing this one through their
    scrutinees; `chain` counts all enclosing lazy case unevaluations.
    """
    tx = type(ex)
    if tx is XTop:
        yield EMPTY_K
        return
    t = type(r)
    if t is RHole:
        yield Constraints({}, {r.name: (World(r.env, ex),)})
    elif t is RUnit:
        if tx is XUnit:
            yield EMPTY_K
    elif t is RPair:
        if tx is XPair:
            snd = _Cached(uneval(cx, filling, r.snd, ex.snd, depth, chain))
            for k1 in uneval(cx, filling, r.fst, ex.fst, depth, chain):
                for k2 in snd:
                    m = try_merge(k1, k2)
                    if m is not None:
                        yield m
    elif t is RCtor:
        if tx is XCtor and ex.ctor == r.ctor:
            yield from uneval(cx, filling, r.arg, ex.arg, depth, chain)
    elif t is RFix:
        if tx is XInOut:
            fix = r.fix
            env = r.env
            if fix.fname is not None:
                env = env.extend(fix.fname, r)
            env = env.extend(fix.param, value_to_result(ex.input))
            yield from check_one(cx, filling, fix.body, env, ex.output, depth, chain)
    elif t is RApp:
        v = coerce(r.arg)
        if v is not None:
            yield from uneval(cx, filling, r.fn, XInOut(v, ex), depth, chain)
    elif t is RProj:
        wrapped = XPair(ex, TOP) if r.index == 1 else XPair(TOP, ex)
        yield from uneval(cx, filling, r.arg, wrapped, depth, chain)
    elif t is RInverse:
        yield from uneval(cx, filling, r.arg, XCtor(r.ctor, ex), depth, chain)
    elif t is RCase:
        yield from _uneval_case(cx, filling, r, ex, depth, chain)
    else:
        raise TypeError(r)


def _uneval_case(cx, filling, r: RCase, ex, depth, chain):
    cx.tick()
    # commit the blocking hole to a guess that makes the case determinate
    for f2 in guesses(cx, filling, r.scrutinee):
        cx.tick()
        f3 = {**filling, **f2}
        try:
            s = cx.resume(f3, r.scrutinee)
        except (FuelExhausted, EvalError):
            continue
        b = _branch(r, s.ctor)
        env = r.env.extend(b.binder, s.arg)
        for k in check_one(cx, f3, b.body, env, ex, depth, chain):
            m = try_merge(Constraints(f2, {}), k)
            if m is not None:
                yield m
    # or lazily assume each branch is taken
    if depth > cx.max_lazy_case or chain >= cx.max_lazy_chain:
        return
    for b in r.branches:
        cx.tick()
        targ = cx.sigma.ctor_type(b.ctor)
        inner = X_UNIT if isinstance(targ, TUnit) else TOP
        env = r.env.extend(b.binder, RInverse(b.ctor, r.scrutinee))
        body = _Cached(check_one(cx, filling, b.body, env, ex, depth, chain + 1))
        for k1 in uneval(cx, filling, r.scrutinee, XCtor(b.ctor, inner), depth + 1, chain + 1):
            for k2 in body:
                m = try_merge(k1, k2)
                if m is not None:
                    yield m


def _branch(r: RCase, ctor):
    for b in r.branches:
        if b.ctor == ctor:
            return b
    raise EvalError(f"no branch for constructor {ctor}")


def check_one(cx, filling, e, env: Env, ex, depth=0, chain=0) -> Iterator[Constraints]:
    try:
        r = cx.live(env, filling, e)
    except (FuelExhausted, EvalError):
        return
    yield from uneval(cx, filling, r, ex, depth, chain)


def check(cx: Session, filling: dict, e: Expr, worlds) -> Iterator[Constraints]:
    """Live bidirectional example checking of `e` against each world."""
    streams = [_Cached(check_one(cx, filling, e, w.env, w.ex)) for w in worlds]

    def go(i, acc):
        if i == len(streams):
            yield acc
            return
        for k in streams[i]:
            m = try_merge(acc, k)
            if m is not None:
                yield from go(i + 1, m)

    yield from go(0, EMPTY_K)
