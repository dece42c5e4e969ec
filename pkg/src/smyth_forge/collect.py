"""Turn a program's assertions into example constraints on its holes."""
from __future__ import annotations

from typing import Iterator

from .constraints import try_merge
from .core import (
    EMPTY_ENV,
    EMPTY_K,
    Assertion,
    Constraints,
    Program,
    RCtor,
    RPair,
    Result,
    coerce,
    is_indeterminate,
)
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted, eval_fueled, resume


class Inconsistent(Exception):
    """Two sides of an assertion can never be made equal."""


def eval_program(p: Program, fuel: int = DEFAULT_FUEL):
    """Evaluate `main`, then both sides of every assertion with main bound."""
    r_main = eval_fueled(EMPTY_ENV, p.main, fuel)
    env = EMPTY_ENV.extend("main", r_main)
    sides = [(eval_fueled(env, a, fuel), eval_fueled(env, b, fuel)) for a, b in p.asserts]
    return r_main, sides


def result_consistency(r1: Result, r2: Result) -> list:
    if r1 == r2:
        return []
    if type(r1) is RPair and type(r2) is RPair:
        return result_consistency(r1.fst, r2.fst) + result_consistency(r1.snd, r2.snd)
    if type(r1) is RCtor and type(r2) is RCtor and r1.ctor == r2.ctor:
        return result_consistency(r1.arg, r2.arg)
    if is_indeterminate(r1):
        v = coerce(r2)
        if v is not None:
            return [Assertion(r1, v)]
    if is_indeterminate(r2):
        v = coerce(r1)
        if v is not None:
            return [Assertion(r2, v)]
    raise Inconsistent(f"{r1!r} cannot equal {r2!r}")


def eval_assert(p: Program, fuel: int = DEFAULT_FUEL) -> list:
    _, sides = eval_program(p, fuel)
    out = []
    for r1, r2 in sides:
        out.extend(result_consistency(r1, r2))
    return out


def simplify(cx, assertions) -> Iterator[Constraints]:
    """Unevaluate each assertion against its value and merge the results."""
    from .uneval import uneval

    from .uneval import _Cached

    streams = [_Cached(uneval(cx, {}, a.result, a.value)) for a in assertions]

    def go(i, acc):
        if i == len(streams):
            yield acc
            return
        for k in streams[i]:
            m = try_merge(acc, k)
            if m is not None:
                yield from go(i + 1, m)

    yield from go(0, EMPTY_K)


def assertion_satisfaction(filling: dict, assertions, fuel: int = DEFAULT_FUEL) -> bool:
    for a in assertions:
        try:
            r = resume(filling, a.result, fuel)
        except (FuelExhausted, EvalError):
            return False
        if coerce(r) != a.value:
            return False
    return True
