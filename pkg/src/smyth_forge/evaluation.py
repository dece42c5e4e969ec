"""Big-step evaluation with holes, resumption under a filling, live evaluation.

Fuel bounds the nesting depth of beta reductions (function bodies and case
branches).  A top-level query (`live_eval`, `resume`, `apply_value`) also
carries a `Budget` that caps the total number of beta reductions performed by
all of its embedded evaluations, so runaway recursion is cut off after a
bounded amount of work rather than only a bounded depth.
"""
from __future__ import annotations

import sys
from typing import Optional

from .core import (
    EApp,
    ECase,
    ECtor,
    EFix,
    EHole,
    EPair,
    EProj,
    EUnit,
    EVar,
    Env,
    Expr,
    R_UNIT,
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
)

DEFAULT_FUEL = 1000

if sys.getrecursionlimit() < 60000:
    sys.setrecursionlimit(60000)


class FuelExhausted(Exception):
    pass


class EvalError(Exception):
    """Evaluation got stuck on an ill-typed or ill-scoped term."""


class Budget:
    """Beta reductions left for one top-level query."""

    __slots__ = ("left",)

    def __init__(self, left: int):
        self.left = left

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted()


def eval_fueled(
    env: Env, e: Expr, fuel: int, budget: Optional[Budget] = None, filling: Optional[dict] = None
) -> Result:
    """Evaluate `e`; holes bound in `filling` are evaluated in place."""
    if fuel <= 0:
        raise FuelExhausted()
    t = type(e)
    if t is EVar:
        try:
            return env.lookup(e.name)
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
    if t is EApp:
        r1 = eval_fueled(env, e.fn, fuel, budget, filling)
        r2 = eval_fueled(env, e.arg, fuel, budget, filling)
        return apply(r1, r2, fuel, budget, filling)
    if t is ECase:
        r = eval_fueled(env, e.scrutinee, fuel, budget, filling)
        if type(r) is RCtor:
            if budget is not None:
                budget.spend()
            b = _branch(e.branches, r.ctor)
            return eval_fueled(env.extend(b.binder, r.arg), b.body, fuel - 1, budget, filling)
        if _determinate(r):
            raise EvalError("case on a non-constructor")
        return RCase(env, r, e.branches)
    if t is EProj:
        r = eval_fueled(env, e.arg, fuel, budget, filling)
        if type(r) is RPair:
            return r.fst if e.index == 1 else r.snd
        if _determinate(r):
            raise EvalError("projection from a non-pair")
        return RProj(e.index, r)
    if t is ECtor:
        return RCtor(e.ctor, eval_fueled(env, e.arg, fuel, budget, filling))
    if t is EPair:
        return RPair(eval_fueled(env, e.fst, fuel, budget, filling), eval_fueled(env, e.snd, fuel, budget, filling))
    if t is EFix:
        return RFix(env, e)
    if t is EHole:
        if filling:
            f = filling.get(e.name)
            if f is not None and not (type(f) is EHole and f.name == e.name):
                if budget is not None:
                    budget.spend()
                return eval_fueled(env, f, fuel - 1, budget, filling)
        return RHole(env, e.name)
    if t is EUnit:
        return R_UNIT
    raise EvalError(f"not an expression: {e!r}")


def eval_exp(env: Env, e: Expr, fuel: int = DEFAULT_FUEL) -> Result:
    return eval_fueled(env, e, fuel, Budget(fuel))


def apply(
    r1: Result, r2: Result, fuel: int, budget: Optional[Budget] = None, filling: Optional[dict] = None
) -> Result:
    if type(r1) is RFix:
        if budget is not None:
            budget.spend()
        fix = r1.fix
        env = r1.env
        if fix.fname is not None:
            env = env.extend(fix.fname, r1)
        return eval_fueled(env.extend(fix.param, r2), fix.body, fuel - 1, budget, filling)
    if _determinate(r1):
        raise EvalError("application of a non-function")
    return RApp(r1, r2)


def _branch(branches, ctor):
    for b in branches:
        if b.ctor == ctor:
            return b
    raise EvalError(f"no branch for constructor {ctor}")


def _determinate(r) -> bool:
    return type(r) in (RFix, RUnit, RPair, RCtor)


# --------------------------------------------------------------------------
# Whether resumption can change a result, cached on the node


def has_holes(r) -> bool:
    d = r.__dict__
    try:
        return d["_hh"]
    except KeyError:
        pass
    t = type(r)
    if t is RUnit:
        v = False
    elif t is RCtor:
        v = has_holes(r.arg)
    elif t is RPair:
        v = has_holes(r.fst) or has_holes(r.snd)
    elif t is RFix:
        # resumption only touches the captured environment of a closure
        v = has_holes(r.env)
    elif t is Env:
        v = any(has_holes(x) for _, x in r.bindings)
    else:
        v = True
    object.__setattr__(r, "_hh", v)
    return v


# --------------------------------------------------------------------------
# Resumption


class _Resumer:
    # results form DAGs through shared environments; both memos are keyed
    # by identity and keep the key alive so ids cannot be reused
    __slots__ = ("filling", "envs", "results", "budget")

    def __init__(self, filling, budget: Budget):
        self.filling = filling
        self.envs = {}
        self.results = {}
        self.budget = budget

    def env(self, env: Env, fuel: int) -> Env:
        if not has_holes(env):
            return env
        key = id(env)
        hit = self.envs.get(key)
        if hit is not None and hit[0] is env:
            return hit[1]
        out = Env(tuple((x, self.result(r, fuel)) for x, r in env.bindings))
        self.envs[key] = (env, out)
        return out

    def result(self, r: Result, fuel: int) -> Result:
        if not has_holes(r):
            return r
        key = id(r)
        hit = self.results.get(key)
        if hit is not None and hit[0] is r:
            return hit[1]
        out = self._result(r, fuel)
        self.results[key] = (r, out)
        return out

    def _result(self, r: Result, fuel: int) -> Result:
        if fuel <= 0:
            raise FuelExhausted()
        budget = self.budget
        t = type(r)
        if t is RHole:
            e = self.filling.get(r.name)
            if e is not None and not (type(e) is EHole and e.name == r.name):
                budget.spend()
                return self.result(eval_fueled(r.env, e, fuel - 1, budget, self.filling), fuel - 1)
            return RHole(self.env(r.env, fuel), r.name)
        if t is RFix:
            return RFix(self.env(r.env, fuel), r.fix)
        if t is RPair:
            return RPair(self.result(r.fst, fuel), self.result(r.snd, fuel))
        if t is RCtor:
            return RCtor(r.ctor, self.result(r.arg, fuel))
        if t is RApp:
            r1 = self.result(r.fn, fuel)
            r2 = self.result(r.arg, fuel)
            if type(r1) is RFix:
                return self.result(apply(r1, r2, fuel, budget, self.filling), fuel - 1)
            if _determinate(r1):
                raise EvalError("application of a non-function")
            return RApp(r1, r2)
        if t is RProj:
            r1 = self.result(r.arg, fuel)
            if type(r1) is RPair:
                return r1.fst if r.index == 1 else r1.snd
            if _determinate(r1):
                raise EvalError("projection from a non-pair")
            return RProj(r.index, r1)
        if t is RCase:
            r1 = self.result(r.scrutinee, fuel)
            if type(r1) is RCtor:
                # evaluating then resuming equals resuming the environment first
                budget.spend()
                b = _branch(r.branches, r1.ctor)
                out = eval_fueled(r.env.extend(b.binder, r1.arg), b.body, fuel - 1, budget, self.filling)
                return self.result(out, fuel - 1)
            if _determinate(r1):
                raise EvalError("case on a non-constructor")
            return RCase(self.env(r.env, fuel), r1, r.branches)
        if t is RInverse:
            r1 = self.result(r.arg, fuel)
            if type(r1) is RCtor and r1.ctor == r.ctor:
                return r1.arg
            return RInverse(r.ctor, r1)
        raise EvalError(f"not a result: {r!r}")


def resume(filling: dict, r: Result, fuel: int = DEFAULT_FUEL, budget: Optional[Budget] = None) -> Result:
    if not filling or not has_holes(r):
        return r
    return _Resumer(filling, budget or Budget(fuel)).result(r, fuel)


def resume_env(filling: dict, env: Env, fuel: int = DEFAULT_FUEL) -> Env:
    if not filling:
        return env
    return _Resumer(filling, Budget(fuel)).env(env, fuel)


def live_eval(env: Env, filling: dict, e: Expr, fuel: int = DEFAULT_FUEL) -> Result:
    budget = Budget(fuel)
    return resume(filling, eval_fueled(env, e, fuel, budget, filling), fuel, budget)


def apply_value(filling: dict, fn: Result, args, fuel: int = DEFAULT_FUEL) -> Result:
    """Apply a function result to argument results, resuming under `filling`."""
    budget = Budget(fuel)
    r = fn
    for a in args:
        r = resume(filling, r, fuel, budget)
        if type(r) is RFix:
            r = apply(r, a, fuel, budget, filling)
        else:
            r = RApp(r, a)
    return resume(filling, r, fuel, budget)
