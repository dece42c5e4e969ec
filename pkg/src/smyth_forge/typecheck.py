"""Type checking for expressions, results, environments and programs.

Every fix carries its arrow annotation, so expression types synthesize.  Holes
take their types from the hole context; `hole_contexts` computes that context
bidirectionally, pushing annotation types down to the holes.
"""
from __future__ import annotations

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
    EMPTY_CTX,
    BindKind,
    Datatypes,
    Env,
    Expr,
    HoleInfo,
    Program,
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
    TArr,
    TData,
    TPair,
    TUnit,
    Type,
    TypeCtx,
    UNIT_T,
)


class IllTyped(Exception):
    pass


# --------------------------------------------------------------------------
# Context extension shared with the synthesizer


def extend_fix(ctx: TypeCtx, fix: EFix) -> TypeCtx:
    if fix.fname is not None:
        ctx = ctx.extend(fix.fname, fix.annot, BindKind.REC, fix.fname)
        return ctx.extend(fix.param, fix.annot.dom, BindKind.ARG, fix.fname)
    return ctx.extend(fix.param, fix.annot.dom)


def decreasing_root(ctx: TypeCtx, e: Expr) -> Optional[str]:
    """If `e` is a projection chain of a parameter (or a structurally smaller
    variable) of recursive function f, return f."""
    while isinstance(e, EProj):
        e = e.arg
    if isinstance(e, EVar):
        b = ctx.lookup(e.name)
        if b is not None and b.kind in (BindKind.ARG, BindKind.DEC):
            return b.fn
    return None


def smaller_than(ctx: TypeCtx, e: Expr) -> Optional[str]:
    """If `e` is structurally smaller than the parameter of recursive function
    f, return f."""
    while isinstance(e, EProj):
        e = e.arg
    if isinstance(e, EVar):
        b = ctx.lookup(e.name)
        if b is not None and b.kind is BindKind.DEC:
            return b.fn
    return None


def extend_case(ctx: TypeCtx, scrutinee: Expr, binder: str, t: Type) -> TypeCtx:
    fn = decreasing_root(ctx, scrutinee)
    if fn is not None:
        return ctx.extend(binder, t, BindKind.DEC, fn)
    return ctx.extend(binder, t)


# --------------------------------------------------------------------------
# Expressions


def _datatype(sigma: Datatypes, t: Type) -> str:
    if not isinstance(t, TData) or t.name not in sigma:
        raise IllTyped(f"expected a datatype, got {t}")
    return t.name


def _ctor(sigma: Datatypes, c: str):
    try:
        return sigma.ctors[c]
    except KeyError:
        raise IllTyped(f"unknown constructor {c}") from None


def wf_type(sigma: Datatypes, t: Type) -> None:
    if isinstance(t, TArr):
        wf_type(sigma, t.dom)
        wf_type(sigma, t.cod)
    elif isinstance(t, TPair):
        wf_type(sigma, t.fst)
        wf_type(sigma, t.snd)
    elif isinstance(t, TData):
        _datatype(sigma, t)
    elif not isinstance(t, TUnit):
        raise IllTyped(f"not a type: {t!r}")


def _hole_ctx_ok(recorded: TypeCtx, ctx: TypeCtx) -> bool:
    # the use site may extend the recorded context
    if len(recorded) > len(ctx):
        return False
    return all(
        a.name == b.name and a.typ == b.typ for a, b in zip(recorded.bindings, ctx.bindings)
    )


def synth_exp(delta: dict, sigma: Datatypes, ctx: TypeCtx, e: Expr) -> Type:
    if isinstance(e, EVar):
        t = ctx.type_of(e.name)
        if t is None:
            raise IllTyped(f"unbound variable {e.name}")
        return t
    if isinstance(e, EUnit):
        return UNIT_T
    if isinstance(e, EPair):
        return TPair(synth_exp(delta, sigma, ctx, e.fst), synth_exp(delta, sigma, ctx, e.snd))
    if isinstance(e, EProj):
        t = synth_exp(delta, sigma, ctx, e.arg)
        if not isinstance(t, TPair) or e.index not in (1, 2):
            raise IllTyped(f"projection from {t}")
        return t.fst if e.index == 1 else t.snd
    if isinstance(e, ECtor):
        d, targ, _ = _ctor(sigma, e.ctor)
        check_exp(delta, sigma, ctx, e.arg, targ)
        return TData(d)
    if isinstance(e, EFix):
        if e.annot is None:
            raise IllTyped("unannotated function")
        wf_type(sigma, e.annot)
        check_exp(delta, sigma, extend_fix(ctx, e), e.body, e.annot.cod)
        return e.annot
    if isinstance(e, EApp):
        tf = synth_exp(delta, sigma, ctx, e.fn)
        if not isinstance(tf, TArr):
            raise IllTyped(f"application of {tf}")
        check_exp(delta, sigma, ctx, e.arg, tf.dom)
        return tf.cod
    if isinstance(e, ECase):
        d = _datatype(sigma, synth_exp(delta, sigma, ctx, e.scrutinee))
        _check_branch_ctors(sigma, d, e.branches)
        out = None
        for b in e.branches:
            bctx = extend_case(ctx, e.scrutinee, b.binder, sigma.ctor_type(b.ctor))
            if out is None:
                out = synth_exp(delta, sigma, bctx, b.body)
            else:
                check_exp(delta, sigma, bctx, b.body, out)
        return out
    if isinstance(e, EHole):
        info = delta.get(e.name)
        if info is None:
            raise IllTyped(f"hole ??{e.name} has no recorded type")
        if not _hole_ctx_ok(info.ctx, ctx):
            raise IllTyped(f"hole ??{e.name} used outside its context")
        return info.typ
    raise IllTyped(f"not an expression: {e!r}")


def check_exp(delta: dict, sigma: Datatypes, ctx: TypeCtx, e: Expr, t: Type) -> None:
    got = synth_exp(delta, sigma, ctx, e)
    if got != t:
        raise IllTyped(f"expected {t}, got {got}")


def _check_branch_ctors(sigma, d, branches):
    want = [c for c, _ in sigma.constructors(d)]
    have = [b.ctor for b in branches]
    if sorted(want) != sorted(have):
        raise IllTyped(f"case on {d} must cover exactly {want}, got {have}")


# --------------------------------------------------------------------------
# Results and environments


def synth_result(delta: dict, sigma: Datatypes, r: Result) -> Type:
    if isinstance(r, RUnit):
        return UNIT_T
    if isinstance(r, RPair):
        return TPair(synth_result(delta, sigma, r.fst), synth_result(delta, sigma, r.snd))
    if isinstance(r, RCtor):
        d, targ, _ = _ctor(sigma, r.ctor)
        check_result(delta, sigma, r.arg, targ)
        return TData(d)
    if isinstance(r, RFix):
        ctx = env_ctx(delta, sigma, r.env)
        return synth_exp(delta, sigma, ctx, r.fix)
    if isinstance(r, RHole):
        info = delta.get(r.name)
        if info is None:
            raise IllTyped(f"hole ??{r.name} has no recorded type")
        check_env(delta, sigma, r.env, info.ctx)
        return info.typ
    if isinstance(r, RApp):
        tf = synth_result(delta, sigma, r.fn)
        if not isinstance(tf, TArr):
            raise IllTyped(f"application of {tf}")
        check_result(delta, sigma, r.arg, tf.dom)
        return tf.cod
    if isinstance(r, RProj):
        t = synth_result(delta, sigma, r.arg)
        if not isinstance(t, TPair):
            raise IllTyped(f"projection from {t}")
        return t.fst if r.index == 1 else t.snd
    if isinstance(r, RCase):
        ctx = env_ctx(delta, sigma, r.env)
        d = _datatype(sigma, synth_result(delta, sigma, r.scrutinee))
        _check_branch_ctors(sigma, d, r.branches)
        out = None
        for b in r.branches:
            bctx = ctx.extend(b.binder, sigma.ctor_type(b.ctor))
            t = synth_exp(delta, sigma, bctx, b.body)
            if out is None:
                out = t
            elif t != out:
                raise IllTyped("case branches disagree")
        return out
    if isinstance(r, RInverse):
        d, targ, _ = _ctor(sigma, r.ctor)
        check_result(delta, sigma, r.arg, TData(d))
        return targ
    raise IllTyped(f"not a result: {r!r}")


def check_result(delta: dict, sigma: Datatypes, r: Result, t: Type) -> None:
    got = synth_result(delta, sigma, r)
    if got != t:
        raise IllTyped(f"result expected {t}, got {got}")


def env_ctx(delta: dict, sigma: Datatypes, env: Env) -> TypeCtx:
    ctx = EMPTY_CTX
    for x, r in env.bindings:
        ctx = ctx.extend(x, synth_result(delta, sigma, r))
    return ctx


def check_env(delta: dict, sigma: Datatypes, env: Env, ctx: TypeCtx) -> None:
    if env.names() != [b.name for b in ctx.bindings]:
        raise IllTyped(f"environment {env.names()} does not match context")
    for (_, r), b in zip(env.bindings, ctx.bindings):
        check_result(delta, sigma, r, b.typ)


# --------------------------------------------------------------------------
# Programs


def _synth_assert(delta, sigma, ctx, lhs, rhs):
    try:
        t = synth_exp(delta, sigma, ctx, lhs)
    except IllTyped:
        t = synth_exp(delta, sigma, ctx, rhs)
        check_exp(delta, sigma, ctx, lhs, t)
        return t
    check_exp(delta, sigma, ctx, rhs, t)
    return t


def check_program(delta: dict, sigma: Datatypes, p: Program) -> Type:
    t = synth_exp(delta, sigma, EMPTY_CTX, p.main)
    ctx = EMPTY_CTX.extend("main", t)
    for lhs, rhs in p.asserts:
        _synth_assert(delta, sigma, ctx, lhs, rhs)
    return t


def hole_contexts(sigma: Datatypes, p: Program) -> dict:
    """Compute the hole context of a program whose holes are unannotated."""
    delta: dict = {}
    t = _Collector(sigma, delta).synth(EMPTY_CTX, p.main, 0)
    ctx = EMPTY_CTX.extend("main", t)
    c = _Collector(sigma, delta)
    for lhs, rhs in p.asserts:
        try:
            tl = c.synth(ctx, lhs, 0)
        except IllTyped:
            tl = c.synth(ctx, rhs, 0)
            c.check(ctx, lhs, tl, 0)
        else:
            c.check(ctx, rhs, tl, 0)
    return delta


class _Collector:
    def __init__(self, sigma, delta):
        self.sigma = sigma
        self.delta = delta

    def record(self, h, ctx, t, depth, hint=None):
        # cases written by the user count against the branching budget
        old = self.delta.get(h)
        if old is None:
            self.delta[h] = HoleInfo(ctx, t, depth, hint)
            return
        # a hole shared by several sites sees the common part of their contexts
        if old.typ != t:
            raise IllTyped(f"hole ??{h} used at types {old.typ} and {t}")
        common = []
        for a, b in zip(old.ctx.bindings, ctx.bindings):
            if a != b:
                break
            common.append(a)
        hint = old.name_hint if old.name_hint == hint else None
        self.delta[h] = HoleInfo(TypeCtx(tuple(common)), t, max(old.match_depth, depth), hint)

    def check(self, ctx, e, t, depth, hint=None):
        if isinstance(e, EHole):
            self.record(e.name, ctx, t, depth, hint)
            return
        if isinstance(e, EPair) and isinstance(t, TPair):
            self.check(ctx, e.fst, t.fst, depth)
            self.check(ctx, e.snd, t.snd, depth)
            return
        if isinstance(e, ECtor):
            d, targ, _ = _ctor(self.sigma, e.ctor)
            if t != TData(d):
                raise IllTyped(f"constructor {e.ctor} used at type {t}")
            self.check(ctx, e.arg, targ, depth)
            return
        if isinstance(e, ECase):
            d = _datatype(self.sigma, self.synth(ctx, e.scrutinee, depth))
            _check_branch_ctors(self.sigma, d, e.branches)
            for b in e.branches:
                bctx = extend_case(ctx, e.scrutinee, b.binder, self.sigma.ctor_type(b.ctor))
                self.check(bctx, b.body, t, depth + 1)
            return
        got = self.synth(ctx, e, depth)
        if got != t:
            raise IllTyped(f"expected {t}, got {got}")

    def synth(self, ctx, e, depth):
        if isinstance(e, EVar):
            t = ctx.type_of(e.name)
            if t is None:
                raise IllTyped(f"unbound variable {e.name}")
            return t
        if isinstance(e, EUnit):
            return UNIT_T
        if isinstance(e, EPair):
            return TPair(self.synth(ctx, e.fst, depth), self.synth(ctx, e.snd, depth))
        if isinstance(e, EProj):
            t = self.synth(ctx, e.arg, depth)
            if not isinstance(t, TPair):
                raise IllTyped(f"projection from {t}")
            return t.fst if e.index == 1 else t.snd
        if isinstance(e, ECtor):
            d, targ, _ = _ctor(self.sigma, e.ctor)
            self.check(ctx, e.arg, targ, depth)
            return TData(d)
        if isinstance(e, EFix):
            if e.annot is None:
                raise IllTyped("unannotated function")
            wf_type(self.sigma, e.annot)
            self.check(extend_fix(ctx, e), e.body, e.annot.cod, depth)
            return e.annot
        if isinstance(e, EApp):
            tf = self.synth(ctx, e.fn, depth)
            if not isinstance(tf, TArr):
                raise IllTyped(f"application of {tf}")
            hint = None
            if isinstance(e.fn, EFix) and e.fn.fname is None:
                hint = e.fn.param  # let-bound definition; names the function
            self.check(ctx, e.arg, tf.dom, depth, hint)
            return tf.cod
        if isinstance(e, ECase):
            d = _datatype(self.sigma, self.synth(ctx, e.scrutinee, depth))
            _check_branch_ctors(self.sigma, d, e.branches)
            bctxs = [
                extend_case(ctx, e.scrutinee, b.binder, self.sigma.ctor_type(b.ctor))
                for b in e.branches
            ]
            out = None
            err = None
            chosen = -1
            for i, b in enumerate(e.branches):
                try:
                    out = self.synth(bctxs[i], b.body, depth + 1)
                except IllTyped as exc:
                    err = err or exc
                    continue
                chosen = i
                break
            if out is None:
                raise err
            for i, b in enumerate(e.branches):
                if i != chosen:
                    self.check(bctxs[i], b.body, out, depth + 1)
            return out
        if isinstance(e, EHole):
            raise IllTyped(f"cannot infer the type of hole ??{e.name}")
        raise IllTyped(f"not an expression: {e!r}")
