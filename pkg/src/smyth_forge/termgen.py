"""Type-directed enumeration of hole-free terms by exact size.

Guesses are elimination forms: a variable followed by a spine of applications
and projections.  A projection path out of a variable, such as `#1 (#2 p)`,
is an atom of size 1, the way a pattern-bound variable would be.
Application arguments may also be built from unit, pairs and constructors.  Recursive functions are only applied to a structurally smaller
first argument, so every guess terminates.
"""
from __future__ import annotations

from .core import (
    BindKind,
    Datatypes,
    E_UNIT,
    EApp,
    ECtor,
    EPair,
    EProj,
    EVar,
    TArr,
    TData,
    TPair,
    TUnit,
    Type,
    TypeCtx,
    is_path,
)
from .typecheck import smaller_than


def _min_cost(t: Type, target: Type, depth=0) -> int:
    """Smallest spine extension turning a head of type `t` into `target`."""
    if t == target:
        return 0
    if depth > 8:
        return 99
    if isinstance(t, TArr):
        return 1 + _min_cost(t.cod, target, depth + 1)
    if isinstance(t, TPair):
        return 1 + min(_min_cost(t.fst, target, depth + 1), _min_cost(t.snd, target, depth + 1))
    return 99


def _paths(e, t):
    yield e, t
    if isinstance(t, TPair):
        yield from _paths(EProj(1, e), t.fst)
        yield from _paths(EProj(2, e), t.snd)


class TermGen:
    def __init__(self, sigma: Datatypes):
        self.sigma = sigma
        self._elim: dict = {}
        self._arg: dict = {}
        self._cost: dict = {}

    def cost(self, t, target):
        key = (t, target)
        c = self._cost.get(key)
        if c is None:
            c = self._cost[key] = _min_cost(t, target)
        return c

    def elim(self, ctx: TypeCtx, target: Type, n: int) -> tuple:
        """Elimination forms of `target` with size exactly `n`."""
        key = (ctx, target, n)
        hit = self._elim.get(key)
        if hit is not None:
            return hit
        out = []
        if n >= 1:
            for b in reversed(ctx.visible()):
                rec = b.fn if b.kind is BindKind.REC else None
                for head, t in _paths(EVar(b.name), b.typ):
                    if n - 1 < self.cost(t, target):
                        continue
                    self._spine(ctx, head, t, n - 1, target, rec, out)
        res = self._elim[key] = tuple(out)
        return res

    def _spine(self, ctx, head, t, budget, target, rec, out):
        if budget == 0:
            if t == target and rec is None:
                out.append(head)
            return
        if budget < self.cost(t, target):
            return
        if isinstance(t, TArr):
            for s in range(1, budget + 1):
                if budget - s < self.cost(t.cod, target):
                    break
                for a in self.arg(ctx, t.dom, s):
                    if rec is not None and smaller_than(ctx, a) != rec:
                        continue
                    self._spine(ctx, EApp(head, a), t.cod, budget - s, target, None, out)
        elif isinstance(t, TPair) and rec is None and not is_path(head):
            self._spine(ctx, EProj(1, head), t.fst, budget - 1, target, None, out)
            self._spine(ctx, EProj(2, head), t.snd, budget - 1, target, None, out)

    def arg(self, ctx: TypeCtx, t: Type, n: int) -> tuple:
        """Argument forms of type `t` with size exactly `n`."""
        key = (ctx, t, n)
        hit = self._arg.get(key)
        if hit is not None:
            return hit
        out = list(self.elim(ctx, t, n))
        if isinstance(t, TUnit):
            if n == 1:
                out.append(E_UNIT)
        elif isinstance(t, TPair):
            for s in range(1, n - 1):
                for a in self.arg(ctx, t.fst, s):
                    for b in self.arg(ctx, t.snd, n - 1 - s):
                        out.append(EPair(a, b))
        elif isinstance(t, TData) and n >= 2:
            for c, targ in self.sigma.constructors(t.name):
                for a in self.arg(ctx, targ, n - 1):
                    out.append(ECtor(c, a))
        res = self._arg[key] = tuple(out)
        return res

    def up_to(self, ctx: TypeCtx, target: Type, max_size: int):
        for n in range(1, max_size + 1):
            yield from self.elim(ctx, target, n)


def guess(sigma: Datatypes, ctx: TypeCtx, target: Type, max_size: int) -> list:
    return list(TermGen(sigma).up_to(ctx, target, max_size))
