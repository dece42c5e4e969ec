"""Constraint merging, syntactic and semantic, and constraint satisfaction."""
from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .core import Constraints, EHole
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted, live_eval

MAX_MERGE_ITERATIONS = 100


class Conflict(Exception):
    """Two fillings bind the same hole to different expressions."""


def merge_fillings(f1: dict, f2: dict) -> dict:
    if not f1:
        return f2
    if not f2:
        return f1
    out = dict(f1)
    for h, e in f2.items():
        old = out.get(h)
        if old is None:
            out[h] = e
        elif old != e:
            raise Conflict(h)
    return out


def merge_unfilled(u1: dict, u2: dict) -> dict:
    if not u1:
        return u2
    if not u2:
        return u1
    out = dict(u1)
    for h, ws in u2.items():
        old = out.get(h)
        if old is None:
            out[h] = ws
        else:
            seen = set(old)
            out[h] = old + tuple(w for w in ws if w not in seen)
    return out


def merge(k1: Constraints, k2: Constraints) -> Constraints:
    return Constraints(
        merge_fillings(k1.filling, k2.filling), merge_unfilled(k1.unfilled, k2.unfilled)
    )


def try_merge(k1: Constraints, k2: Constraints) -> Optional[Constraints]:
    try:
        return merge(k1, k2)
    except Conflict:
        return None


def merge_all(ks: Iterable[Constraints]) -> Constraints:
    out = Constraints()
    for k in ks:
        out = merge(out, k)
    return out


def unfilled_of(h: int, worlds) -> Constraints:
    worlds = tuple(worlds)
    return Constraints({}, {h: worlds} if worlds else {})


def is_deferred(filling: dict, h: int) -> bool:
    e = filling.get(h)
    return isinstance(e, EHole) and e.name == h


def resolvable(k: Constraints) -> list:
    """Holes that are both filled (not deferred) and constrained."""
    return [h for h in k.unfilled if h in k.filling and not is_deferred(k.filling, h)]


def merge_semantic(cx, k: Constraints) -> Iterator[Constraints]:
    """Check constrained holes against their fillings until nothing changes."""
    yield from _fixpoint(cx, k, 0)


def _fixpoint(cx, k, depth):
    if not resolvable(k):
        yield k
        return
    if depth >= MAX_MERGE_ITERATIONS:
        return
    for k2 in _step(cx, k):
        if k2 == k:
            yield k
        else:
            yield from _fixpoint(cx, k2, depth + 1)


def _step(cx, k: Constraints) -> Iterator[Constraints]:
    from .uneval import check

    f = k.filling
    fixed = {}
    todo = []
    for h, ws in k.unfilled.items():
        if h in f and not is_deferred(f, h):
            todo.append((h, ws))
        else:
            fixed[h] = ws
    base = Constraints(f, fixed)

    def go(i, acc):
        if i == len(todo):
            yield acc
            return
        h, ws = todo[i]
        for kh in check(cx, f, f[h], ws):
            m = try_merge(acc, kh)
            if m is not None:
                yield from go(i + 1, m)

    yield from go(0, base)


def satisfies_constraints(filling: dict, k: Constraints, fuel: int = DEFAULT_FUEL) -> bool:
    from .uneval import satisfies

    for h, e in k.filling.items():
        if filling.get(h) != e:
            return False
    for h, ws in k.unfilled.items():
        for w in ws:
            try:
                r = live_eval(w.env, filling, EHole(h), fuel)
            except (FuelExhausted, EvalError):
                return False
            if not satisfies(filling, r, w.ex, fuel):
                return False
    return True
