"""Brute-force enumeration of guesses, used as an oracle for the term generator."""
import itertools

from smyth_forge.core import E_UNIT, EMPTY_CTX, EApp, ECtor, EPair, EProj, EVar, TArr, TData, TPair, TUnit, size
from smyth_forge.surface import load_problem
from smyth_forge.termgen import guess
from smyth_forge.typecheck import IllTyped, check_exp, synth_exp

SIGMA = load_problem("").sigma
BOOL = TData("Bool")
MAX_SIZE = 3
VAR_TYPES = [
    BOOL,
    TUnit(),
    TPair(BOOL, BOOL),
    TPair(BOOL, TPair(BOOL, TUnit())),
    TArr(BOOL, BOOL),
    TArr(BOOL, TArr(BOOL, BOOL)),
    TArr(TPair(BOOL, BOOL), BOOL),
    TArr(TUnit(), TPair(BOOL, BOOL)),
]
TARGETS = [BOOL, TUnit(), TPair(BOOL, BOOL), TArr(BOOL, BOOL)]


def well_typed(ctx, e):
    try:
        synth_exp({}, SIGMA, ctx, e)
        return True
    except IllTyped:
        return False


def brute_force(ctx, target):
    """Bottom-up enumeration of every elimination form of size at most 3."""
    elims = {EVar(b.name) for b in ctx.visible()}
    args = {E_UNIT}
    while True:
        new_args = elims | {ECtor(c, a) for d in SIGMA for c, _ in SIGMA.constructors(d) for a in args}
        new_args |= {EPair(a, b) for a in args for b in args if size(a) + size(b) < MAX_SIZE}
        new_elims = {EProj(i, e) for e in elims for i in (1, 2)}
        new_elims |= {EApp(e, a) for e in elims for a in args if size(e) + size(a) <= MAX_SIZE}
        new_args = {a for a in new_args - args if size(a) <= MAX_SIZE and well_typed(ctx, a)}
        new_elims = {e for e in new_elims - elims if size(e) <= MAX_SIZE and well_typed(ctx, e)}
        if not new_args and not new_elims:
            break
        args |= new_args
        elims |= new_elims
    out = set()
    for e in elims:
        try:
            check_exp({}, SIGMA, ctx, e, target)
        except IllTyped:
            continue
        out.add(e)
    return out


def context(types):
    ctx = EMPTY_CTX
    for name, t in zip(["x", "y"], types):
        ctx = ctx.extend(name, t)
    return ctx


def guess_mismatch(types, target):
    """None when the generator agrees with brute force, else a description."""
    ctx = context(types)
    got = guess(SIGMA, ctx, target, MAX_SIZE)
    if len(got) != len(set(got)):
        return f"duplicates for {types} -> {target}"
    want = brute_force(ctx, target)
    if set(got) != want:
        return f"{types} -> {target}: missing {want - set(got)}, extra {set(got) - want}"
    return None


def all_goals():
    """Every context of one or two variables paired with every target."""
    for n in (1, 2):
        for types in itertools.product(VAR_TYPES, repeat=n):
            for target in TARGETS:
                yield list(types), target
