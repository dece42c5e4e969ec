from hypothesis import given, settings, strategies as st

from oracles import BOOL, SIGMA, TARGETS, VAR_TYPES, guess_mismatch
from smyth_forge.core import EMPTY_CTX, EApp, EVar, TArr, TData, size
from smyth_forge.surface import load_problem
from smyth_forge.termgen import TermGen, guess
from smyth_forge.typecheck import check_exp

NAT = TData("Nat")


# [DERIVED] the generator finds exactly the brute-force terms, once each
@settings(max_examples=60)
@given(st.lists(st.sampled_from(VAR_TYPES), min_size=1, max_size=2), st.sampled_from(TARGETS))
def test_guess_complete_against_brute_force(types, target):
    assert guess_mismatch(types, target) is None


# [DERIVED] terms come out by exact size and well typed
def test_elim_sizes_are_exact():
    ctx = EMPTY_CTX.extend("f", TArr(BOOL, BOOL)).extend("b", BOOL)
    gen = TermGen(SIGMA)
    for n in range(1, 5):
        for e in gen.elim(ctx, BOOL, n):
            assert size(e) == n
            check_exp({}, SIGMA, ctx, e, BOOL)


# [PAPER] recursive calls need a structurally smaller first argument
def test_recursive_guess_requires_smaller_argument():
    p = load_problem("plus : Nat -> Nat -> Nat\nplus m n =\n  case m of\n    Z -> ??\n    S m1 -> ??\n")
    ctx = p.delta[1].ctx
    got = guess(p.sigma, ctx, NAT, 3)
    call = lambda a, b: EApp(EApp(EVar("plus"), EVar(a)), EVar(b))
    assert call("m1", "n") in got
    assert call("m", "n") not in got
    assert call("n", "m1") not in got
    assert EVar("plus") not in guess(p.sigma, ctx, TArr(NAT, TArr(NAT, NAT)), 3)
