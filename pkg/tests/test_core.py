from hypothesis import given, strategies as st

from generators import nat, nat_list
from smyth_forge.core import (
    E_UNIT,
    EMPTY_CTX,
    EMPTY_ENV,
    Branch,
    Classification,
    EApp,
    ECase,
    ECtor,
    EFix,
    EHole,
    EPair,
    EProj,
    EVar,
    NotSimple,
    RApp,
    RCtor,
    RFix,
    RHole,
    RInverse,
    RPair,
    R_UNIT,
    TArr,
    TData,
    TOP,
    World,
    XCtor,
    XInOut,
    XPair,
    XUnit,
    alpha_equal,
    classify,
    filter_worlds,
    free_vars,
    holes_of,
    is_path,
    result_to_value,
    size,
    substitute_holes,
    value_to_expr,
    value_to_result,
)

NAT = TData("Nat")

values = st.recursive(
    st.just(XUnit()) | st.sampled_from([XCtor("True", XUnit()), XCtor("Z", XUnit())]),
    lambda inner: st.builds(XPair, inner, inner) | st.builds(XCtor, st.sampled_from(["S", "Just", "Cons"]), inner),
    max_leaves=8,
)


# [TRIVIAL] size conventions
def test_size_of_application_counts_no_app_nodes():
    e = EApp(EApp(EVar("plus"), EVar("m1")), EVar("n"))
    assert size(e) == 3


def test_projection_path_is_a_single_node():
    p = EProj(1, EProj(2, EVar("p")))
    assert is_path(p)
    assert size(p) == 1
    assert not is_path(EProj(1, EApp(EVar("f"), EVar("x"))))
    assert size(EProj(1, EApp(EVar("f"), EVar("x")))) == 3


def test_size_of_case_and_fix():
    body = ECase(EVar("m"), (Branch("Z", "u", EVar("n")), Branch("S", "m1", ECtor("S", EVar("m1")))))
    assert size(body) == 1 + 1 + (1 + 1) + (1 + 2)
    assert size(EFix("f", "m", TArr(NAT, NAT), body)) == size(body) + 1


def test_nullary_constructor_size():
    assert size(ECtor("Z", E_UNIT)) == 2


# [TRIVIAL] classification
def test_classify_partitions_results():
    det = [R_UNIT, RPair(R_UNIT, R_UNIT), RCtor("Z", R_UNIT), RFix(EMPTY_ENV, EFix(None, "x", TArr(NAT, NAT), EVar("x")))]
    hole = RHole(EMPTY_ENV, 0)
    indet = [hole, RApp(hole, R_UNIT), RInverse("S", hole)]
    assert all(classify(r) is Classification.DETERMINATE for r in det)
    assert all(classify(r) is Classification.INDETERMINATE for r in indet)


@given(values)
def test_coercion_round_trip(v):
    assert result_to_value(value_to_result(v)) == v


def test_coercion_rejects_closures():
    fn = RFix(EMPTY_ENV, EFix(None, "x", TArr(NAT, NAT), EVar("x")))
    try:
        result_to_value(RPair(fn, R_UNIT))
    except NotSimple:
        pass
    else:
        raise AssertionError("closure coerced to a value")


def test_value_to_expr():
    assert value_to_expr(nat(1)) == ECtor("S", ECtor("Z", E_UNIT))


@given(st.lists(st.sampled_from([TOP, nat(0), nat(2), XInOut(nat(1), TOP)]), max_size=6))
def test_filter_worlds_is_idempotent(exs):
    ws = [World(EMPTY_ENV, x) for x in exs]
    once = filter_worlds(ws)
    assert filter_worlds(once) == once
    assert all(w.ex != TOP for w in once)


# substitution and syntax utilities
def test_substitute_holes_follows_chains():
    e = EPair(EHole(0), EHole(2))
    out = substitute_holes(e, {0: ECtor("S", EHole(1)), 1: EVar("x")})
    assert out == EPair(ECtor("S", EVar("x")), EHole(2))


def test_substitute_holes_stops_on_self_reference():
    assert substitute_holes(EHole(0), {0: EHole(0)}) == EHole(0)
    # a cyclic filling is unfolded once
    assert substitute_holes(EHole(0), {0: ECtor("S", EHole(0))}) == ECtor("S", EHole(0))


def test_holes_and_free_vars():
    e = ECase(EVar("x"), (Branch("Z", "u", EHole(3)), Branch("S", "y", EApp(EVar("y"), EHole(4)))))
    assert holes_of(e) == [3, 4]
    assert free_vars(e) == {"x"}


def test_alpha_equivalence_renames_binders():
    a = EFix("f", "x", TArr(NAT, NAT), ECase(EVar("x"), (Branch("Z", "u", EVar("x")), Branch("S", "y", EApp(EVar("f"), EVar("y"))))))
    b = EFix("g", "z", TArr(NAT, NAT), ECase(EVar("z"), (Branch("Z", "v", EVar("z")), Branch("S", "w", EApp(EVar("g"), EVar("w"))))))
    c = EFix("g", "z", TArr(NAT, NAT), ECase(EVar("z"), (Branch("Z", "v", EVar("z")), Branch("S", "w", EApp(EVar("g"), EVar("z"))))))
    assert alpha_equal(a, b)
    assert not alpha_equal(a, c)
    assert not alpha_equal(EVar("x"), EVar("y"))


def test_environment_shadowing():
    env = EMPTY_ENV.extend("x", R_UNIT).extend("x", RCtor("Z", R_UNIT))
    assert env.lookup("x") == RCtor("Z", R_UNIT)
    ctx = EMPTY_CTX.extend("x", NAT).extend("x", TData("Bool"))
    assert [b.typ for b in ctx.visible()] == [TData("Bool")]


def test_nat_list_helper_shape():
    assert nat_list([1]) == XCtor("Cons", XPair(nat(1), XCtor("Nil", XUnit())))
