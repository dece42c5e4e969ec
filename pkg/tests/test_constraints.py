import pytest
from hypothesis import given, strategies as st

from generators import NAT, SIGMA, nat
from smyth_forge.constraints import (
    Conflict,
    merge,
    merge_all,
    merge_semantic,
    resolvable,
    satisfies_constraints,
    try_merge,
    unfilled_of,
)
from smyth_forge.core import (
    EMPTY_CTX,
    EMPTY_ENV,
    Constraints,
    ECtor,
    E_UNIT,
    EHole,
    EVar,
    HoleInfo,
    World,
    value_to_result,
)
from smyth_forge.uneval import Session

EXPRS = [EVar("n"), EVar("m"), ECtor("Z", E_UNIT), EHole(9)]
ENVS = [EMPTY_ENV.extend("n", value_to_result(nat(i))).extend("m", value_to_result(nat(1))) for i in range(3)]
WORLDS = [World(env, nat(j)) for env in ENVS for j in range(3)]

fillings = st.dictionaries(st.integers(0, 3), st.sampled_from(EXPRS), max_size=3)
unfilled = st.dictionaries(
    st.integers(0, 3),
    st.lists(st.sampled_from(WORLDS), min_size=1, max_size=3, unique=True).map(tuple),
    max_size=3,
)
constraints = st.builds(Constraints, fillings, unfilled)


def as_sets(k):
    return k.filling, {h: frozenset(ws) for h, ws in k.unfilled.items()}


def env_nm(n, m):
    return EMPTY_ENV.extend("n", value_to_result(nat(n))).extend("m", value_to_result(nat(m)))


# [DERIVED] merge is commutative and associative, up to world order
@given(constraints, constraints)
def test_merge_commutes(k1, k2):
    a, b = try_merge(k1, k2), try_merge(k2, k1)
    assert (a is None) == (b is None)
    if a is not None:
        assert as_sets(a) == as_sets(b)


@given(constraints, constraints, constraints)
def test_merge_associates(k1, k2, k3):
    left = try_merge(k1, k2)
    left = left and try_merge(left, k3)
    right = try_merge(k2, k3)
    right = right and try_merge(k1, right)
    assert (left is None) == (right is None)
    if left is not None:
        assert as_sets(left) == as_sets(right)


@given(constraints)
def test_empty_is_a_unit(k):
    assert merge(k, Constraints()) == k
    assert merge(Constraints(), k) == k


# [TRIVIAL] conflicting fillings
def test_conflicting_fillings_raise():
    with pytest.raises(Conflict):
        merge(Constraints({0: EVar("n")}, {}), Constraints({0: EVar("m")}, {}))
    assert try_merge(Constraints({0: EVar("n")}, {}), Constraints({0: EVar("n")}, {})) is not None


def test_worlds_are_concatenated_without_duplicates():
    w1, w2 = WORLDS[0], WORLDS[1]
    k = merge_all([unfilled_of(0, [w1]), unfilled_of(0, [w1, w2])])
    assert k.unfilled == {0: (w1, w2)}
    assert unfilled_of(0, []) == Constraints()


# [DERIVED] semantic merge checks a filled hole against its worlds
def test_merge_semantic_discharges_satisfied_worlds():
    cx = Session({2: HoleInfo(EMPTY_CTX.extend("n", NAT), NAT)}, SIGMA)
    k = Constraints({2: EVar("n")}, {2: (World(env_nm(0, 0), nat(0)), World(env_nm(2, 0), nat(2)))})
    out = list(merge_semantic(cx, k))
    assert out == [Constraints({2: EVar("n")}, {})]


def test_merge_semantic_refutes_a_wrong_filling():
    cx = Session({2: HoleInfo(EMPTY_CTX.extend("n", NAT), NAT)}, SIGMA)
    k = Constraints({2: ECtor("Z", E_UNIT)}, {2: (World(env_nm(2, 0), nat(2)),)})
    assert list(merge_semantic(cx, k)) == []


def test_merge_semantic_passes_constraints_through_open_fillings():
    cx = Session({2: HoleInfo(EMPTY_CTX.extend("n", NAT), NAT), 3: HoleInfo(EMPTY_CTX.extend("n", NAT), NAT)}, SIGMA)
    w = World(env_nm(1, 0), nat(2))
    out = list(merge_semantic(cx, Constraints({2: ECtor("S", EHole(3))}, {2: (w,)})))
    assert len(out) == 1
    assert [x.ex for x in out[0].unfilled[3]] == [nat(1)]
    assert not resolvable(out[0])


def test_deferred_holes_stay_constrained():
    cx = Session({2: HoleInfo(EMPTY_CTX, NAT)}, SIGMA)
    k = Constraints({2: EHole(2)}, {2: (World(env_nm(0, 0), nat(0)),)})
    assert resolvable(k) == []
    assert list(merge_semantic(cx, k)) == [k]


# [TRIVIAL] satisfaction of a constraint set
def test_satisfies_constraints():
    k = Constraints({0: EVar("n")}, {1: (World(env_nm(2, 0), nat(2)),)})
    assert satisfies_constraints({0: EVar("n"), 1: EVar("n")}, k)
    assert not satisfies_constraints({0: EVar("n"), 1: EVar("m")}, k)
    assert not satisfies_constraints({1: EVar("n")}, k)
    assert satisfies_constraints({}, Constraints())
