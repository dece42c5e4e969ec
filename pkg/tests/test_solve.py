import itertools

import pytest

from generators import nat
from smyth_forge.constraints import satisfies_constraints
from smyth_forge.core import (
    EMPTY_CTX,
    EMPTY_ENV,
    TOP,
    Constraints,
    ECase,
    EFix,
    EHole,
    EVar,
    HoleInfo,
    TArr,
    TData,
    World,
    XInOut,
    value_to_result,
)
from smyth_forge.solve import DEFAULT_STAGES, Solver, Stage, parse_stages
from smyth_forge.surface import load_problem
from smyth_forge.uneval import Session

SIGMA = load_problem("").sigma
NAT = TData("Nat")
NAT_CTX = EMPTY_CTX.extend("m", NAT)


def env_m(m):
    return EMPTY_ENV.extend("m", value_to_result(nat(m)))


def solver(delta, stage=Stage(5, 1, 1)):
    return Solver(Session(dict(delta), SIGMA), stage)


# [TRIVIAL] staging
def test_default_stages_grow():
    assert DEFAULT_STAGES[0].match_depth == 0
    for a, b in zip(DEFAULT_STAGES, DEFAULT_STAGES[1:]):
        assert a.term_size <= b.term_size
        assert a.scrutinee_size <= b.scrutinee_size
        assert a.match_depth <= b.match_depth


def test_parse_stages():
    assert parse_stages("1,0,0; 5,1,1") == (Stage(1, 0, 0), Stage(5, 1, 1))
    assert str(Stage(9, 3, 2)) == "9,3,2"
    with pytest.raises(ValueError):
        parse_stages("")
    with pytest.raises(ValueError):
        parse_stages("1,2")


# [DERIVED] solving rules
def test_nothing_left_to_solve():
    s = solver({0: HoleInfo(NAT_CTX, NAT)})
    k = Constraints({0: EVar("m")}, {})
    assert list(s.solve(k)) == [{0: EVar("m")}]


def test_unconstrained_hole_is_deferred():
    s = solver({0: HoleInfo(NAT_CTX, NAT)})
    out = list(s.fill(0, {}, [World(env_m(0), TOP)]))
    assert out == [Constraints({0: EHole(0)}, {})]


def test_refine_fix_binds_function_and_argument():
    t = TArr(NAT, NAT)
    s = solver({0: HoleInfo(EMPTY_CTX, t, name_hint="f")})
    ws = [World(EMPTY_ENV, XInOut(nat(i), nat(i + 1))) for i in range(2)]
    k = next(s.refine(0, s.delta[0], ws))
    fix = k.filling[0]
    assert isinstance(fix, EFix) and fix.fname == "f"
    (h1, body_ws), = k.unfilled.items()
    assert fix.body == EHole(h1)
    for i, w in enumerate(body_ws):
        assert w.env.lookup(fix.param) == value_to_result(nat(i))
        assert w.env.lookup("f") is not None
        assert w.ex == nat(i + 1)


def test_branch_distributes_worlds_by_constructor():
    s = solver({0: HoleInfo(NAT_CTX, NAT)}, Stage(1, 1, 1))
    ws = [World(env_m(0), nat(0)), World(env_m(2), nat(1))]
    outs = list(s.branch(0, s.delta[0], {}, ws))
    assert outs
    k = outs[0]
    case = k.filling[0]
    assert isinstance(case, ECase) and case.scrutinee == EVar("m")
    (z, zh), (sc, sh) = [(b.ctor, b.body.name) for b in case.branches]
    assert (z, sc) == ("Z", "S")
    assert [w.ex for w in k.unfilled[zh]] == [nat(0)]
    (w,), = [k.unfilled[sh]]
    pred = case.branches[1].binder
    assert w.env.lookup(pred) == value_to_result(nat(1)) and w.ex == nat(1)


def test_solution_for_predecessor():
    s = solver({0: HoleInfo(NAT_CTX, NAT)}, Stage(1, 1, 1))
    ws = (World(env_m(0), nat(0)), World(env_m(2), nat(1)))
    k = Constraints({}, {0: ws})
    sols = list(itertools.islice(s.solve(k), 3))
    assert sols and all(satisfies_constraints(f, k) for f in sols)


def test_fresh_holes_are_disjoint():
    s = solver({0: HoleInfo(NAT_CTX, NAT), 5: HoleInfo(NAT_CTX, NAT)})
    a = s.fresh_hole(HoleInfo(NAT_CTX, NAT))
    b = s.fresh_hole(HoleInfo(NAT_CTX, NAT))
    assert a > 5 and b > a
    assert {a, b} <= set(s.delta)


def test_contradictory_worlds_have_no_solution():
    s = solver({0: HoleInfo(NAT_CTX, NAT)}, Stage(5, 1, 1))
    ws = (World(env_m(1), nat(0)), World(env_m(1), nat(1)))
    assert list(s.solve(Constraints({}, {0: ws}))) == []
