import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import SIGMA, random_instance
from smyth_forge.core import (
    E_UNIT,
    EMPTY_CTX,
    EMPTY_ENV,
    ECtor,
    EHole,
    EVar,
    HoleInfo,
    Program,
    TArr,
    TData,
)
from smyth_forge.evaluation import eval_fueled
from smyth_forge.surface import ElabError, load_problem, parse_expression
from smyth_forge.typecheck import IllTyped, check_exp, check_program, check_result, synth_exp

NAT = TData("Nat")

PLUS_FIX = "fix plus (m : Nat) : Nat -> Nat => \\(n : Nat) : Nat => case m of { Z -> n; S m1 -> S (plus m1 n) }"


# [PAPER] the overview solution has the expected arrow type
def test_plus_solution_types():
    e = parse_expression(PLUS_FIX, SIGMA)
    assert synth_exp({}, SIGMA, EMPTY_CTX, e) == TArr(NAT, TArr(NAT, NAT))


# [DERIVED] S expects a Nat, not unit
def test_successor_of_unit_is_ill_typed():
    with pytest.raises(IllTyped):
        check_exp({}, SIGMA, EMPTY_CTX, ECtor("S", E_UNIT), NAT)


# [DERIVED] evaluating then checking the result agrees
def test_result_of_application_checks():
    e = parse_expression(f"({PLUS_FIX}) 1 0", SIGMA)
    r = eval_fueled(EMPTY_ENV, e, 100)
    check_result({}, SIGMA, r, NAT)


def test_hole_contexts_come_from_annotations():
    p = load_problem("f : Nat -> Nat\nf n = ??\n")
    info = p.delta[0]
    assert info.typ == NAT
    assert "n" in info.ctx.names()


def test_hole_accepts_an_extended_context():
    delta = {0: HoleInfo(EMPTY_CTX.extend("x", NAT), NAT)}
    ctx = EMPTY_CTX.extend("x", NAT).extend("y", NAT)
    assert synth_exp(delta, SIGMA, ctx, EHole(0)) == NAT
    with pytest.raises(IllTyped):
        synth_exp(delta, SIGMA, EMPTY_CTX.extend("y", NAT), EHole(0))


# [TRIVIAL] program typing
def test_program_typing():
    p = load_problem("plus : Nat -> Nat -> Nat\nplus = ??\n\nassert plus 0 1 == 1\n")
    check_program(p.delta, p.sigma, p.program)
    with pytest.raises(ElabError):
        load_problem("f : Nat\nf = 0\n\nassert f == True\n")
    empty = Program(E_UNIT, ())
    check_program({}, SIGMA, empty)


def test_asserts_may_differ_in_type():
    load_problem("f : Nat\nf = 0\n\ng : Bool\ng = True\n\nassert f == 0\nassert g == True\n")


# [PAPER] holes under a user-written case start deeper in the branching budget
def test_user_case_depth_is_recorded():
    p = load_problem("f : Nat -> Nat\nf n =\n  case n of\n    Z -> ??\n    S m -> case m of { Z -> ??; S k -> ?? }\n")
    assert [p.delta[h].match_depth for h in p.holes] == [1, 2, 2]


def test_unannotated_variable_is_unbound():
    with pytest.raises(IllTyped):
        synth_exp({}, SIGMA, EMPTY_CTX, EVar("zz"))


# [DERIVED] preservation on random sketches
@settings(max_examples=300)
@given(st.integers(0, 2**32 - 1))
def test_preservation(seed):
    delta, env, e, t, g = random_instance(random.Random(seed))
    check_exp(delta, SIGMA, g.root_ctx, e, t)
    check_result(delta, SIGMA, eval_fueled(env, e, 400), t)
