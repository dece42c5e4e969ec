from paths import bench
from smyth_forge.core import alpha_equal
from smyth_forge.surface import load_file, load_problem, parse_expression
from smyth_forge.synth import SynthConfig, is_recursive, synthesize

PLUS_FIX = "fix plus (m : Nat) : Nat -> Nat => \\(n : Nat) : Nat => case m of { Z -> n; S m1 -> S (plus m1 n) }"


# [PAPER] the overview sketch synthesizes addition
def test_plus_is_synthesized():
    p = load_file(bench("sketches", "plus.smy"))
    res = synthesize(p, SynthConfig(timeout=30))
    assert res.status == "solved"
    (e,) = res.best.holes.values()
    assert alpha_equal(e, parse_expression(PLUS_FIX, p.sigma))
    assert res.best.recursive


# [TRIVIAL] an assertion that no filling satisfies
def test_unsat_is_refuted():
    res = synthesize(load_file(bench("sketches", "unsat.smy")), SynthConfig(timeout=30))
    assert res.status == "refuted" and res.best is None


def test_closed_program_checks_its_assertions():
    ok = synthesize(load_problem("f : Nat\nf = 1\n\nassert f == 1\n"))
    bad = synthesize(load_problem("f : Nat\nf = 1\n\nassert f == 2\n"))
    assert ok.status == "solved" and bad.status == "refuted"


def test_top_solutions_are_ranked_by_size():
    p = load_problem("f : Nat -> Nat\nf n = ??\n\nassert f 1 == 1\n")
    res = synthesize(p, SynthConfig(top=3, timeout=30))
    sizes = [s.size for s in res.solutions]
    assert res.status == "solved" and sizes == sorted(sizes) and len(sizes) >= 2


def test_recursion_detection():
    p = load_problem("f : Nat -> Nat\nf = ??\n")
    (h,) = p.holes
    rec = parse_expression("fix f (n : Nat) : Nat => case n of { Z -> n; S m -> f m }", p.sigma)
    flat = parse_expression("\\(n : Nat) : Nat => n", p.sigma)
    assert is_recursive(p, {h: rec})
    assert not is_recursive(p, {h: flat})
