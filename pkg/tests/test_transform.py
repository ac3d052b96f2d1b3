import pytest

from demandlog.analysis import compute_demand_patterns
from demandlog.bench import FIXTURES, fixture
from demandlog.frontend import parse_program, parse_query, render_program
from demandlog.model import ValidationError
from demandlog.transform import (
    decompose_left, demand_transform, extend_for_negation, extended_demand_transform,
    is_complement_rule, normalize_rules,
)
from helpers import alpha_key, golden, read_listing


def _check_listing(output, expected):
    got = read_listing(output.render())
    assert [alpha_key(c) for c, _ in got] == [alpha_key(c) for c, _ in expected]
    assert [label for _, label in got] == [label for _, label in expected]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_golden_listing(name):
    prog, q = fixture(name)
    _check_listing(extended_demand_transform(prog, q), golden(name))


def test_plain_transform_keeps_negation():
    prog, q = fixture("extended")
    out = demand_transform(prog, q, compute_demand_patterns(prog, q))
    _check_listing(out, golden("extended_plain_dt"))


def test_dedup_drops_alpha_equivalent_rules():
    prog, q = fixture("extended")
    full = extended_demand_transform(prog, q)
    dedup = extended_demand_transform(prog, q, dedup=True)
    assert len(full.rules) == 10 and len(dedup.rules) == 9
    keys = [alpha_key(str(r)) for r in dedup.rules]
    assert len(set(keys)) == len(keys)


def test_first_hypothesis_gets_no_demand_rule():
    # the head's own demand already covers h0
    prog = parse_program("p(X) :- e(X).\nq(X) :- p(X), p(X).")
    out = extended_demand_transform(prog, parse_query("q(1)?"))
    heads = [str(r.head) for r in out.rules]
    assert heads.count("d_p_b(X)") == 2


def test_extension_step():
    prog, _ = fixture("balbin")
    ext = extend_for_negation(prog)
    assert str(ext.rules[3]) == "r2(X) :- n.r(X), e2(X,Y), r2(Y)."
    assert str(ext.rules[4]) == "n.r(A1) :- not r(A1)."
    assert is_complement_rule(ext.rules[4])
    assert not any(is_complement_rule(r) for r in ext.rules[:4])


def test_extension_is_identity_without_negation():
    prog, _ = fixture("tc")
    assert extend_for_negation(prog).rules == prog.rules


def test_generated_name_collision_is_rejected():
    prog = parse_program("p(X) :- e(X), not q(X).\nq(X) :- f(X).\nn.q(X) :- f(X).")
    with pytest.raises(ValidationError, match="collides"):
        extended_demand_transform(prog, parse_query("p(1)?"))


def test_transformed_program_reparses():
    for name in FIXTURES:
        prog, q = fixture(name)
        out = extended_demand_transform(prog, q)
        back = parse_program(out.render(), disjoint=False)
        assert back.rules == tuple(out.rules)
        assert list(back.facts) == list(out.seed_facts)


def test_normalize_equality_and_projection():
    prog = parse_program("h(X) :- e(X,X,Y), f(Y,Z).")
    norm = normalize_rules(prog)
    assert [str(r) for r in norm.rules] == [
        "h(X) :- e_eq1(X,Y), f_proj1(Y).",
        "e_eq1(A1,A3) :- e(A1,A1,A3).",
        "f_proj1(A1) :- f(A1,A2).",
    ]


def test_normalize_shares_definitions():
    prog = parse_program("h(X) :- e(X,Y).\ng(X) :- e(X,Z), f(X).")
    norm = normalize_rules(prog)
    assert sum(1 for r in norm.rules if r.head.pred == "e_proj1") == 1
    assert str(norm.rules[1]) == "g(X) :- e_proj1(X), f(X)."


def test_normalize_skips_negated_hypotheses():
    prog = parse_program("h(X) :- e(X), not q(X,X).")
    assert normalize_rules(prog).rules == prog.rules


def test_decompose_left_most():
    prog = parse_program("p2(X,Z) :- d(X,Z), n.p(X,Z), e2(X,Y), p2(Y,Z).", disjoint=False)
    dec = decompose_left(prog)
    assert [str(r) for r in dec.rules] == [
        "r0_i1(X,Z) :- d(X,Z), n.p(X,Z).",
        "r0_i2(X,Z,Y) :- r0_i1(X,Z), e2(X,Y).",
        "p2(X,Z) :- r0_i2(X,Z,Y), p2(Y,Z).",
    ]
    assert dec.ids == ["r0.1", "r0.2", "r0.3"]
    assert dec.sources == [0, 0, 0]
    assert dec.intermediates == {"r0_i1", "r0_i2"}


def test_decompose_drops_dead_variables():
    prog = parse_program("h(X) :- a(X,Y), b(Y,Z), c(X).")
    dec = decompose_left(prog)
    assert str(dec.rules[0]) == "r0_i1(X) :- a(X,Y), b(Y,Z)."


def test_decompose_rejects_stray_negation():
    prog = parse_program("h(X) :- a(X), not b(X).")
    with pytest.raises(ValueError):
        decompose_left(prog)


def test_decompose_output_has_at_most_two_hypotheses():
    for name in FIXTURES:
        prog, q = fixture(name)
        dec = decompose_left(normalize_rules(extended_demand_transform(prog, q).as_program()))
        assert all(len(r.body) <= 2 for r in dec.rules)
        assert render_program(dec_program(dec))


def dec_program(dec):
    from demandlog.model import Program
    return Program(tuple(dec.rules))
