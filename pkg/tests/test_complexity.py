import pytest

from demandlog.bench import chain, fixture, workload
from demandlog.complexity import (
    CombinationParam, SizeParam, check_bounds, measure, measure_params, rule_bound,
)
from demandlog.engine import FactStore
from demandlog.frontend import parse_program
from demandlog.pipeline import solve
from demandlog.randprog import random_case


def _store(**facts):
    s = FactStore()
    for p, rows in facts.items():
        s.declare(p)
        s.add_given(p, rows)
    return s


def test_measure_parameters():
    s = _store(e=[("1", "2"), ("2", "3"), ("1", "3")], z=[])
    assert measure(s, SizeParam("e")) == 3
    assert measure(s, CombinationParam("e", (2,), (1,))) == 2
    assert measure(s, CombinationParam("e", (1,), (2,))) == 2
    assert measure(s, CombinationParam("e", (), (1,))) == 1
    assert measure(s, CombinationParam("e", (1, 2), ())) == 3
    assert measure(s, SizeParam("z")) == 0
    assert measure(s, CombinationParam("z", (1,), (2,)), arity=2) == 0
    assert measure_params(s, [SizeParam("e")]) == {SizeParam("e"): 3}


def test_measure_out_of_range_position():
    s = _store(e=[("1", "2")])
    with pytest.raises(ValueError):
        measure(s, CombinationParam("e", (3,), (1,)))
    with pytest.raises(ValueError):
        measure(s, CombinationParam("e", (0,), ()))


def test_param_rendering():
    assert str(SizeParam("e")) == "#e"
    assert str(CombinationParam("e", (2,), (1,))) == "#e.2/1"
    assert str(CombinationParam("d_p_bf", (), (1,))) == "#d_p_bf.-/1"


def test_two_hypothesis_bound_expression():
    r = parse_program("p(X,Z) :- e(X,Y), p(Y,Z).").rules[0]
    b = rule_bound(r, "R2")
    assert b.expression == "min(#e * #p.2/1, #p * #e.1/2)"
    assert not b.omittable


def test_bound_counts_constants_as_fixed():
    r = parse_program("r0_i1(X,Y) :- d_p_bb(X,Y), e(X,1).").rules[0]
    assert rule_bound(r).expression == "min(#d_p_bb * #e.-/1,2, #e * #d_p_bb.2/1)"


def test_one_hypothesis_and_complement_bounds():
    r = parse_program("p(X,Y) :- e(X,Y).").rules[0]
    b = rule_bound(r)
    assert b.expression == "#e" and b.omittable
    r = parse_program("n.p(X,Y) :- d_n.p_bb(X,Y), not p(X,Y).", disjoint=False).rules[0]
    b = rule_bound(r)
    assert b.expression == "#d_n.p_bb" and b.omittable


def test_demand_rule_firings_on_chain_equal_edges():
    prog, q = fixture("tc")
    sol = solve(prog, q, workload("tc", "chain", 50))
    report = check_bounds(sol.compiled.rules, sol.store, sol.firings)
    assert report.ok
    demand_rows = [r for r in report.rows if r.bound.rule.head.pred == "d_p_bf"]
    assert demand_rows and all(r.firings == len(chain(50)) for r in demand_rows)
    assert report.cost == report.total_firings + sol.store.given
    assert report.render().splitlines()[0] == "rule\tbound\tvalue\tfirings\tstatus"


def test_every_branch_bounds_firings_on_random_programs():
    for seed in range(100):
        case = random_case(seed)
        sol = solve(case.program, case.query, case.facts)
        report = check_bounds(sol.compiled.rules, sol.store, sol.firings)
        assert report.ok, (seed, report.violations())


def test_violation_is_reported():
    prog, q = fixture("tc")
    sol = solve(prog, q, {"e": [("1", "2"), ("2", "3")]})
    sol.firings.counts[0] += 100
    report = check_bounds(sol.compiled.rules, sol.store, sol.firings)
    assert not report.ok and report.violations()
    assert "FAIL" in report.render()
