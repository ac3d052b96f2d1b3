import pytest

from demandlog.analysis import (
    NotStratified, build_dependency_graph, check_non_floundering, compute_demand_patterns,
    floundering_sites, hypothesis_patterns, stratification_of, stratify,
)
from demandlog.bench import fixture
from demandlog.frontend import parse_program, parse_query
from demandlog.model import DemandPattern, FlounderingError, NotStratifiedError


def test_strata_of_extended_example():
    prog, _ = fixture("extended")
    s = stratification_of(prog)
    assert s["p"] == 0 and s["p2"] == 1 and s["e"] == 0
    assert s.is_sound_for(build_dependency_graph(prog))
    assert s.levels() == [0, 1]


def test_strata_are_minimal_across_chains():
    prog = parse_program("""
        a(X) :- e(X).
        b(X) :- e(X), not a(X).
        c(X) :- b(X), not b(X).
        d(X) :- c(X), a(X).
    """)
    s = stratification_of(prog)
    assert (s["a"], s["b"], s["c"], s["d"]) == (0, 1, 2, 2)


def test_not_stratified_reports_a_cycle():
    res = stratify(build_dependency_graph(parse_program("t(X) :- e(X), not t(X).")))
    assert isinstance(res, NotStratified)
    assert res.cycle == ["t", "t"]
    assert str(res) == "t -not-> t"
    prog = parse_program("a(X) :- e(X), not b(X).\nb(X) :- c(X).\nc(X) :- a(X).")
    with pytest.raises(NotStratifiedError) as exc:
        stratification_of(prog)
    assert exc.value.cycle[0] == "a" and exc.value.cycle[-1] == "a"
    assert set(exc.value.cycle) == {"a", "b", "c"}


def test_positive_recursion_is_fine():
    prog = parse_program("p(X,Y) :- e(X,Y).\np(X,Z) :- p(X,Y), p(Y,Z).")
    assert stratification_of(prog)["p"] == 0


def test_hypothesis_patterns_walk_left_to_right():
    prog, _ = fixture("meskes_noack")
    r = prog.rules[2]        # p(X,Z) :- e(X,Y), p(Y,Z), not s(Y).
    got = [(lit.atom.pred, s) for _, lit, s in hypothesis_patterns(r, "bf")]
    assert got == [("e", "bf"), ("p", "bf"), ("s", "b")]


def test_negated_hypotheses_bind_nothing():
    prog = parse_program("p(X) :- e(X), not q(X,Y), f(Y).\nq(X,Y) :- e(X), f(Y).")
    r = prog.rules[0]
    assert [s for _, _, s in hypothesis_patterns(r, "f")] == ["f", "bf", "f"]


def test_demand_patterns():
    prog, q = fixture("tc")
    assert compute_demand_patterns(prog, q) == [DemandPattern("p", "bf")]
    prog, q = fixture("extended")
    assert compute_demand_patterns(prog, q) == [DemandPattern("p2", "bb"), DemandPattern("p", "bb")]
    prog, q = fixture("meskes_noack")
    assert compute_demand_patterns(prog, q) == [DemandPattern("p", "bf"), DemandPattern("s", "b")]


def test_extensional_query_has_no_demand():
    prog, _ = fixture("tc")
    assert compute_demand_patterns(prog, parse_query("e(1,X)?")) == []


def test_repeated_query_variables_collapse_to_free():
    prog, _ = fixture("tc")
    assert compute_demand_patterns(prog, parse_query("p(X,X)?")) == [
        DemandPattern("p", "ff"), DemandPattern("p", "bf")]


def test_floundering_detection():
    prog = parse_program("p(X) :- e(X,Y), not q(Y,Z), f(Z).\nq(X,Y) :- e(X,Y).")
    sites = floundering_sites(prog, parse_query("p(1)?"))
    assert len(sites) == 1 and sites[0].pattern == "bf" and sites[0].index == 1
    with pytest.raises(FlounderingError, match="not q"):
        check_non_floundering(prog, parse_query("p(1)?"))
    prog, _ = fixture("extended")
    with pytest.raises(FlounderingError):
        check_non_floundering(prog, parse_query("p2(1,Z)?"))
    check_non_floundering(prog, parse_query("p2(1,2)?"))
