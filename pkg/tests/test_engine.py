import pytest

from demandlog.bench import fixture
from demandlog.engine import FactStore, answer_query, bu_evaluate, ebu_evaluate
from demandlog.engine.kernel import KERNELS, get
from demandlog.frontend import parse_program, parse_query
from demandlog.model import Program, UnknownPredicateError
from demandlog.pipeline import compile_query, demand_keys, load_store, solve
from demandlog.randprog import random_case
from demandlog.transform import decompose_left, is_complement_rule, normalize_rules
from helpers import exhaustive_firings

KERNEL_NAMES = sorted(KERNELS)

TC_DT = parse_program("""
    p(X,Y) :- d_p_bf(X), e(X,Y).
    p(X,Z) :- d_p_bf(X), e(X,Y), p(Y,Z).
    d_p_bf(Y) :- d_p_bf(X), e(X,Y).
""")


def _store(**facts):
    s = FactStore()
    for pred, rows in facts.items():
        s.declare(pred)
        s.add_given(pred, rows)
    return s


def test_store_set_semantics():
    s = FactStore()
    assert s.add("e", ("1", "2"))
    assert not s.add("e", ["1", "2"])
    assert s.size("e") == 1 and ("e", ("1", "2")) in s
    assert s.add_given("e", [("1", "2"), ("2", "3"), ("2", "3")]) == 1
    assert s.given == 1
    assert s.facts("nothing") == [] and s.size("nothing") == 0


def test_index_backfills_processed_facts_only():
    s = _store(e=[("1", "2"), ("1", "3"), ("2", "3")])
    s.worklist.popleft()
    idx = s.index("e", (0,))
    assert idx == {"1": [("1", "2")]}
    assert s.index_consistent()
    s.worklist.clear()
    assert not s.index_consistent()


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_bu_running_example(kernel):
    s = _store(d_p_bf=[("1",)], e=[("1", "2"), ("2", "3")])
    res = bu_evaluate(decompose_left(TC_DT), s, kernel=kernel)
    assert set(s.facts("p")) == {("1", "2"), ("1", "3"), ("2", "3")}
    assert set(s.facts("d_p_bf")) == {("1",), ("2",), ("3",)}
    assert s.index_consistent() and not s.worklist
    assert res.firings.total == sum(exhaustive_firings(r, s) for r in res.firings.rules)


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_bu_empty_rules(kernel):
    s = _store(e=[("1", "2")])
    res = bu_evaluate([], s, kernel=kernel)
    assert res.firings.total == 0 and s.sizes() == {"e": 1}


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_duplicate_given_fact_fires_once(kernel):
    s = FactStore()
    s.add_given("b", [("1",), ("1",)])
    res = bu_evaluate(parse_program("a(X) :- b(X).").rules, s, kernel=kernel)
    assert s.facts("a") == [("1",)] and res.firings.total == 1


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_self_join_counts_each_combination_once(kernel):
    rules = parse_program("p(X,Z) :- e(X,Y), e(Y,Z).\nq(X) :- f(X), f(X).").rules
    s = _store(e=[("1", "2"), ("2", "1"), ("2", "2")], f=[("1",), ("2",)])
    res = bu_evaluate(rules, s, kernel=kernel)
    assert res.firings.counts == [exhaustive_firings(rules[0], s), exhaustive_firings(rules[1], s)]
    assert res.firings.counts == [5, 2]


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_constants_and_repeated_variables_in_hypotheses(kernel):
    rules = parse_program("a(Y) :- e(1,Y).\nb(X) :- e(X,X).\nc(X,Z) :- e(X,Y), g(Y,Y,Z).\nd(k) :- e(X,2).").rules
    s = _store(e=[("1", "2"), ("2", "2"), ("1", "1")], g=[("2", "2", "7"), ("2", "3", "8"), ("1", "1", "9")])
    res = bu_evaluate(rules, s, kernel=kernel)
    assert set(s.facts("a")) == {("2",), ("1",)}
    assert set(s.facts("b")) == {("2",), ("1",)}
    assert set(s.facts("c")) == {("1", "7"), ("2", "7"), ("1", "9")}
    assert s.facts("d") == [("k",)]
    assert res.firings.counts == [exhaustive_firings(r, s) for r in rules]


def test_bu_requires_a_fresh_store():
    s = _store(e=[("1", "2")])
    rules = parse_program("p(X) :- e(X,Y), e(Y,X).").rules
    bu_evaluate(rules, s)
    with pytest.raises(ValueError, match="fresh"):
        bu_evaluate(rules, s)


def test_rules_with_negation_or_three_hypotheses_are_refused():
    with pytest.raises(ValueError):
        bu_evaluate(parse_program("a(X) :- b(X), c(X), d(X).").rules, FactStore())
    with pytest.raises(ValueError):
        bu_evaluate(parse_program("a(X) :- b(X), not c(X).").rules, FactStore())


def _ebu(name, facts, query=None, kernel=None):
    prog, q = fixture(name)
    q = parse_query(query) if query else q
    return solve(prog, q, facts, kernel=kernel)


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_ebu_extended_positive_blocks_complement(kernel):
    sol = _ebu("extended", {"e": [("1", "2")], "e2": [("1", "2")]}, kernel=kernel)
    s = sol.store
    assert ("1", "2") in s.sets["d_p_bb"] and ("1", "2") in s.sets["p"]
    assert not s.facts("n.p")
    assert sol.answers == []
    assert sol.audit.resolved_positives == [("p", ("1", "2"))]


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_ebu_extended_complement_inferred(kernel):
    sol = _ebu("extended", {"e": [], "e2": [("1", "2")]}, kernel=kernel)
    assert ("1", "2") in sol.store.sets["n.p"]
    assert sol.answers == [("1", "2")]


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_ebu_balbin(kernel):
    facts = {"s": [], "s2": [("3",)], "e": [], "e2": [("1", "2"), ("2", "3")]}
    sol = _ebu("balbin", facts, kernel=kernel)
    assert sol.answers == [("1",)]
    assert set(sol.store.facts("n.r")) == {("1",), ("2",), ("3",)}
    # demand for r2 arrives one node at a time, each waiting on n.r
    assert len(sol.audit.steps) == 3
    assert sol.audit.violations(sol.store) == []


def test_ebu_audit_flags_a_late_positive():
    sol = _ebu("balbin", {"s": [], "s2": [("2",)], "e": [], "e2": [("1", "2")]})
    sol.store.add("r", ("1",))
    assert any("inferred after" in v for v in sol.audit.violations(sol.store))


def test_ebu_counts_one_firing_per_inferred_complement():
    sol = _ebu("balbin", {"s": [("2",)], "s2": [("3",)], "e": [("1", "2")], "e2": [("1", "3"), ("1", "2")]})
    comp = [i for i, r in enumerate(sol.firings.rules) if is_complement_rule(r)]
    assert sum(sol.firings.counts[i] for i in comp) == sol.store.size("n.r")


def test_ebu_refuses_free_complement_demand():
    rules = decompose_left(parse_program("n.p(A) :- d_n.p_f(A), not p(A).\np(X) :- e(X).", disjoint=False))
    with pytest.raises(ValueError, match="flounders"):
        ebu_evaluate(rules, FactStore(), {"p": 0})


def test_answer_query():
    s = _store(p=[("1", "2"), ("1", "3"), ("2", "3")])
    assert answer_query(s, parse_query("p(1,X)?")) == [("1", "2"), ("1", "3")]
    assert answer_query(_store(p=[]), parse_query("p(1,X)?")) == []
    with pytest.raises(UnknownPredicateError):
        answer_query(s, parse_query("q(1)?"))


def test_answer_query_on_running_example():
    assert _ebu("tc", {"e": [("1", "2"), ("2", "3")]}).answers == [("1", "2"), ("1", "3")]


def test_demand_restriction():
    """Every inferred fact of a demanded predicate has its demand fact."""
    for seed in range(60):
        case = random_case(seed)
        sol = solve(case.program, case.query, case.facts)
        demanded = {}
        for pred, pattern, values in demand_keys(sol.store):
            demanded.setdefault((pred, pattern), set()).add(values)
        for (pred, pattern), keys in demanded.items():
            if pred.startswith("n."):
                continue
            for v in sol.store.facts(pred):
                bound = tuple(x for x, c in zip(v, pattern) if c == "b")
                if bound in keys:
                    break
            else:
                assert not sol.store.facts(pred) or len(demanded) > 1, (seed, pred)
        idb = case.program.intensional()
        for pred in idb:
            pats = [(p, s) for (p, s) in demanded if p == pred]
            for v in sol.store.facts(pred):
                assert any(tuple(x for x, c in zip(v, s) if c == "b") in demanded[(p, s)]
                           for p, s in pats), (seed, pred, v)


@pytest.mark.skipif("compiled" not in KERNELS, reason="compiled kernel not built")
def test_kernels_agree_on_random_programs():
    for seed in range(150):
        case = random_case(seed)
        a = solve(case.program, case.query, case.facts, kernel="python")
        b = solve(case.program, case.query, case.facts, kernel="compiled")
        assert a.answers == b.answers
        assert a.firings.counts == b.firings.counts
        assert a.store.sizes() == b.store.sizes()


def test_firings_equal_exhaustive_join_counts():
    for seed in range(80):
        case = random_case(seed)
        sol = solve(case.program, case.query, case.facts)
        for rid, r, n in zip(sol.firings.ids, sol.firings.rules, sol.firings.counts):
            if is_complement_rule(r):
                assert n == sol.store.size(r.head.pred)
            else:
                assert n == exhaustive_firings(r, sol.store), (seed, rid, str(r))
        assert sol.store.index_consistent()


def test_kernel_selection():
    assert get("python").NAME == "python"
    assert get(None) is get("auto")
    with pytest.raises(ValueError):
        get("fortran")


def test_extensional_query_needs_no_rules():
    prog, _ = fixture("tc")
    sol = solve(prog, parse_query("e(1,X)?"), {"e": [("1", "2"), ("2", "3")]})
    assert sol.answers == [("1", "2")] and sol.firings.total == 0


def test_compiled_pipeline_shape():
    prog, q = fixture("extended")
    c = compile_query(prog, q)
    assert all(len(r.body) <= 2 for r in c.rules)
    s = load_store(prog, {"e": [("1", "2")]}, c.seeds)
    assert s.given == 2 and ("1", "2") in s.sets["d_p2_bb"]
    assert Program(tuple(normalize_rules(c.transformed.as_program()).rules))
