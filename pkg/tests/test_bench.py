import random

import pytest

from demandlog.bench import (
    bench_table, chain, complete, fixture, parse_size, random_graph, run_one, workload,
)
from demandlog.pipeline import solve
from demandlog.transform import is_complement_rule
from helpers import exhaustive_firings


def test_generators():
    assert chain(3) == [("1", "2"), ("2", "3"), ("3", "4")]
    assert chain(0) == []
    assert len(complete(4)) == 12 and ("1", "1") not in complete(4)
    g = random_graph(10, 30, random.Random(5))
    assert len(set(g)) == 30 and all(a != b for a, b in g)
    assert g == random_graph(10, 30, random.Random(5))
    assert sorted(random_graph(3, 6, random.Random(0))) == sorted(complete(3))
    with pytest.raises(ValueError):
        random_graph(3, 7, random.Random(0))


def test_parse_size():
    assert parse_size("chain", "12") == 12
    assert parse_size("random", "10:40") == (10, 40)
    with pytest.raises(ValueError):
        parse_size("random", "10")


def test_workloads_shape():
    w = workload("balbin", "chain", 4)
    assert w["e"] == w["e2"] == chain(4) and w["s"] == [] and w["s2"] == [("5",)]
    w = workload("extended", "complete", 5)
    assert w["e2"] == complete(5) and all(a != "2" and b != "2" for a, b in w["e"])
    with pytest.raises(ValueError):
        workload("nope", "chain", 3)


def test_balbin_chain_firings_are_affine():
    counts = [run_one("balbin", "chain", n)["firings"] for n in (10, 20, 40, 80)]
    slope = (counts[1] - counts[0]) / 10
    for n, c in zip((10, 20, 40, 80), counts):
        assert c == slope * n + (counts[0] - slope * 10)


def test_balbin_chain_firings_match_exhaustive_joins():
    prog, q = fixture("balbin")
    facts = workload("balbin", "chain", 25)
    sol = solve(prog, q, facts)
    assert sol.answers == solve(prog, q, facts, engine="naive").answers
    for r, n in zip(sol.firings.rules, sol.firings.counts):
        want = sol.store.size(r.head.pred) if is_complement_rule(r) else exhaustive_firings(r, sol.store)
        assert n == want


def test_bench_table_deterministic_without_timing():
    a = bench_table("extended", "random", [(12, 30), (0, 0)], seed=2, timing=False)
    assert a == bench_table("extended", "random", [(12, 30), (0, 0)], seed=2, timing=False)
    lines = a.splitlines()
    assert len(lines) == 2 and lines[1].split("\t")[5] == "-"
