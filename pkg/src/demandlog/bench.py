"""Benchmark workloads: graph generators, fixture programs, timed runs.

Graphs use nodes ``1..n`` rendered as strings.  Random graphs draw ``m``
distinct non-loop edges uniformly without replacement from
``random.Random(seed)``.
"""
from __future__ import annotations

import random
import time
from importlib import resources

from .frontend import parse_program, parse_query
from .pipeline import solve

FIXTURES = {
    "tc": "p(1,X)?",
    "extended": "p2(1,2)?",
    "balbin": "r2(1)?",
    "meskes_noack": "p(1,Y)?",
}

FAMILIES = ("chain", "random", "complete")


def fixture(name: str):
    """``(program, query)`` of a bundled example program."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("demandlog").joinpath("programs", f"{name}.dl").read_text(encoding="utf-8")
    return parse_program(text, f"{name}.dl"), parse_query(FIXTURES[name])


def _edges(pairs):
    return [(str(a), str(b)) for a, b in pairs]


def chain(n: int) -> list:
    """``n`` edges ``1->2->...->n+1``."""
    return _edges((i, i + 1) for i in range(1, n + 1))


def complete(k: int) -> list:
    return _edges((i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j)


def random_graph(n: int, m: int, rng: random.Random) -> list:
    total = n * (n - 1)
    if m > total:
        raise ValueError(f"{m} edges do not fit in {n} nodes without loops")
    out = []
    for x in rng.sample(range(total), m):
        i, j = divmod(x, n - 1)
        out.append((i + 1, j + 1 if j < i else j + 2))
    return _edges(out)


def graph(family: str, size, seed: int = 0) -> list:
    if family == "chain":
        return chain(size)
    if family == "complete":
        return complete(size)
    if family == "random":
        n, m = size
        return random_graph(n, m, random.Random(seed))
    raise ValueError(f"unknown graph family {family!r}")


def nodes_of(family: str, size) -> int:
    return {"chain": lambda s: s + 1, "complete": lambda s: s, "random": lambda s: s[0]}[family](size)


def workload(program: str, family: str, size, seed: int = 0) -> dict:
    """Given facts for a fixture program over a generated graph."""
    g = graph(family, size, seed)
    n = nodes_of(family, size)
    if program == "tc":
        return {"e": g}
    if program == "balbin":
        return {"e": g, "e2": list(g), "s": [], "s2": [(str(n),)]}
    if program == "extended":
        if family == "random":
            # a sparse second graph, so most p facts are absent and n.p is exercised
            e = random_graph(n, max(n // 2, 0), random.Random(seed + 1)) if n > 1 else []
        else:
            # a path that never reaches node 2, so every demanded n.p(x,2) holds
            e = _edges((i, i + 1) for i in range(3, n))
        return {"e": e, "e2": g}
    if program == "meskes_noack":
        return {"e": g, "q": [], "r": []}
    raise ValueError(f"no workload for program {program!r}")


def default_program(family: str) -> str:
    return "balbin" if family == "chain" else "extended"


def parse_size(family: str, text: str):
    if family == "random":
        n, _, m = text.partition(":")
        if not m:
            raise ValueError(f"random sizes are NODES:EDGES, got {text!r}")
        return int(n), int(m)
    return int(text)


def _is_empty(family, size):
    return (size[1] if family == "random" else size) <= 0


def run_one(program: str, family: str, size, seed: int = 0, kernel=None) -> dict:
    prog, query = fixture(program)
    facts = workload(program, family, size, seed)
    t0 = time.perf_counter()
    sol = solve(prog, query, facts, kernel=kernel)
    seconds = time.perf_counter() - t0
    return {
        "nodes": nodes_of(family, size),
        "edges": len(facts.get("e2", facts.get("e", []))),
        "seconds": seconds,
        "firings": sol.firings.total,
        "given": sol.store.given,
        "answers": len(sol.answers),
        "sizes": sol.store.sizes(),
    }


HEADER = ("program", "family", "size", "nodes", "edges", "seconds", "firings", "given", "answers", "sizes")


def bench_table(program: str, family: str, sizes, seed: int = 0, timing: bool = True, kernel=None) -> str:
    """TSV with one row per non-empty size."""
    lines = ["\t".join(HEADER)]
    for size in sizes:
        if _is_empty(family, size):
            continue
        row = run_one(program, family, size, seed, kernel)
        label = f"{size[0]}:{size[1]}" if family == "random" else str(size)
        sizes_col = ";".join(f"{p}={n}" for p, n in sorted(row["sizes"].items()))
        seconds = f"{row['seconds']:.4f}" if timing else "-"
        lines.append("\t".join(map(str, (program, family, label, row["nodes"], row["edges"], seconds,
                                         row["firings"], row["given"], row["answers"], sizes_col))))
    return "".join(line + "\n" for line in lines)
