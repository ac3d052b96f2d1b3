"""Dependency graph, stratification, demand-pattern inference, floundering check."""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .model import DemandPattern, FlounderingError, Literal, NotStratifiedError, Program, Query, Rule


@dataclass
class DependencyGraph:
    nodes: set = field(default_factory=set)
    # (conclusion predicate, hypothesis predicate) -> True when any occurrence is negated
    edges: dict = field(default_factory=dict)

    def successors(self, pred):
        return [q for (p, q) in self.edges if p == pred]


def build_dependency_graph(program: Program) -> DependencyGraph:
    g = DependencyGraph()
    for pred in program.predicates():
        g.nodes.add(pred)
    for r in program.rules:
        p = r.head.pred
        for lit in r.body:
            key = (p, lit.atom.pred)
            g.edges[key] = g.edges.get(key, False) or lit.negated
    return g


@dataclass
class Stratification:
    stratum: dict

    def __getitem__(self, pred):
        return self.stratum.get(pred, 0)

    def levels(self) -> list:
        return sorted(set(self.stratum.values()))

    def is_sound_for(self, graph: DependencyGraph) -> bool:
        for (p, q), neg in graph.edges.items():
            if self[p] < self[q] + (1 if neg else 0):
                return False
        return True


@dataclass
class NotStratified:
    """Result of :func:`stratify` when some cycle passes through a negative edge."""

    cycle: list

    def __str__(self):
        first, *rest = self.cycle
        text = f"{first} -not-> {rest[0]}"
        for pred in rest[1:]:
            text += f" -> {pred}"
        return text


def stratify(graph: DependencyGraph):
    """Minimal strata numbers, or a :class:`NotStratified` carrying one offending cycle."""
    g = nx.DiGraph()
    g.add_nodes_from(graph.nodes)
    g.add_edges_from(graph.edges)
    comp_of = {}
    sccs = list(nx.strongly_connected_components(g))
    for i, comp in enumerate(sccs):
        for pred in comp:
            comp_of[pred] = i
    for (p, q), neg in sorted(graph.edges.items()):
        if neg and comp_of[p] == comp_of[q]:
            sub = g.subgraph(sccs[comp_of[p]])
            path = nx.shortest_path(sub, q, p)
            return NotStratified([p] + path)
    cond = nx.condensation(g, scc=sccs)
    level = [0] * len(sccs)
    # sinks first: a component sits one above every component it negatively depends on
    for c in reversed(list(nx.topological_sort(cond))):
        best = 0
        for pred in sccs[c]:
            for q in g.successors(pred):
                if comp_of[q] == c:
                    continue
                best = max(best, level[comp_of[q]] + (1 if graph.edges[(pred, q)] else 0))
        level[c] = best
    return Stratification({pred: level[comp_of[pred]] for pred in graph.nodes})


def stratification_of(program: Program) -> Stratification:
    result = stratify(build_dependency_graph(program))
    if isinstance(result, NotStratified):
        raise NotStratifiedError(f"program is not stratified: {result}", result.cycle)
    return result


# Demand patterns -----------------------------------------------------------

def hypothesis_patterns(r: Rule, pattern: str):
    """Yield ``(index, literal, pattern)`` for each hypothesis of ``r`` when its
    conclusion is queried with ``pattern``, walking left to right.

    Positive hypotheses bind all their variables; negated ones bind nothing.
    """
    bound = {t for t, c in zip(r.head.args, pattern) if c == "b" and t.is_var}
    for i, lit in enumerate(r.body):
        s = "".join("b" if (not t.is_var or t in bound) else "f" for t in lit.atom.args)
        yield i, lit, s
        if not lit.negated:
            bound.update(t for t in lit.atom.args if t.is_var)


def compute_demand_patterns(program: Program, query: Query) -> list:
    """Least set of ``DemandPattern`` reachable from the query, in discovery order.

    A negated hypothesis on an intensional predicate demands that predicate.
    """
    idb = program.intensional()
    if query.pred not in idb:
        return []
    seed = DemandPattern(query.pred, query.pattern())
    found = {seed: None}
    todo = [seed]
    while todo:
        dp = todo.pop(0)
        for r in program.rules:
            if r.head.pred != dp.pred:
                continue
            for _, lit, s in hypothesis_patterns(r, dp.pattern):
                if lit.atom.pred in idb:
                    new = DemandPattern(lit.atom.pred, s)
                    if new not in found:
                        found[new] = None
                        todo.append(new)
    return list(found)


@dataclass(frozen=True)
class FlounderSite:
    rule: Rule
    index: int
    pattern: str

    def __str__(self):
        where = f"{self.rule.span}: " if self.rule.span is not None else ""
        return f"{where}hypothesis 'not {self.rule.body[self.index].atom}' in rule {self.rule} reached with pattern {self.pattern}"


def floundering_sites(program: Program, query: Query) -> list:
    """Negated hypotheses that some demanded rule reaches with a free argument."""
    sites = []
    seen = set()
    for dp in compute_demand_patterns(program, query):
        for r in program.rules:
            if r.head.pred != dp.pred:
                continue
            for i, lit, s in hypothesis_patterns(r, dp.pattern):
                if lit.negated and "f" in s:
                    site = FlounderSite(r, i, s)
                    if site not in seen:
                        seen.add(site)
                        sites.append(site)
    return sites


def check_non_floundering(program: Program, query: Query) -> None:
    sites = floundering_sites(program, query)
    if sites:
        raise FlounderingError(
            f"query {query} flounders: " + "; ".join(map(str, sites)), sites)
