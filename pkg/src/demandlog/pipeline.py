"""End-to-end query answering: transform, normalize, decompose, evaluate."""
from __future__ import annotations

from dataclasses import dataclass

from .analysis import check_non_floundering, stratification_of
from .engine import FactStore, answer_query, ebu_evaluate, gc_paused
from .model import (
    DEMAND, GeneratedName, Literal, Program, Query, Rule, UnknownPredicateError, ValidationError,
)
from .oracles import filter_query, naive_stratified_evaluate, tabled_topdown_evaluate
from .transform import DecomposedProgram, decompose_left, extended_demand_transform, normalize_rules

ENGINES = ("ebu", "naive", "td")


@dataclass
class Compiled:
    transformed: object          # TransformOutput, or None for an extensional query
    rules: DecomposedProgram
    strata: object
    seeds: list


@dataclass
class Solution:
    answers: list
    engine: str
    store: FactStore = None
    firings: object = None
    audit: object = None
    compiled: Compiled = None
    log: object = None


def check_facts(program: Program, facts: dict, *, disjoint: bool = True) -> None:
    arities = program.predicates()
    idb = program.intensional()
    for pred, rows in (facts or {}).items():
        for row in rows:
            want = arities.setdefault(pred, len(row))
            if len(row) != want:
                raise ValidationError(f"fact {pred}{tuple(row)} has {len(row)} arguments, {pred} takes {want}")
        if disjoint and rows and pred in idb:
            raise ValidationError(f"given facts for intensional predicate {pred}")


def _check_query(program: Program, query: Query, facts) -> None:
    arities = program.predicates()
    for pred, rows in (facts or {}).items():
        if rows:
            arities.setdefault(pred, len(rows[0]))
    if query.pred not in arities:
        raise UnknownPredicateError(f"unknown predicate {query.pred} in query {query}")
    if arities[query.pred] != query.atom.arity:
        raise ValidationError(f"query {query} uses {query.pred} with {query.atom.arity} arguments, "
                              f"it takes {arities[query.pred]}")


def compile_query(program: Program, query: Query, *, dedup: bool = False) -> Compiled:
    """Extended demand transformation, normalization and decomposition."""
    strata = stratification_of(program)
    if query.pred not in program.intensional():
        return Compiled(None, DecomposedProgram([], [], []), strata, [])
    out = extended_demand_transform(program, query, dedup=dedup)
    rules = decompose_left(normalize_rules(Program(tuple(out.rules))))
    return Compiled(out, rules, strata, [(f.pred, f.values()) for f in out.seed_facts])


def strata_of_transformed(program: Program):
    """Strata of the source program, recovered from a transformed one by
    dropping demand predicates (they alone create cycles through ``n.p``)."""
    def is_demand(pred):
        g = GeneratedName.parse(pred)
        return g is not None and g.role == DEMAND

    rules = []
    for r in program.rules:
        if is_demand(r.head.pred):
            continue
        body = tuple(lit for lit in r.body if not is_demand(lit.atom.pred))
        rules.append(Rule(r.head, body or (Literal(r.head),), r.span))
    return stratification_of(Program(tuple(rules)))


def load_store(program: Program, facts, seeds=()) -> FactStore:
    store = FactStore()
    for pred, rows in program.edb().items():
        store.add_given(pred, rows)
    for pred, rows in (facts or {}).items():
        store.declare(pred)
        store.add_given(pred, rows)
    for pred, values in seeds:
        store.add_given(pred, [values])
    return store


def run_ebu(program: Program, query: Query, facts=None, *, dedup=False, kernel=None) -> Solution:
    compiled = compile_query(program, query, dedup=dedup)
    with gc_paused():
        store = load_store(program, facts, compiled.seeds)
        for pred in program.predicates():
            store.declare(pred)
        result = ebu_evaluate(compiled.rules, store, compiled.strata, kernel=kernel)
    return Solution(answer_query(store, query), "ebu", store, result.firings, result.audit, compiled)


def run_pretransformed(program: Program, query: Query, facts=None, *, kernel=None) -> Solution:
    """Evaluate a program that is already the output of the transformation;
    its seed facts are the given facts of demand predicates."""
    strata = strata_of_transformed(program)
    rules = decompose_left(normalize_rules(Program(program.rules)))
    with gc_paused():
        store = load_store(program, facts)
        for pred in program.predicates():
            store.declare(pred)
        result = ebu_evaluate(rules, store, strata, kernel=kernel)
    compiled = Compiled(None, rules, strata, [])
    return Solution(answer_query(store, query), "ebu", store, result.firings, result.audit, compiled)


def solve(program: Program, query: Query, facts=None, *, engine: str = "ebu",
          dedup: bool = False, kernel=None, pretransformed: bool = False) -> Solution:
    """Answers to ``query`` as a sorted list of argument tuples."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    check_facts(program, facts, disjoint=not pretransformed)
    _check_query(program, query, facts)
    if pretransformed:
        if engine != "ebu":
            raise ValueError("a pretransformed program can only run on the ebu engine")
        return run_pretransformed(program, query, facts, kernel=kernel)
    if engine == "ebu":
        return run_ebu(program, query, facts, dedup=dedup, kernel=kernel)
    stratification_of(program)
    if engine == "naive":
        return Solution(filter_query(naive_stratified_evaluate(program, facts), query), "naive")
    check_non_floundering(program, query)
    answers, log = tabled_topdown_evaluate(program, query, facts)
    return Solution(answers, "td", log=log)


def demand_keys(store: FactStore) -> set:
    """``(pred, pattern, constants)`` for every demand fact in the store."""
    out = set()
    for pred in store.predicates():
        g = GeneratedName.parse(pred)
        if g is None or g.role != DEMAND:
            continue
        for v in store.facts(pred):
            out.add((g.base, g.pattern, v))
    return out
