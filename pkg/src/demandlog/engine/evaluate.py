"""Semi-naive bottom-up evaluation and its extension for complement predicates."""
from __future__ import annotations

import gc
from contextlib import contextmanager
from dataclasses import dataclass, field

from ..model import COMPLEMENT, DEMAND, GeneratedName, UnknownPredicateError, tuple_matches
from ..transform import is_complement_rule
from . import kernel as _kernel
from .plan import Plan
from .store import FactStore


@dataclass
class FiringCounter:
    ids: list
    rules: list
    counts: list

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, rule_id):
        return self.counts[self.ids.index(rule_id)]

    def by_id(self) -> dict:
        return dict(zip(self.ids, self.counts))


@dataclass
class Step2Record:
    stratum: int            # stratum resolved in this step
    min_pending: int        # lowest stratum among all pending complement demands
    fixpoint: bool          # worklist was empty when the step ran
    resolved: int


@dataclass
class EbuAudit:
    steps: list = field(default_factory=list)
    # (p, args) for which n.p(args) was inferred because p(args) was absent
    inferred_negatives: list = field(default_factory=list)
    # (p, args) for which p(args) was present, so n.p(args) was not inferred
    resolved_positives: list = field(default_factory=list)

    def violations(self, store: FactStore) -> list:
        out = []
        for s in self.steps:
            if s.stratum != s.min_pending:
                out.append(f"step resolved stratum {s.stratum} while stratum {s.min_pending} was pending")
            if not s.fixpoint:
                out.append("step ran before the positive loop reached a fixed point")
        for p, args in self.inferred_negatives:
            if store.contains(p, args):
                out.append(f"{p}{args} inferred after n.{p}{args} was")
        return out


@dataclass
class EvalResult:
    store: FactStore
    firings: FiringCounter
    audit: EbuAudit = None


def _ids(rules):
    ids = getattr(rules, "ids", None)
    return list(ids) if ids is not None else [f"r{i}" for i in range(len(rules))]


@contextmanager
def gc_paused():
    # evaluation allocates only tuples, lists and dicts without cycles; letting
    # the collector rescan the growing store makes large runs superlinear
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def _check_fresh_store(store):
    if store.indexes:
        raise ValueError("store has already been evaluated; use a fresh FactStore")


def bu_evaluate(rules, store: FactStore, excluded=(), kernel=None) -> EvalResult:
    """Least fixed point of the non-excluded rules over ``store``, taking
    facts off the worklist one at a time."""
    _check_fresh_store(store)
    ids, rule_list = _ids(rules), list(rules)
    counts = [0] * len(rule_list)
    plan = Plan(rule_list, store, excluded)
    with gc_paused():
        _kernel.get(kernel).run(plan, counts)
    return EvalResult(store, FiringCounter(ids, rule_list, counts))


class _ComplementRule:
    __slots__ = ("rid", "demand", "pred", "comp", "stratum", "pos_of", "head_of")

    def __init__(self, rid, rule, strata):
        demand, neg = rule.body[0].atom, rule.body[-1].atom
        g = GeneratedName.parse(demand.pred)
        if len(rule.body) != 2 or g is None or g.role != DEMAND:
            raise ValueError(f"complement rule without a demand hypothesis: {rule}")
        if "f" in g.pattern:
            raise ValueError(f"complement demand {demand.pred} is not all-bound; the query flounders")
        first = {}
        for i, t in enumerate(demand.args):
            if t.is_var:
                first.setdefault(t, i)
        self.rid = rid
        self.demand = demand.pred
        self.pred = neg.pred
        self.comp = rule.head.pred
        self.stratum = strata[neg.pred]
        self.pos_of = [(False, first[t]) if t.is_var else (True, t.name) for t in neg.args]
        self.head_of = [(False, first[t]) if t.is_var else (True, t.name) for t in rule.head.args]

    @staticmethod
    def _build(spec, values):
        return tuple(v if is_const else values[v] for is_const, v in spec)

    def target(self, values):
        return self._build(self.pos_of, values)

    def head(self, values):
        return self._build(self.head_of, values)


def ebu_evaluate(rules, store: FactStore, strata, kernel=None) -> EvalResult:
    """Alternate the positive loop (complement rules excluded) with resolving
    every pending complement demand of the lowest stratum, until neither
    produces anything new.

    ``strata`` maps predicates of the original program to stratum numbers.
    """
    _check_fresh_store(store)
    ids, rule_list = _ids(rules), list(rules)
    comps = [_ComplementRule(rid, r, strata) for rid, r in enumerate(rule_list) if is_complement_rule(r)]
    counts = [0] * len(rule_list)
    plan = Plan(rule_list, store, {c.rid for c in comps})
    audit = EbuAudit()
    cursor = {c.demand: 0 for c in comps}
    # stratum per demand predicate, recovered from the demand names alone as
    # an independent check on the stratum chosen below
    name_stratum = {d: strata[_complemented(d)] for d in cursor}
    for c in comps:
        store.declare(c.demand)
        store.declare(c.pred)
        store.declare(c.comp)
    with gc_paused():
        _ebu_loop(plan, store, comps, cursor, name_stratum, counts, audit, _kernel.get(kernel).run)
    return EvalResult(store, FiringCounter(ids, rule_list, counts), audit)


def _ebu_loop(plan, store, comps, cursor, name_stratum, counts, audit, run):
    while True:
        run(plan, counts)
        at_fixpoint = not store.worklist
        pending = [c for c in comps if len(store.lists[c.demand]) > cursor[c.demand]]
        if not pending:
            break
        low = min(c.stratum for c in pending)
        audit_low = min(name_stratum[d] for d, k in cursor.items() if len(store.lists[d]) > k)
        resolved = 0
        for c in pending:
            if c.stratum != low:
                continue
            facts = store.lists[c.demand]
            present = store.sets[c.pred]
            for values in facts[cursor[c.demand]:]:
                target = c.target(values)
                if target in present:
                    audit.resolved_positives.append((c.pred, target))
                else:
                    counts[c.rid] += 1
                    store.add(c.comp, c.head(values))
                    audit.inferred_negatives.append((c.pred, target))
                resolved += 1
            cursor[c.demand] = len(facts)
        audit.steps.append(Step2Record(low, audit_low, at_fixpoint, resolved))


def _complemented(demand_pred: str) -> str:
    g = GeneratedName.parse(demand_pred)
    inner = GeneratedName.parse(g.base)
    assert inner is not None and inner.role == COMPLEMENT, demand_pred
    return inner.base


def answer_query(store: FactStore, query) -> list:
    """Stored facts of the query predicate that match the query, sorted."""
    a = query.atom if hasattr(query, "atom") else query
    if a.pred not in store.sets:
        raise UnknownPredicateError(f"unknown predicate {a.pred}")
    return sorted(v for v in store.sets[a.pred] if len(v) == a.arity and tuple_matches(v, a))
