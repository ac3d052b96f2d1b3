"""Seeded random stratified programs with non-floundering queries, for
cross-checking evaluators.

Every generated program has at most four intensional predicates on at
most three levels, arity at most three and at most twenty constants.  A
negated hypothesis only names a predicate of a lower level and only uses
variables bound by positive hypotheses to its left, so any query is free
of floundering.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Atom, Literal, Program, Query, Rule, const, var

VARS = [var(v) for v in ("X", "Y", "Z", "W")]


@dataclass
class Case:
    seed: int
    program: Program
    query: Query
    facts: dict


def _term(rng, pool, domain, used=(), p_const=0.05):
    if rng.random() < p_const:
        return const(rng.choice(domain))
    fresh = [t for t in pool if t not in used]
    # repeated variables within one atom are allowed but rare
    if fresh and rng.random() < 0.85:
        return rng.choice(fresh)
    return rng.choice(pool)


def _args(rng, n, pool, domain, p_const=0.05):
    out = []
    for _ in range(n):
        out.append(_term(rng, pool, domain, out, p_const))
    return tuple(out)


def _rule(rng, head_pred, arity, level, preds, domain, base=False):
    """One safe rule for ``head_pred``; ``preds`` maps name -> (arity, level).

    A base rule only uses predicates of lower levels positively."""
    positive = [p for p, (_, lv) in preds.items() if (lv < level if base else lv <= level)]
    negative = [p for p, (_, lv) in preds.items() if lv < level]
    n_pos = rng.choice((1, 1, 2, 2, 2, 3))
    pool = VARS[: rng.randint(1, 4)]
    body, bound = [], []
    for k in range(n_pos):
        p = rng.choice(positive)
        a = preds[p][0]
        args = _args(rng, a, pool, domain)
        body.append(Literal(Atom(p, args)))
        bound.extend(t for t in args if t.is_var and t not in bound)
        if negative and bound and rng.random() < 0.35:
            q = rng.choice(negative)
            nargs = _args(rng, preds[q][0], bound, domain, 0.15)
            body.append(Literal(Atom(q, nargs), negated=True))
    if not bound:
        return None
    head = _args(rng, arity, bound, domain)
    return Rule(Atom(head_pred, head), tuple(body))


def random_case(seed: int) -> Case:
    rng = random.Random(seed)
    domain = [str(i) for i in range(1, rng.choice((4, 5, 6, 8, 20)) + 1)]
    preds = {}
    facts = {}
    for k in range(rng.randint(1, 3)):
        name, a = f"e{k}", rng.randint(1, 3) if k else 2
        preds[name] = (a, 0)
        limit = min(len(domain) ** a, 40 if len(domain) > 8 else 24)
        rows = {tuple(rng.choice(domain) for _ in range(a)) for _ in range(rng.randint(limit // 4, limit))}
        facts[name] = sorted(rows)
    n_idb = rng.randint(1, 4)
    levels = sorted(rng.randint(1, 3) for _ in range(n_idb))
    # compact to consecutive levels starting at 1
    remap = {lv: i + 1 for i, lv in enumerate(sorted(set(levels)))}
    idb = [(f"p{k}", rng.randint(1, 3), remap[lv]) for k, lv in enumerate(levels)]
    for name, a, lv in idb:
        preds[name] = (a, lv)

    rules = []
    for name, a, lv in idb:
        made = 0
        for _ in range(rng.randint(1, 3) + 6):
            if made >= 1 and rng.random() < 0.4 or made == 3:
                break
            r = _rule(rng, name, a, lv, preds, domain, base=not made)
            if r is not None:
                rules.append(r)
                made += 1
        if not made:
            rules.append(Rule(Atom(name, (VARS[0],) * a), (Literal(Atom("e0", (VARS[0], VARS[1]))),)))
    rng.shuffle(rules)

    top = [x for x in idb if x[2] == idb[-1][2]]
    qname, qa, _ = rng.choice(top if rng.random() < 0.7 else idb)
    qpool = VARS[:qa]
    qargs = tuple(const(rng.choice(domain)) if rng.random() < 0.35 else rng.choice(qpool) for _ in range(qa))
    return Case(seed, Program(tuple(rules)), Query(Atom(qname, qargs)), facts)


def corpus(n: int, start: int = 0) -> list:
    return [random_case(s) for s in range(start, start + n)]
