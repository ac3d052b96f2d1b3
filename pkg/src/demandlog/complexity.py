"""Complexity parameters measured on a final store, and per-rule firing bounds.

Positions in parameter descriptors are 1-based, as in ``#e.2/1``: the most
second arguments that facts of ``e`` take for any one first argument.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .transform import is_complement_rule


@dataclass(frozen=True)
class SizeParam:
    pred: str

    def __str__(self):
        return f"#{self.pred}"


@dataclass(frozen=True)
class CombinationParam:
    pred: str
    counted: tuple      # i positions, 1-based
    given: tuple        # j positions, 1-based

    def __str__(self):
        i = ",".join(map(str, self.counted))
        j = ",".join(map(str, self.given))
        i = i or "-"
        return f"#{self.pred}.{i}/{j}" if j else f"#{self.pred}.{i}"


def _check_positions(param, arity):
    for k in param.counted + param.given:
        if not 1 <= k <= arity:
            raise ValueError(f"position {k} out of range for {param.pred}/{arity}")


def measure(store, param, arity=None) -> int:
    facts = store.facts(param.pred)
    if isinstance(param, SizeParam):
        return len(facts)
    if arity is None and facts:
        arity = len(facts[0])
    if arity is not None:
        _check_positions(param, arity)
    if not facts:
        return 0
    ci = [k - 1 for k in param.counted]
    cj = [k - 1 for k in param.given]
    groups = {}
    for v in facts:
        groups.setdefault(tuple(v[k] for k in cj), set()).add(tuple(v[k] for k in ci))
    return max(len(s) for s in groups.values())


def measure_params(store, requests, arities=None) -> dict:
    """Exact value of each requested parameter, by grouping the stored facts."""
    arities = arities or {}
    return {p: measure(store, p, arities.get(p.pred)) for p in requests}


@dataclass
class RuleBound:
    rule_id: str
    rule: object
    # each branch is a (size, combination-or-None) product; the bound is their minimum
    branches: list
    omittable: bool = False
    values: list = field(default_factory=list)

    @property
    def expression(self) -> str:
        parts = [str(s) if c is None else f"{s} * {c}" for s, c in self.branches]
        return parts[0] if len(parts) == 1 else f"min({', '.join(parts)})"

    @property
    def value(self):
        return min(self.values) if self.values else None

    def evaluate(self, store, cache=None) -> int:
        cache = {} if cache is None else cache

        def get(p):
            if p not in cache:
                cache[p] = measure(store, p)
            return cache[p]

        self.values = [get(s) * (1 if c is None else get(c)) for s, c in self.branches]
        return self.value


def _fixed_positions(other, own):
    """1-based positions of ``other`` fixed once a fact of ``own`` is chosen."""
    own_vars = {t for t in own.args if t.is_var}
    return tuple(k + 1 for k, t in enumerate(other.args) if not t.is_var or t in own_vars)


def rule_bound(rule, rule_id="") -> RuleBound:
    """Symbolic firing bound of a rule with at most two hypotheses."""
    if is_complement_rule(rule):
        # one membership test per demand fact
        return RuleBound(rule_id, rule, [(SizeParam(rule.body[0].atom.pred), None)], omittable=True)
    body = [lit.atom for lit in rule.body]
    if len(body) == 1:
        return RuleBound(rule_id, rule, [(SizeParam(body[0].pred), None)], omittable=True)
    if len(body) != 2 or any(lit.negated for lit in rule.body):
        raise ValueError(f"bound needs a decomposed positive rule: {rule}")
    q, r = body
    branches = []
    for own, other in ((q, r), (r, q)):
        fixed = _fixed_positions(other, own)
        rest = tuple(k for k in range(1, other.arity + 1) if k not in fixed)
        branches.append((SizeParam(own.pred), CombinationParam(other.pred, rest, fixed)))
    return RuleBound(rule_id, rule, branches)


@dataclass
class BoundRow:
    bound: RuleBound
    firings: int

    @property
    def ok(self) -> bool:
        return self.firings <= self.bound.value

    @property
    def branches_ok(self) -> bool:
        return all(self.firings <= v for v in self.bound.values)


@dataclass
class BoundsReport:
    rows: list
    given: int

    @property
    def total_firings(self) -> int:
        return sum(r.firings for r in self.rows)

    @property
    def cost(self) -> int:
        """Firings plus given facts read: the measured time."""
        return self.total_firings + self.given

    @property
    def ok(self) -> bool:
        return all(r.ok and r.branches_ok for r in self.rows)

    def violations(self) -> list:
        out = []
        for r in self.rows:
            if not r.ok:
                out.append(f"{r.bound.rule_id}: {r.firings} firings > bound {r.bound.value}")
            elif not r.branches_ok:
                out.append(f"{r.bound.rule_id}: {r.firings} firings exceed a branch of {r.bound.values}")
        return out

    def render(self) -> str:
        lines = ["rule\tbound\tvalue\tfirings\tstatus"]
        for r in self.rows:
            status = "ok" if r.ok and r.branches_ok else "FAIL"
            if r.bound.omittable:
                status += " (omittable)"
            lines.append(f"{r.bound.rule_id}\t{r.bound.expression}\t{r.bound.value}\t{r.firings}\t{status}")
        lines.append(f"total\t\t\t{self.total_firings}\tgiven={self.given} cost={self.cost}")
        return "".join(line + "\n" for line in lines)


def check_bounds(rules, store, firings) -> BoundsReport:
    """Compare each rule's measured firings with its bound on the final store."""
    cache = {}
    rows = []
    for rid, r, n in zip(firings.ids, list(rules), firings.counts):
        b = rule_bound(r, rid)
        b.evaluate(store, cache)
        rows.append(BoundRow(b, n))
    return BoundsReport(rows, store.given)
