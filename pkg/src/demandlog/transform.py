"""Rule rewrites: demand transformation, its extension to stratified negation,
normalization, and left-most two-hypothesis decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import check_non_floundering, compute_demand_patterns, hypothesis_patterns, stratification_of
from .model import (
    COMPLEMENT, EQUALITY, INTERMEDIATE, PROJECTION,
    Atom, GeneratedName, Literal, Program, Query, Rule, ValidationError,
    bound_args, complement_name, demand_name, var,
)

# origin labels for rules of an extended program
ORIGINAL, REWRITTEN, ADDED = "Step 3", "Steps 1,3", "Steps 2,3"


@dataclass(frozen=True)
class Provenance:
    source: int          # index of the rule in the transformed program's input
    step: str            # "DT Step 1" / "DT Step 2" / "DT Step 3"
    origin: str = ""     # extension steps that produced the source rule

    @property
    def label(self) -> str:
        return f"({self.origin}, {self.step})" if self.origin else f"({self.step})"


@dataclass
class TransformOutput:
    rules: list
    seed_facts: list
    provenance: list     # parallel to rules
    seed_provenance: Provenance = None

    @property
    def step1_count(self) -> int:
        return sum(1 for p in self.provenance if p.step == "DT Step 1")

    def as_program(self) -> Program:
        return Program(tuple(self.rules), tuple(self.seed_facts))

    def listing(self) -> list:
        """``(text, provenance)`` lines: Step-1 rules, seed fact, Step-3 rules."""
        k = self.step1_count
        lines = [(str(r), p) for r, p in zip(self.rules[:k], self.provenance[:k])]
        lines += [(f"{f}.", self.seed_provenance) for f in self.seed_facts]
        lines += [(str(r), p) for r, p in zip(self.rules[k:], self.provenance[k:])]
        return lines

    def render(self, provenance: bool = True) -> str:
        out = []
        lines = self.listing()
        width = max((len(t) for t, _ in lines), default=0)
        for text, prov in lines:
            if provenance and prov is not None:
                out.append(f"{text.ljust(width)}  % {prov.label}")
            else:
                out.append(text)
        return "".join(line + "\n" for line in out)


def canonical_rule(r: Rule) -> tuple:
    """Rule shape with variables renamed by first occurrence (alpha-equivalence key)."""
    names = {}

    def term(t):
        if t.is_var:
            return ("v", names.setdefault(t.name, len(names)))
        return ("c", t.name)

    def at(a):
        return (a.pred, tuple(term(t) for t in a.args))

    head = at(r.head)
    body = tuple((lit.negated, at(lit.atom)) for lit in r.body)
    return head, body


def _check_fresh(name: str, taken, what: str):
    if name in taken:
        raise ValidationError(f"generated {what} predicate {name} collides with a program predicate")


def demand_transform(program: Program, query: Query, demand, *, dedup: bool = False,
                     origins=None) -> TransformOutput:
    """Restrict rules by demand predicates, seed the query's demand, and
    propagate demand left to right through each restricted rule.

    A negated hypothesis on an intensional predicate propagates demand to
    that predicate; the hypothesis itself stays negated.
    """
    idb = program.intensional()
    taken = set(program.predicates())
    for dp in demand:
        if dp.pred not in idb:
            raise ValueError(f"demand pattern {dp} for non-intensional predicate")
        _check_fresh(demand_name(dp.pred, dp.pattern), taken, "demand")
    origins = origins or [""] * len(program.rules)

    step1 = []   # (restricted rule, source index, pattern)
    for idx, r in enumerate(program.rules):
        for dp in demand:
            if dp.pred != r.head.pred:
                continue
            h0 = Atom(demand_name(dp.pred, dp.pattern), bound_args(r.head, dp.pattern))
            step1.append((Rule(r.head, (Literal(h0),) + r.body, r.span), idx, dp.pattern))

    qpat = query.pattern()
    seed_name = demand_name(query.pred, qpat)
    _check_fresh(seed_name, taken, "demand")
    seed = Atom(seed_name, bound_args(query.atom, qpat))

    step3 = []
    for restricted, idx, pattern in step1:
        for i, lit, s in hypothesis_patterns(program.rules[idx], pattern):
            if lit.atom.pred not in idb:
                continue
            head = Atom(demand_name(lit.atom.pred, s), bound_args(lit.atom, s))
            step3.append((Rule(head, restricted.body[: i + 1], restricted.span), idx))

    rules, prov = [], []
    seen = set()
    for r, idx, _ in step1:
        _emit(r, Provenance(idx, "DT Step 1", origins[idx]), rules, prov, seen, dedup)
    for r, idx in step3:
        _emit(r, Provenance(idx, "DT Step 3", origins[idx]), rules, prov, seen, dedup)
    seed_origin = ORIGINAL if any(origins) else ""
    return TransformOutput(rules, [seed], prov, Provenance(-1, "DT Step 2", seed_origin))


def _emit(r, p, rules, prov, seen, dedup):
    if dedup:
        key = canonical_rule(r)
        if key in seen:
            return
        seen.add(key)
    rules.append(r)
    prov.append(p)


def _extend(program: Program):
    taken = set(program.predicates())
    complemented = {}
    rules, origins = [], []
    for r in program.rules:
        if not any(lit.negated for lit in r.body):
            rules.append(r)
            origins.append(ORIGINAL)
            continue
        body = []
        for lit in r.body:
            if lit.negated:
                name = complement_name(lit.atom.pred)
                _check_fresh(name, taken, "complement")
                complemented.setdefault(lit.atom.pred, lit.atom.arity)
                body.append(Literal(Atom(name, lit.atom.args)))
            else:
                body.append(lit)
        rules.append(Rule(r.head, tuple(body), r.span))
        origins.append(REWRITTEN)
    for pred, arity in complemented.items():
        args = tuple(var(f"A{i + 1}") for i in range(arity))
        rules.append(Rule(Atom(complement_name(pred), args), (Literal(Atom(pred, args), True),)))
        origins.append(ADDED)
    return Program(tuple(rules), program.facts), origins


def extend_for_negation(program: Program) -> Program:
    """Replace ``not p(args)`` by ``n.p(args)`` and define each ``n.p`` once
    by ``n.p(A1,...,Ak) :- not p(A1,...,Ak)``."""
    return _extend(program)[0]


def extended_demand_transform(program: Program, query: Query, *, dedup: bool = False) -> TransformOutput:
    stratification_of(program)
    check_non_floundering(program, query)
    extended, origins = _extend(program)
    if all(o == ORIGINAL for o in origins):
        origins = None
    demand = compute_demand_patterns(extended, query)
    return demand_transform(extended, query, demand, dedup=dedup, origins=origins)


def is_complement_rule(r: Rule) -> bool:
    """``n.p(args) :- d_n.p_s(args), not p(args)`` (or the undemanded one-hypothesis form)."""
    g = GeneratedName.parse(r.head.pred)
    if g is None or g.role != COMPLEMENT or not r.body or not r.body[-1].negated:
        return False
    return r.body[-1].atom.pred == g.base and not any(lit.negated for lit in r.body[:-1])


# Normalization ------------------------------------------------------------

class _Registry:
    """Signature -> generated predicate, with one definitional rule per signature."""

    def __init__(self, taken):
        self.taken = taken
        self.names = {}
        self.counts = {}
        self.rules = []

    def get(self, role, pred, signature, make_rule):
        key = (role, pred, signature)
        name = self.names.get(key)
        if name is None:
            n = self.counts.get((role, pred), 0) + 1
            self.counts[(role, pred)] = n
            name = GeneratedName(role, pred, index=n).render()
            _check_fresh(name, self.taken, role)
            self.names[key] = name
            self.rules.append(make_rule(name))
        return name


def _equality_filter(a: Atom, reg: _Registry) -> Atom:
    first = {}
    groups = []
    for i, t in enumerate(a.args):
        groups.append(first.setdefault(t, i) if t.is_var else i)
    if all(g == i for i, g in enumerate(groups)):
        return a
    kept = [i for i, g in enumerate(groups) if g == i]
    sig = tuple(groups)

    def make(name):
        params = [var(f"A{g + 1}") for g in groups]
        return Rule(Atom(name, tuple(var(f"A{i + 1}") for i in kept)), (Literal(Atom(a.pred, tuple(params))),))

    name = reg.get(EQUALITY, a.pred, sig, make)
    return Atom(name, tuple(a.args[i] for i in kept))


def _projection(a: Atom, singles: set, reg: _Registry) -> Atom:
    kept = tuple(i for i, t in enumerate(a.args) if t not in singles)
    if len(kept) == a.arity:
        return a

    def make(name):
        params = tuple(var(f"A{i + 1}") for i in range(a.arity))
        return Rule(Atom(name, tuple(params[i] for i in kept)), (Literal(Atom(a.pred, params)),))

    name = reg.get(PROJECTION, a.pred, kept, make)
    return Atom(name, tuple(a.args[i] for i in kept))


def normalize_rules(program: Program) -> Program:
    """Replace repeated variables within a hypothesis by an equality-filter
    predicate, then singleton variables by a projection predicate."""
    reg = _Registry(set(program.predicates()))
    out = []
    for r in program.rules:
        body = [lit if lit.negated else Literal(_equality_filter(lit.atom, reg)) for lit in r.body]
        counts = {}
        for t in r.head.args:
            counts[t] = counts.get(t, 0) + 1
        for lit in body:
            for t in lit.atom.args:
                counts[t] = counts.get(t, 0) + 1
        singles = {t for t, c in counts.items() if t.is_var and c == 1}
        if singles:
            body = [lit if lit.negated else Literal(_projection(lit.atom, singles, reg)) for lit in body]
        out.append(Rule(r.head, tuple(body), r.span))
    return Program(tuple(out + reg.rules), program.facts)


# Decomposition ------------------------------------------------------------

@dataclass
class DecomposedProgram:
    rules: list
    ids: list                  # rule id per rule: "r4" or "r4.2" for a decomposed part
    sources: list              # index of the source rule in the input program
    intermediates: set = field(default_factory=set)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def decompose_left(program: Program) -> DecomposedProgram:
    """Fold the two leftmost hypotheses into a fresh intermediate predicate
    until every rule has at most two hypotheses."""
    taken = set(program.predicates())
    out = DecomposedProgram([], [], [])
    for idx, r in enumerate(program.rules):
        if any(lit.negated for lit in r.body) and not (is_complement_rule(r) and len(r.body) <= 2):
            raise ValueError(f"negation outside a complement-defining rule: {r}")
        if len(r.body) <= 2:
            out.rules.append(r)
            out.ids.append(f"r{idx}")
            out.sources.append(idx)
            continue
        body = list(r.body)
        k = 0
        while len(body) > 2:
            k += 1
            h1, h2 = body[0], body[1]
            later = set(r.head.args)
            for lit in body[2:]:
                later.update(lit.atom.args)
            keep = {}
            for t in h1.atom.args + h2.atom.args:
                if t.is_var and t in later:
                    keep.setdefault(t, None)
            name = GeneratedName(INTERMEDIATE, f"r{idx}", index=k).render()
            _check_fresh(name, taken, "intermediate")
            inter = Atom(name, tuple(keep))
            out.rules.append(Rule(inter, (h1, h2), r.span))
            out.ids.append(f"r{idx}.{k}")
            out.sources.append(idx)
            out.intermediates.add(name)
            body = [Literal(inter)] + body[2:]
        out.rules.append(Rule(r.head, tuple(body), r.span))
        out.ids.append(f"r{idx}.{k + 1}")
        out.sources.append(idx)
    return out
