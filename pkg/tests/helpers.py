"""Shared test utilities, independent of the engine internals."""
from pathlib import Path

from demandlog.frontend import parse_program

GOLDEN = Path(__file__).parent / "golden"


def alpha_key(clause_text: str):
    """Clause text with variables renamed by first occurrence."""
    prog = parse_program(clause_text, disjoint=False)
    (item,) = prog.rules or prog.facts
    names = {}

    def atom(a):
        args = []
        for t in a.args:
            if t.is_var:
                args.append("V%d" % names.setdefault(t.name, len(names)))
            else:
                args.append(repr(t.name))
        return (a.pred, tuple(args))

    if prog.facts:
        return (atom(item), ())
    return (atom(item.head), tuple((lit.negated, atom(lit.atom)) for lit in item.body))


def read_listing(text: str):
    """``[(clause, label)]`` from listing text with ``% (label)`` comments."""
    out = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("%"):
            continue
        clause, _, comment = line.partition("%")
        label = comment.strip()
        out.append((clause.strip(), label[1:-1] if label.startswith("(") else label))
    return out


def golden(name: str):
    return read_listing((GOLDEN / f"{name}.txt").read_text())


def unify(args, values, binding):
    b = dict(binding)
    for t, v in zip(args, values):
        if t.is_var:
            if b.setdefault(t.name, v) != v:
                return None
        elif t.name != v:
            return None
    return b


def exhaustive_firings(rule, store):
    """Matching fact combinations of a positive rule over the final store,
    by nested enumeration."""
    bindings = [{}]
    for lit in rule.body:
        bindings = [b2 for b in bindings for v in store.facts(lit.atom.pred)
                    if len(v) == lit.atom.arity and (b2 := unify(lit.atom.args, v, b)) is not None]
    return len(bindings)
