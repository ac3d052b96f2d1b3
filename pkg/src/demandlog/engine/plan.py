"""Compile decomposed rules into worklist triggers.

Every trigger is stated once as plain data (positions and constants) and
lowered two ways: generated lambdas for the pure-Python kernel and integer
specs for the compiled kernel.

Source codes in value specs: 0 = the fact being processed, 1 = the matching
fact of the other hypothesis, 2 = a constant.
"""
from __future__ import annotations

from operator import itemgetter

OWN, OTHER, CONST = 0, 1, 2


def _atom_layout(atom):
    """(constant checks, equality checks, first position of each variable)."""
    consts, eqs, first = [], [], {}
    for i, t in enumerate(atom.args):
        if not t.is_var:
            consts.append((i, t.name))
        elif t in first:
            eqs.append((first[t], i))
        else:
            first[t] = i
    return tuple(consts), tuple(eqs), first


class Trigger:
    __slots__ = ("rid", "pred", "join", "own_consts", "own_eqs", "probe", "other_pred",
                 "other_positions", "other_eqs", "skip_self", "head", "head_pred")

    def __init__(self, **kw):
        for k in self.__slots__:
            setattr(self, k, kw.get(k))


def _single(rid, rule):
    atom = rule.body[0].atom
    consts, eqs, first = _atom_layout(atom)
    head = tuple((CONST, t.name) if not t.is_var else (OWN, first[t]) for t in rule.head.args)
    return [Trigger(rid=rid, pred=atom.pred, join=False, own_consts=consts, own_eqs=eqs,
                    head=head, head_pred=rule.head.pred)]


def _side(rid, rule, own, other, skip_self):
    consts, eqs, first = _atom_layout(own)
    shared = set(first)
    positions, probe = [], []
    other_first = {}
    other_eqs = []
    for j, t in enumerate(other.args):
        if not t.is_var:
            positions.append(j)
            probe.append((CONST, t.name))
        elif t in shared:
            positions.append(j)
            probe.append((OWN, first[t]))
        elif t in other_first:
            other_eqs.append((other_first[t], j))
        else:
            other_first[t] = j
    head = []
    for t in rule.head.args:
        if not t.is_var:
            head.append((CONST, t.name))
        elif t in first:
            head.append((OWN, first[t]))
        else:
            head.append((OTHER, other_first[t]))
    return Trigger(rid=rid, pred=own.pred, join=True, own_consts=consts, own_eqs=eqs,
                   probe=tuple(probe), other_pred=other.pred, other_positions=tuple(positions),
                   other_eqs=tuple(other_eqs), skip_self=skip_self, head=tuple(head),
                   head_pred=rule.head.pred)


def triggers_for(rid, rule):
    if any(lit.negated for lit in rule.body):
        raise ValueError(f"rule with negation cannot run in the positive loop: {rule}")
    if len(rule.body) == 1:
        return _single(rid, rule)
    if len(rule.body) == 2:
        h1, h2 = rule.body[0].atom, rule.body[1].atom
        same = h1.pred == h2.pred
        return [_side(rid, rule, h1, h2, False), _side(rid, rule, h2, h1, same)]
    raise ValueError(f"rule has more than two hypotheses; decompose first: {rule}")


# Lowering to Python closures -------------------------------------------------

def _value_src(spec, own="a", other="b"):
    src, v = spec
    if src == CONST:
        return repr(v)
    return f"{own if src == OWN else other}[{v}]"


def _tuple_src(specs, scalar_single=False):
    parts = [_value_src(s) for s in specs]
    if scalar_single and len(parts) == 1:
        return parts[0]
    if len(parts) == 1:
        return f"({parts[0]},)"
    return "(" + ", ".join(parts) + ")"


def _check_src(consts, eqs, name="a"):
    conds = [f"{name}[{i}] == {v!r}" for i, v in consts]
    conds += [f"{name}[{i}] == {name}[{j}]" for i, j in eqs]
    return " and ".join(conds)


def _compile(src):
    return eval(src, {})  # noqa: S307 - source built from positions and repr() constants only


def key_getter(positions):
    if not positions:
        return lambda a: ()
    return itemgetter(*positions)


class Plan:
    """Triggers for one rule set over one store, in both kernel encodings."""

    def __init__(self, rules, store, excluded=()):
        self.store = store
        self.rules = list(rules)
        self.triggers = []
        excluded = set(excluded)
        for rid, rule in enumerate(self.rules):
            if rid in excluded:
                continue
            self.triggers.extend(triggers_for(rid, rule))
        for rule in self.rules:
            store.declare(rule.head.pred)
            for lit in rule.body:
                store.declare(lit.atom.pred)

        used = {}
        for tr in self.triggers:
            if tr.join:
                used[(tr.other_pred, tr.other_positions)] = store.index(tr.other_pred, tr.other_positions)

        self.py_updates, self.c_updates = {}, {}
        for (pred, positions), idx in used.items():
            self.py_updates.setdefault(pred, []).append((key_getter(positions), idx))
            self.c_updates.setdefault(pred, []).append((positions, idx))

        self.py_triggers, self.c_triggers = {}, {}
        for tr in self.triggers:
            hset, hlist = store.sets[tr.head_pred], store.lists[tr.head_pred]
            own_ok = _check_src(tr.own_consts, tr.own_eqs)
            own_ok = _compile(f"lambda a: {own_ok}") if own_ok else None
            if not tr.join:
                head = _compile(f"lambda a: {_tuple_src(tr.head)}")
                py = (0, tr.rid, own_ok, head, hset, hlist, tr.head_pred)
                c = (0, tr.rid, tr.own_consts, tr.own_eqs, tr.head, hset, hlist, tr.head_pred)
            else:
                idx = used[(tr.other_pred, tr.other_positions)]
                probe = _compile(f"lambda a: {_tuple_src(tr.probe, scalar_single=True)}") \
                    if tr.probe else (lambda a: ())
                other_ok = _check_src((), tr.other_eqs, "b")
                other_ok = _compile(f"lambda b: {other_ok}") if other_ok else None
                head = _compile(f"lambda a, b: {_tuple_src(tr.head)}")
                py = (1, tr.rid, own_ok, probe, idx, other_ok, tr.skip_self, head,
                      hset, hlist, tr.head_pred)
                c = (1, tr.rid, tr.own_consts, tr.own_eqs, tr.probe, idx, tr.other_eqs,
                     tr.skip_self, tr.head, hset, hlist, tr.head_pred)
            self.py_triggers.setdefault(tr.pred, []).append(py)
            self.c_triggers.setdefault(tr.pred, []).append(c)
