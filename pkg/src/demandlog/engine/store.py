"""Indexed ground-fact storage shared by the evaluation kernels."""
from __future__ import annotations

from collections import deque


class FactStore:
    """Set-semantics fact database.

    ``sets[p]`` answers membership, ``lists[p]`` keeps insertion order, and
    ``indexes[(p, positions)]`` maps key values to the facts of ``p`` that
    have already been taken off the worklist.  A key over one position is
    the bare value; over several positions it is a tuple.
    """

    def __init__(self):
        self.sets = {}
        self.lists = {}
        self.indexes = {}
        self.worklist = deque()
        self.given = 0

    def declare(self, pred: str):
        if pred not in self.sets:
            self.sets[pred] = set()
            self.lists[pred] = []

    def add(self, pred: str, values) -> bool:
        """Insert a fact; a duplicate is a no-op.  New facts join the worklist."""
        values = tuple(values)
        s = self.sets.get(pred)
        if s is None:
            self.declare(pred)
            s = self.sets[pred]
        if values in s:
            return False
        s.add(values)
        self.lists[pred].append(values)
        self.worklist.append((pred, values))
        return True

    def add_given(self, pred: str, rows) -> int:
        """Insert given facts, counting them toward the input size."""
        n = 0
        for row in rows:
            if self.add(pred, row):
                n += 1
        self.given += n
        return n

    def contains(self, pred: str, values) -> bool:
        s = self.sets.get(pred)
        return s is not None and tuple(values) in s

    def __contains__(self, item) -> bool:
        pred, values = item
        return self.contains(pred, values)

    def facts(self, pred: str) -> list:
        return self.lists.get(pred, [])

    def size(self, pred: str) -> int:
        return len(self.sets.get(pred, ()))

    def predicates(self) -> list:
        return list(self.sets)

    def sizes(self) -> dict:
        return {p: len(s) for p, s in self.sets.items()}

    def index(self, pred: str, positions: tuple) -> dict:
        """Index of ``pred`` on ``positions``, created on first use from the
        facts already processed."""
        key = (pred, tuple(positions))
        idx = self.indexes.get(key)
        if idx is not None:
            return idx
        idx = {}
        self.indexes[key] = idx
        if len(self.worklist) == sum(map(len, self.lists.values())):
            return idx      # nothing processed yet
        pending = {v for p, v in self.worklist if p == pred}
        for values in self.facts(pred):
            if values in pending:
                continue
            k = index_key(values, positions)
            bucket = idx.get(k)
            if bucket is None:
                idx[k] = [values]
            else:
                bucket.append(values)
        return idx

    def index_consistent(self) -> bool:
        """Every index holds exactly the processed facts of its predicate."""
        pending = set(self.worklist)
        for (pred, positions), idx in self.indexes.items():
            want = {}
            for values in self.facts(pred):
                if (pred, values) not in pending:
                    want.setdefault(index_key(values, positions), set()).add(values)
            got = {k: set(v) for k, v in idx.items()}
            if got != want:
                return False
        return True


def index_key(values: tuple, positions):
    if len(positions) == 1:
        return values[positions[0]]
    return tuple(values[i] for i in positions)
