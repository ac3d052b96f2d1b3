"""Pure-Python worklist kernel.

Facts are taken off the worklist one at a time.  A taken fact is first
added to every index on its predicate, then joined against the indexed
(already taken) facts of the other hypothesis of each rule it can match.
A pair of facts is therefore joined exactly once, when the later of the
two is taken; ``skip_self`` drops the pairing of a fact with itself on the
second side of a self-join, which the first side already counted.
"""

NAME = "python"


def run_worklist(worklist, updates, triggers, firings):
    popleft = worklist.popleft
    push = worklist.append
    get_updates = updates.get
    get_triggers = triggers.get
    while worklist:
        item = popleft()
        pred, t = item
        ups = get_updates(pred)
        if ups is not None:
            for keyfn, idx in ups:
                k = keyfn(t)
                bucket = idx.get(k)
                if bucket is None:
                    idx[k] = [t]
                else:
                    bucket.append(t)
        trigs = get_triggers(pred)
        if trigs is None:
            continue
        for tr in trigs:
            if tr[0] == 0:
                _, rid, ok, head, hset, hlist, hpred = tr
                if ok is not None and not ok(t):
                    continue
                firings[rid] += 1
                h = head(t)
                if h not in hset:
                    hset.add(h)
                    hlist.append(h)
                    push((hpred, h))
                continue
            _, rid, ok, probe, idx, other_ok, skip_self, head, hset, hlist, hpred = tr
            if ok is not None and not ok(t):
                continue
            bucket = idx.get(probe(t))
            if not bucket:
                continue
            if skip_self or other_ok is not None:
                n = 0
                for b in bucket:
                    if skip_self and b is t:
                        continue
                    if other_ok is not None and not other_ok(b):
                        continue
                    n += 1
                    h = head(t, b)
                    if h not in hset:
                        hset.add(h)
                        hlist.append(h)
                        push((hpred, h))
                firings[rid] += n
            else:
                firings[rid] += len(bucket)
                for b in bucket:
                    h = head(t, b)
                    if h not in hset:
                        hset.add(h)
                        hlist.append(h)
                        push((hpred, h))


def run(plan, firings):
    run_worklist(plan.store.worklist, plan.py_updates, plan.py_triggers, firings)
