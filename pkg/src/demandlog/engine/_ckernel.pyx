# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled worklist kernel; same contract as ``_pykernel.run_worklist``.

Trigger specs are unpacked once into C arrays so the inner loop builds
keys and conclusion tuples without touching the slot descriptors.
"""
from cpython.mem cimport PyMem_Malloc, PyMem_Free
from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM

NAME = "compiled"


cdef class _Values:
    # a value spec: (source, position-or-constant) per slot
    cdef Py_ssize_t n
    cdef int* src
    cdef Py_ssize_t* pos
    cdef list consts

    def __cinit__(self, tuple spec):
        cdef Py_ssize_t i
        self.n = len(spec)
        self.src = <int*>PyMem_Malloc(max(self.n, 1) * sizeof(int))
        self.pos = <Py_ssize_t*>PyMem_Malloc(max(self.n, 1) * sizeof(Py_ssize_t))
        self.consts = []
        for i in range(self.n):
            s, v = spec[i]
            self.src[i] = s
            if s == 2:
                self.pos[i] = len(self.consts)
                self.consts.append(v)
            else:
                self.pos[i] = v

    def __dealloc__(self):
        PyMem_Free(self.src)
        PyMem_Free(self.pos)

    cdef inline tuple build(self, tuple a, tuple b):
        cdef Py_ssize_t i
        cdef tuple out = PyTuple_New(self.n)
        cdef object v
        for i in range(self.n):
            if self.src[i] == 0:
                v = a[self.pos[i]]
            elif self.src[i] == 1:
                v = b[self.pos[i]]
            else:
                v = self.consts[self.pos[i]]
            Py_INCREF(v)
            PyTuple_SET_ITEM(out, i, v)
        return out

    cdef inline object key(self, tuple a):
        if self.n == 1:
            if self.src[0] == 0:
                return a[self.pos[0]]
            return self.consts[self.pos[0]]
        return self.build(a, None)


cdef class _Check:
    cdef Py_ssize_t n_consts, n_eqs
    cdef Py_ssize_t* cpos
    cdef list cvals
    cdef Py_ssize_t* ea
    cdef Py_ssize_t* eb

    def __cinit__(self, tuple consts, tuple eqs):
        cdef Py_ssize_t i
        self.n_consts = len(consts)
        self.n_eqs = len(eqs)
        self.cpos = <Py_ssize_t*>PyMem_Malloc(max(self.n_consts, 1) * sizeof(Py_ssize_t))
        self.ea = <Py_ssize_t*>PyMem_Malloc(max(self.n_eqs, 1) * sizeof(Py_ssize_t))
        self.eb = <Py_ssize_t*>PyMem_Malloc(max(self.n_eqs, 1) * sizeof(Py_ssize_t))
        self.cvals = []
        for i in range(self.n_consts):
            self.cpos[i] = consts[i][0]
            self.cvals.append(consts[i][1])
        for i in range(self.n_eqs):
            self.ea[i] = eqs[i][0]
            self.eb[i] = eqs[i][1]

    def __dealloc__(self):
        PyMem_Free(self.cpos)
        PyMem_Free(self.ea)
        PyMem_Free(self.eb)

    cdef inline bint ok(self, tuple a):
        cdef Py_ssize_t i
        for i in range(self.n_consts):
            if a[self.cpos[i]] != self.cvals[i]:
                return False
        for i in range(self.n_eqs):
            if a[self.ea[i]] != a[self.eb[i]]:
                return False
        return True


cdef class _Trigger:
    cdef bint join, skip_self, has_own, has_other
    cdef Py_ssize_t rid
    cdef _Check own, other
    cdef _Values probe, head
    cdef dict idx
    cdef set hset
    cdef list hlist
    cdef object hpred


cdef class _Update:
    cdef _Values key
    cdef dict idx


cdef _Trigger _make_trigger(tuple spec):
    cdef _Trigger tr = _Trigger()
    tr.join = spec[0] == 1
    tr.rid = spec[1]
    tr.own = _Check(spec[2], spec[3])
    tr.has_own = tr.own.n_consts + tr.own.n_eqs > 0
    if tr.join:
        tr.probe = _Values(spec[4])
        tr.idx = spec[5]
        tr.other = _Check((), spec[6])
        tr.has_other = tr.other.n_eqs > 0
        tr.skip_self = spec[7]
        tr.head = _Values(spec[8])
        tr.hset, tr.hlist, tr.hpred = spec[9], spec[10], spec[11]
    else:
        tr.head = _Values(spec[4])
        tr.hset, tr.hlist, tr.hpred = spec[5], spec[6], spec[7]
    return tr


def prepare(dict updates, dict triggers):
    """Unpack plan specs into kernel objects (done once per plan)."""
    cu = {}
    for pred, entries in updates.items():
        lst = []
        for positions, idx in entries:
            u = _Update()
            u.key = _Values(tuple((0, p) for p in positions))
            u.idx = idx
            lst.append(u)
        cu[pred] = lst
    ct = {pred: [_make_trigger(s) for s in specs] for pred, specs in triggers.items()}
    return cu, ct


def run_worklist(worklist, dict updates, dict triggers, list firings):
    cdef Py_ssize_t nrules = len(firings), i
    cdef long long* counts = <long long*>PyMem_Malloc(max(nrules, 1) * sizeof(long long))
    cdef tuple item, t, h, b
    cdef list ups, trigs, bucket
    cdef _Update u
    cdef _Trigger tr
    cdef object k, pred
    cdef long long n
    popleft = worklist.popleft
    push = worklist.append
    for i in range(nrules):
        counts[i] = 0
    try:
        while worklist:
            item = popleft()
            pred = item[0]
            t = item[1]
            ups = updates.get(pred)
            if ups is not None:
                for u in ups:
                    k = u.key.key(t)
                    bucket = u.idx.get(k)
                    if bucket is None:
                        u.idx[k] = [t]
                    else:
                        bucket.append(t)
            trigs = triggers.get(pred)
            if trigs is None:
                continue
            for tr in trigs:
                if tr.has_own and not tr.own.ok(t):
                    continue
                if not tr.join:
                    counts[tr.rid] += 1
                    h = tr.head.build(t, None)
                    if h not in tr.hset:
                        tr.hset.add(h)
                        tr.hlist.append(h)
                        push((tr.hpred, h))
                    continue
                bucket = tr.idx.get(tr.probe.key(t))
                if bucket is None:
                    continue
                n = 0
                for b in bucket:
                    if tr.skip_self and b is t:
                        continue
                    if tr.has_other and not tr.other.ok(b):
                        continue
                    n += 1
                    h = tr.head.build(t, b)
                    if h not in tr.hset:
                        tr.hset.add(h)
                        tr.hlist.append(h)
                        push((tr.hpred, h))
                counts[tr.rid] += n
    finally:
        for i in range(nrules):
            firings[i] += counts[i]
        PyMem_Free(counts)


def run(plan, firings):
    prepared = getattr(plan, "_compiled", None)
    if prepared is None:
        prepared = prepare(plan.c_updates, plan.c_triggers)
        plan._compiled = prepared
    run_worklist(plan.store.worklist, prepared[0], prepared[1], firings)
