# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror ``permchain._kernels_py``."""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize, PyBytes_GET_SIZE
from cpython.dict cimport PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject
from cpython.set cimport PySet_Add, PySet_Contains
from libc.stdlib cimport free, malloc

cdef enum:
    MAXLEN = 255
    MAXOPT = 4096

cdef unsigned char MARK = 0x80
cdef unsigned char VALUE = 0x7F


def flatten(word):
    ranks = {v: i for i, v in enumerate(sorted(word), 1)}
    return tuple([ranks[v] for v in word])


def find_occurrence(host, pattern):
    cdef Py_ssize_t k = len(pattern)
    cdef Py_ssize_t n = len(host)
    cdef Py_ssize_t i, j, p, limit, start, lo, hi
    cdef long v, pi, pj
    cdef bint found
    if k == 0:
        return ()
    if k > n:
        return None
    cdef long *h = <long *> malloc(n * sizeof(long))
    cdef long *pat = <long *> malloc(k * sizeof(long))
    cdef Py_ssize_t *below = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *above = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *pos = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    try:
        for i in range(n):
            h[i] = host[i]
        for i in range(k):
            pat[i] = pattern[i]
        for i in range(k):
            pi = pat[i]
            lo = -1
            hi = -1
            for j in range(i):
                pj = pat[j]
                if pj < pi and (lo < 0 or pj > pat[lo]):
                    lo = j
                elif pj > pi and (hi < 0 or pj < pat[hi]):
                    hi = j
            below[i] = lo
            above[i] = hi
        i = 0
        start = 0
        while True:
            limit = n - k + i
            lo = below[i]
            hi = above[i]
            p = start
            found = False
            while p <= limit:
                v = h[p]
                if (lo < 0 or v > h[pos[lo]]) and (hi < 0 or v < h[pos[hi]]):
                    found = True
                    break
                p += 1
            if found:
                pos[i] = p
                if i == k - 1:
                    return tuple([pos[j] for j in range(k)])
                i += 1
                start = p + 1
            else:
                i -= 1
                if i < 0:
                    return None
                start = pos[i] + 1
    finally:
        free(h)
        free(pat)
        free(below)
        free(above)
        free(pos)


cdef inline bytes _delete(const unsigned char *src, Py_ssize_t n, Py_ssize_t i,
                          unsigned char *buf):
    cdef unsigned char d = src[i]
    cdef Py_ssize_t j, w = 0
    cdef unsigned char v
    for j in range(n):
        if j == i:
            continue
        v = src[j]
        buf[w] = v - 1 if v > d else v
        w += 1
    return PyBytes_FromStringAndSize(<char *> buf, n - 1)


def deletions(bytes p):
    cdef Py_ssize_t n = PyBytes_GET_SIZE(p)
    cdef const unsigned char *src = <const unsigned char *> PyBytes_AS_STRING(p)
    cdef unsigned char buf[MAXLEN]
    cdef Py_ssize_t i
    out = set()
    for i in range(n):
        PySet_Add(out, _delete(src, n, i, buf))
    return out


def marked_children(dict layer, dict out):
    cdef unsigned char buf[MAXLEN]
    cdef const unsigned char *src
    cdef Py_ssize_t n, i, j, w
    cdef unsigned char d, v
    cdef PyObject *prev
    cdef bytes p, child
    for p, m in layer.items():
        n = PyBytes_GET_SIZE(p)
        src = <const unsigned char *> PyBytes_AS_STRING(p)
        for i in range(n):
            d = src[i] & VALUE
            w = 0
            for j in range(n):
                if j == i:
                    continue
                v = src[j]
                buf[w] = v - 1 if (v & VALUE) > d else v
                w += 1
            child = PyBytes_FromStringAndSize(<char *> buf, n - 1)
            prev = PyDict_GetItem(out, child)
            if prev is NULL or m < <object> prev:
                PyDict_SetItem(out, child, m)


cdef struct InflateCtx:
    int j
    int n_max
    int budget
    int nfill
    int nend
    unsigned char vals[MAXLEN]
    unsigned char marked[MAXLEN]
    int order[MAXLEN]
    int choice[MAXLEN]
    int offs[MAXLEN]
    unsigned char out[MAXLEN + 1]
    long emitted


cdef int _emit(InflateCtx *c, int total, const unsigned char **fdata, int *flen,
               const unsigned char **edata, int *elen, list outs) except -1:
    cdef int q, acc = 0, w = 0, t, L, acc_len
    cdef const unsigned char *b
    for t in range(c.j):
        q = c.order[t]
        if c.marked[q]:
            acc_len = elen[c.choice[q]]
        else:
            acc_len = flen[c.choice[q]]
        c.offs[q] = acc
        acc += acc_len
    for q in range(c.j):
        if c.marked[q]:
            b = edata[c.choice[q]]
            L = elen[c.choice[q]]
        else:
            b = fdata[c.choice[q]]
            L = flen[c.choice[q]]
        for t in range(L):
            c.out[w] = <unsigned char> (c.offs[q] + b[t])
            w += 1
    PySet_Add(outs[total], PyBytes_FromStringAndSize(<char *> c.out, w))
    c.emitted += 1
    return 0


cdef int _rec(InflateCtx *c, int i, int total, int extra,
              const unsigned char **fdata, int *flen, int *fcost,
              const unsigned char **edata, int *elen, list outs) except -1:
    cdef int o, t, e, rest
    if i == c.j:
        return _emit(c, total, fdata, flen, edata, elen, outs)
    rest = c.j - i - 1
    if c.marked[i]:
        for o in range(c.nend):
            t = total + elen[o]
            if t + rest > c.n_max:
                continue
            c.choice[i] = o
            _rec(c, i + 1, t, extra, fdata, flen, fcost, edata, elen, outs)
    else:
        for o in range(c.nfill):
            t = total + flen[o]
            if t + rest > c.n_max:
                continue
            e = extra + fcost[o]
            if e > c.budget:
                continue
            c.choice[i] = o
            _rec(c, i + 1, t, e, fdata, flen, fcost, edata, elen, outs)
    return 0


def inflate_marked(bytes rho, list fills, list ends, int budget, int n_max, list outs):
    cdef InflateCtx c
    cdef Py_ssize_t j = PyBytes_GET_SIZE(rho)
    cdef const unsigned char *src = <const unsigned char *> PyBytes_AS_STRING(rho)
    cdef int i, a, b, tmp
    if j == 0 or j > n_max:
        return 0
    if j > MAXLEN or n_max > MAXLEN:
        raise ValueError("permutation too long for packed kernels")
    if len(fills) > MAXOPT or len(ends) > MAXOPT:
        raise ValueError("too many block options")
    c.j = <int> j
    c.n_max = n_max
    c.budget = budget
    c.nfill = len(fills)
    c.nend = len(ends)
    c.emitted = 0
    for i in range(j):
        c.vals[i] = src[i] & VALUE
        c.marked[i] = 1 if (src[i] & MARK) else 0
        c.order[c.vals[i] - 1] = i
    # keep Python references alive for the duration of the call
    fill_blocks = [f[0] for f in fills]
    cdef const unsigned char **fdata = <const unsigned char **> malloc((c.nfill + 1) * sizeof(void *))
    cdef int *flen = <int *> malloc((c.nfill + 1) * sizeof(int))
    cdef int *fcost = <int *> malloc((c.nfill + 1) * sizeof(int))
    cdef const unsigned char **edata = <const unsigned char **> malloc((c.nend + 1) * sizeof(void *))
    cdef int *elen = <int *> malloc((c.nend + 1) * sizeof(int))
    try:
        for i in range(c.nfill):
            blk = <bytes> fill_blocks[i]
            fdata[i] = <const unsigned char *> PyBytes_AS_STRING(blk)
            flen[i] = <int> PyBytes_GET_SIZE(blk)
            fcost[i] = fills[i][1]
        for i in range(c.nend):
            blk = <bytes> ends[i]
            edata[i] = <const unsigned char *> PyBytes_AS_STRING(blk)
            elen[i] = <int> PyBytes_GET_SIZE(blk)
        _rec(&c, 0, 0, 0, fdata, flen, fcost, edata, elen, outs)
    finally:
        free(fdata)
        free(flen)
        free(fcost)
        free(edata)
        free(elen)
    return c.emitted


def sum_into(left, right, set out):
    cdef unsigned char buf[2 * MAXLEN]
    cdef Py_ssize_t la, lb, t
    cdef const unsigned char *pa
    cdef const unsigned char *pb
    cdef bytes a, b
    right = list(right)
    for a in left:
        la = PyBytes_GET_SIZE(a)
        pa = <const unsigned char *> PyBytes_AS_STRING(a)
        for t in range(la):
            buf[t] = pa[t]
        for b in right:
            lb = PyBytes_GET_SIZE(b)
            if la + lb > MAXLEN:
                raise ValueError("permutation too long for packed kernels")
            pb = <const unsigned char *> PyBytes_AS_STRING(b)
            for t in range(lb):
                buf[la + t] = <unsigned char> (pb[t] + la)
            PySet_Add(out, PyBytes_FromStringAndSize(<char *> buf, la + lb))


def first_unclosed(members, tuple lower, set excluded):
    cdef unsigned char buf[MAXLEN]
    cdef const unsigned char *src
    cdef Py_ssize_t n, i
    cdef bytes p, child
    cdef bint present
    for p in members:
        n = PyBytes_GET_SIZE(p)
        src = <const unsigned char *> PyBytes_AS_STRING(p)
        for i in range(n):
            child = _delete(src, n, i, buf)
            if PySet_Contains(excluded, child):
                return p, child
            present = False
            for s in lower:
                if PySet_Contains(s, child):
                    present = True
                    break
            if not present:
                return p, child
    return None


def inflate(quotient, blocks):
    cdef Py_ssize_t m = len(quotient)
    cdef Py_ssize_t i, acc = 0
    base = [0] * m
    for i in sorted(range(m), key=quotient.__getitem__):
        base[i] = acc
        acc += len(blocks[i])
    out = []
    for i in range(m):
        b = base[i]
        out.extend([b + v for v in blocks[i]])
    return tuple(out)
