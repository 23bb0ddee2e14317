# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; ``_kernels_py`` holds the reference versions."""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def averaging_run(x0, const Py_ssize_t[::1] step_ptr, const Py_ssize_t[::1] part_ptr,
                  const Py_ssize_t[::1] members, Py_ssize_t steps):
    cdef double[::1] x = np.ascontiguousarray(x0, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t period = step_ptr.shape[0] - 1
    out = np.empty((steps + 1, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t t, i, k, p, q
    cdef double s, avg
    for i in range(n):
        o[0, i] = x[i]
    for t in range(steps):
        for i in range(n):
            o[t + 1, i] = o[t, i]
        k = t % period
        for p in range(step_ptr[k], step_ptr[k + 1]):
            s = 0.0
            for q in range(part_ptr[p], part_ptr[p + 1]):
                s += o[t, members[q]]
            avg = s / (part_ptr[p + 1] - part_ptr[p])
            for q in range(part_ptr[p], part_ptr[p + 1]):
                o[t + 1, members[q]] = avg
    return out


cdef bint _place(int pos, int used, int k, int d, int* order, unsigned int* masks, int* color):
    cdef int v, c, w, top
    cdef bint ok
    if pos == d:
        return True
    v = order[pos]
    top = used + 1 if used + 1 < k else k
    for c in range(top):
        ok = True
        for w in range(d):
            if (masks[v] >> w) & 1 and color[w] == c:
                ok = False
                break
        if ok:
            color[v] = c
            if _place(pos + 1, used if used > c + 1 else c + 1, k, d, order, masks, color):
                return True
            color[v] = -1
    return False


def chromatic_number(masks):
    cdef int d = len(masks)
    if d == 0:
        return 0
    if d > 32:
        raise ValueError("chromatic_number kernel supports at most 32 vertices")
    cdef unsigned int cm[32]
    cdef int order[32]
    cdef int color[32]
    cdef int v, k
    for v in range(d):
        cm[v] = masks[v]
    ranked = sorted(range(d), key=lambda u: -bin(masks[u]).count("1"))
    for v in range(d):
        order[v] = ranked[v]
    k = 1
    while True:
        for v in range(d):
            color[v] = -1
        if _place(0, 0, k, d, order, cm, color):
            return k
        k += 1


cdef int _mis(unsigned int avail, unsigned int* masks, unsigned int* closed):
    cdef int v, take, skip
    if avail == 0:
        return 0
    v = 0
    while not (avail >> v) & 1:
        v += 1
    take = 1 + _mis(avail & ~closed[v], masks, closed)
    if masks[v] & avail == 0:
        return take
    skip = _mis(avail & ~(1u << v), masks, closed)
    return take if take > skip else skip


def independence_number(masks):
    cdef int d = len(masks)
    if d > 32:
        raise ValueError("independence_number kernel supports at most 32 vertices")
    cdef unsigned int cm[32]
    cdef unsigned int closed[32]
    cdef int v
    for v in range(d):
        cm[v] = masks[v]
        closed[v] = cm[v] | (1u << v)
    if d == 32:
        return _mis(0xFFFFFFFFu, cm, closed)
    return _mis((1u << d) - 1, cm, closed)
