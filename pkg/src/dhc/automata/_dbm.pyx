# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""C implementation of the DBM kernel; see ``_dbm_py`` for the encoding."""

from libc.stdlib cimport malloc, free

ctypedef long long bound_t

cdef bound_t C_INF = (1LL << 62) - 1
INF = C_INF
LE_ZERO = 1


cdef inline bound_t c_add(bound_t a, bound_t b) nogil:
    if a == C_INF or b == C_INF:
        return C_INF
    return (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)


def le(c):
    return (c << 1) | 1


def lt(c):
    return c << 1


def add(a, b):
    return c_add(a, b)


cdef bound_t* to_c(d, int size) except NULL:
    cdef bound_t* out = <bound_t*> malloc(size * sizeof(bound_t))
    if out == NULL:
        raise MemoryError()
    cdef int k
    for k in range(size):
        out[k] = d[k]
    return out


cdef list to_py(bound_t* d, int size):
    cdef int k
    return [d[k] for k in range(size)]


cdef bint c_close(bound_t* d, int n) nogil:
    """Floyd-Warshall in place; returns False if the zone is empty."""
    cdef int i, j, k
    cdef bound_t dik, dkj, s
    for k in range(n):
        for i in range(n):
            dik = d[i * n + k]
            if dik == C_INF:
                continue
            for j in range(n):
                dkj = d[k * n + j]
                if dkj == C_INF:
                    continue
                s = (((dik >> 1) + (dkj >> 1)) << 1) | (dik & dkj & 1)
                if s < d[i * n + j]:
                    d[i * n + j] = s
            if d[i * n + i] < 1:
                return False
    for i in range(n):
        if d[i * n + i] < 1:
            return False
    return True


def canonical(d, int n):
    cdef bound_t* c = to_c(d, n * n)
    try:
        if not c_close(c, n):
            return None
        return to_py(c, n * n)
    finally:
        free(c)


def up(d, int n):
    out = list(d)
    cdef int i
    for i in range(1, n):
        out[i * n] = C_INF
    return out


def reset(d, int n, clocks):
    cdef bound_t* c = to_c(d, n * n)
    cdef int x, j
    try:
        for x in clocks:
            for j in range(n):
                c[x * n + j] = c[j]
                c[j * n + x] = c[j * n]
            c[x * n + x] = 1
        return to_py(c, n * n)
    finally:
        free(c)


def constrain(d, int n, int i, int j, bound_t bound):
    if c_add(bound, d[j * n + i]) < 1:
        return None
    if bound >= d[i * n + j]:
        return list(d)
    cdef bound_t* c = to_c(d, n * n)
    cdef int a, b
    cdef bound_t via, s
    try:
        c[i * n + j] = bound
        for a in range(n):
            if c[a * n + i] == C_INF:
                continue
            via = c_add(c[a * n + i], bound)
            for b in range(n):
                s = c_add(via, c[j * n + b])
                if s < c[a * n + b]:
                    c[a * n + b] = s
        for a in range(n):
            if c[a * n + a] < 1:
                return None
        return to_py(c, n * n)
    finally:
        free(c)


def extrapolate(d, int n, maxc):
    cdef bound_t* c = to_c(d, n * n)
    cdef int i, j
    cdef bound_t v, hi, lo
    try:
        for i in range(n):
            hi = ((<bound_t> maxc[i]) << 1) | 1
            for j in range(n):
                if i == j:
                    continue
                v = c[i * n + j]
                if v == C_INF:
                    continue
                lo = (-(<bound_t> maxc[j])) << 1
                if v > hi:
                    c[i * n + j] = C_INF
                elif v < lo:
                    c[i * n + j] = lo
        if not c_close(c, n):
            return None
        return to_py(c, n * n)
    finally:
        free(c)


def includes(a, b):
    cdef int k
    cdef int size = len(a)
    for k in range(size):
        if <bound_t> a[k] < <bound_t> b[k]:
            return False
    return True


def tighten_integer(d, int n):
    cdef bound_t* c = to_c(d, n * n)
    cdef int k
    cdef bound_t v
    try:
        for k in range(n * n):
            v = c[k]
            if v != C_INF and not (v & 1):
                c[k] = (((v >> 1) - 1) << 1) | 1
        if not c_close(c, n):
            return None
        return to_py(c, n * n)
    finally:
        free(c)
