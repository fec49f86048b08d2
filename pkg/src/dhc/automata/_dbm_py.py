"""Pure-Python difference-bound-matrix kernel.

A DBM over ``n - 1`` clocks is a flat list of ``n * n`` encoded bounds;
entry ``i * n + j`` bounds ``x_i - x_j``, with ``x_0`` the constant zero.
A bound ``(c, <=)`` is encoded as ``2c + 1`` and ``(c, <)`` as ``2c``, so
integer order on encodings is bound tightness. ``INF`` means unbounded.

Every function returns a new list (or None for an empty zone) and leaves
its input untouched. ``_dbm.pyx`` implements the same functions in C.
"""

INF = (1 << 62) - 1
LE_ZERO = 1


def le(c):
    return (c << 1) | 1


def lt(c):
    return c << 1


def add(a, b):
    if a == INF or b == INF:
        return INF
    return (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)


def canonical(d, n):
    d = list(d)
    for k in range(n):
        kn = k * n
        for i in range(n):
            dik = d[i * n + k]
            if dik == INF:
                continue
            row = i * n
            for j in range(n):
                dkj = d[kn + j]
                if dkj == INF:
                    continue
                s = (((dik >> 1) + (dkj >> 1)) << 1) | (dik & dkj & 1)
                if s < d[row + j]:
                    d[row + j] = s
            if d[row + i] < LE_ZERO:
                return None
    for i in range(n):
        if d[i * n + i] < LE_ZERO:
            return None
    return d


def up(d, n):
    d = list(d)
    for i in range(1, n):
        d[i * n] = INF
    return d


def reset(d, n, clocks):
    d = list(d)
    for x in clocks:
        for j in range(n):
            d[x * n + j] = d[j]
            d[j * n + x] = d[j * n]
        d[x * n + x] = LE_ZERO
    return d


def constrain(d, n, i, j, bound):
    """Intersect canonical ``d`` with ``x_i - x_j <= bound``; None if empty."""
    if add(bound, d[j * n + i]) < LE_ZERO:
        return None
    if bound >= d[i * n + j]:
        return list(d)
    d = list(d)
    d[i * n + j] = bound
    for a in range(n):
        dai = d[a * n + i]
        if dai == INF:
            continue
        via = add(dai, bound)
        for b in range(n):
            s = add(via, d[j * n + b])
            if s < d[a * n + b]:
                d[a * n + b] = s
    for a in range(n):
        if d[a * n + a] < LE_ZERO:
            return None
    return d


def extrapolate(d, n, maxc):
    """Classic max-constant extrapolation; ``maxc[0]`` must be 0. Result is re-closed."""
    d = list(d)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v = d[i * n + j]
            if v == INF:
                continue
            if v > le(maxc[i]):
                d[i * n + j] = INF
            elif v < lt(-maxc[j]):
                d[i * n + j] = lt(-maxc[j])
    return canonical(d, n)


def includes(a, b):
    """True when zone ``a`` contains zone ``b`` (both canonical)."""
    for x, y in zip(a, b):
        if x < y:
            return False
    return True


def tighten_integer(d, n):
    """Replace ``(c, <)`` by ``(c - 1, <=)``; the result holds exactly the integer points."""
    out = []
    for v in d:
        if v != INF and not (v & 1):
            v = le((v >> 1) - 1)
        out.append(v)
    return canonical(out, n)
