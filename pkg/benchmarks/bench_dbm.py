"""Compare the compiled and pure-Python DBM kernels.

    python benchmarks/bench_dbm.py [--dim 4] [--reps 20000]

Also splits one composed conflict search (170 with 171, default universe)
into spatial-table time and zone time under each kernel, in a subprocess
since the kernel is chosen at import.
"""

import argparse
import os
import random
import subprocess
import sys
import time

from dhc.automata import _dbm_py
from dhc.automata import dbm


def random_dbms(n, count, seed=0):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = [dbm.INF] * (n * n)
        for i in range(n):
            d[i * n + i] = dbm.LE_ZERO
            d[i] = dbm.LE_ZERO
        for _ in range(n * 2):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j:
                d[i * n + j] = min(d[i * n + j], rng.randint(-4, 20))
        c = _dbm_py.canonical(d, n)
        if c is not None:
            out.append(list(c))
    return out


def bench_kernel(k, dbms, n, reps):
    maxc = [0] + [5] * (n - 1)
    t = time.perf_counter()
    for r in range(reps):
        d = dbms[r % len(dbms)]
        z = k.up(d, n)
        z = k.constrain(z, n, 1, 0, dbm.le(7))
        if z is None:
            continue
        z = k.reset(z, n, [1])
        z = k.extrapolate(z, n, maxc)
        k.includes(z, d)
    return time.perf_counter() - t


CONFLICT_SNIPPET = """
import time
from dhc.automata import dbm
from dhc.automata.network import SpatialTable, explore
from dhc.compose import compose, find_permission_conflicts, find_timelocks, sign_kinds
from dhc.dsl import bundled_rules
from dhc.spatial import default_universe, enumerate_universe
B = bundled_rules()
r = [B['ukhc_170'].automaton, B['ukhc_171'].automaton]
s = compose(r)
sc = list(enumerate_universe(default_universe(sign_kinds(r))))
t0 = time.perf_counter()
tab = SpatialTable(s, sc)
t1 = time.perf_counter()
res = explore(s, sc, tab)
find_permission_conflicts(s, sc, res)
find_timelocks(s, sc, res)
t2 = time.perf_counter()
print(f"{dbm.BACKEND}: spatial table {t1 - t0:.2f} s, zones + conflicts {t2 - t1:.4f} s")
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=4, help="DBM dimension (clocks + 1)")
    ap.add_argument("--reps", type=int, default=20000)
    args = ap.parse_args()
    dbms = random_dbms(args.dim, 200)
    py = bench_kernel(_dbm_py, dbms, args.dim, args.reps)
    print(f"python kernel: {py:.3f} s for {args.reps} op sequences (dim {args.dim})")
    if dbm.BACKEND == "cython":
        cy = bench_kernel(dbm.kernel, dbms, args.dim, args.reps)
        print(f"cython kernel: {cy:.3f} s  (speed-up x{py / cy:.1f})")
    else:
        print("cython kernel: not built")
    for pure in ("1", "0"):
        env = dict(os.environ, DHC_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", CONFLICT_SNIPPET], env=env, capture_output=True, text=True)
        print("170||171, default universe ->", out.stdout.strip() or out.stderr.strip())


if __name__ == "__main__":
    main()
