"""Timing comparison of the compiled and NumPy kernel backends.

Runs the three hot kernels on representative problem sizes against both
implementations and prints per-kernel wall times with the speedup factor.
The outputs are also cross-checked for exact equality, so a run doubles as
a parity smoke test.

Usage: python benchmarks/bench_backends.py [--n 400] [--repeats 3]
"""

import argparse
import time

import numpy as np

from sigfx._backend import _npy
from sigfx._svm import rbf_kernel

try:
    from sigfx._backend import _ck
except ImportError:
    _ck = None


def _svc_problem(n, p, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    X[n // 2:] += 1.0
    y = np.ones(n)
    y[: n // 2] = -1.0
    return rbf_kernel(X, X, gamma=1.0 / p), y


def _svr_problem(n, p, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 2, size=(n, p))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=n)
    return rbf_kernel(X, X, gamma=1.0 / p), y


def _split_problem(n, f, seed=2):
    rng = np.random.default_rng(seed)
    values = np.sort(rng.normal(size=(f, n)), axis=1)
    positives = (rng.uniform(size=(f, n)) < 0.3).astype(np.float64)
    return values, positives


def _time(fn, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _flatten(result):
    parts = []
    for item in result if isinstance(result, tuple) else (result,):
        parts.append(np.asarray(item, dtype=np.float64).reshape(-1))
    return np.concatenate(parts)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="problem size")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    n, p = args.n, 30
    Kc, yc = _svc_problem(n, p)
    Kr, yr = _svr_problem(n, 4)
    vals, pos = _split_problem(2000, 30)

    cases = [
        ("smo_classifier", lambda m: m.smo_classifier(Kc, yc, 1.0, 1e-3, 200)),
        ("smo_regressor", lambda m: m.smo_regressor(Kr, yr, 1.0, 0.05, 1e-3, 200)),
        ("best_split", lambda m: m.best_split(vals, pos)),
    ]

    if _ck is None:
        print("compiled extension not built; timing the NumPy backend only")
    print("%-16s %12s %12s %9s" % ("kernel", "numpy [ms]", "compiled [ms]",
                                   "speedup"))
    for name, run in cases:
        t_np, r_np = _time(lambda: run(_npy), args.repeats)
        if _ck is None:
            print("%-16s %12.2f %12s %9s" % (name, 1e3 * t_np, "-", "-"))
            continue
        t_ck, r_ck = _time(lambda: run(_ck), args.repeats)
        if not np.array_equal(_flatten(r_np), _flatten(r_ck)):
            raise SystemExit("backend outputs differ on %s" % name)
        print("%-16s %12.2f %12.2f %8.1fx"
              % (name, 1e3 * t_np, 1e3 * t_ck, t_np / t_ck))


if __name__ == "__main__":
    main()
