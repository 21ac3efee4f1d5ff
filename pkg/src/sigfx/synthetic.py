"""Seeded synthetic market data for tests, demos and offline runs.

Two return generators (plain Gaussian and a GARCH(1,1) surrogate with
Student-t shocks that reproduces volatility clustering and heavy tails)
plus a planted-outlier window set for detector recovery checks.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .market_data import PriceSeries

__all__ = [
    "gaussian_returns",
    "garch_returns",
    "synthetic_price_series",
    "write_price_csv",
    "planted_outlier_windows",
]

# unconditional daily sigma ~0.6%, persistence 0.98: typical of major FX pairs
GARCH_OMEGA = 7.2e-7
GARCH_ALPHA = 0.09
GARCH_BETA = 0.89
GARCH_NU = 7.0


def gaussian_returns(n, sigma=0.006, seed=0):
    """i.i.d. normal daily log returns."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 11)))
    return sigma * rng.standard_normal(int(n))


def garch_returns(n, seed=0, omega=GARCH_OMEGA, alpha=GARCH_ALPHA,
                  beta=GARCH_BETA, nu=GARCH_NU):
    """GARCH(1,1) daily log returns with unit-variance Student-t shocks."""
    n = int(n)
    if alpha + beta >= 1.0:
        raise ValueError("alpha + beta must stay below 1 for stationarity")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 12)))
    z = rng.standard_t(nu, size=n) * np.sqrt((nu - 2.0) / nu)
    r = np.empty(n)
    v = omega / (1.0 - alpha - beta)
    for t in range(n):
        r[t] = np.sqrt(v) * z[t]
        v = omega + alpha * r[t] * r[t] + beta * v
    return r


def _weekdays(start, n):
    out = []
    d = start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return tuple(out)


def synthetic_price_series(pair, n_days=5200, seed=0,
                           start=dt.date(1999, 1, 4), start_price=1.1,
                           generator=garch_returns, **params):
    """Price series on consecutive weekdays from cumulated generated returns."""
    n_days = int(n_days)
    r = generator(n_days - 1, seed=seed, **params)
    closes = start_price * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    return PriceSeries(pair=pair, dates=_weekdays(start, n_days), closes=closes)


def write_price_csv(path, prices):
    """Write a PriceSeries as the date,close CSV the loader accepts."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,close\n")
        for d, c in zip(prices.dates, prices.closes):
            fh.write("%s,%.10f\n" % (d.isoformat(), c))
    return path


def _spread_directions(rng, m, p, n_cand=50):
    """Unit directions by best-candidate sampling: each new one maximizes
    its minimum distance to those already chosen."""
    dirs = np.empty((m, p))
    v = rng.standard_normal(p)
    dirs[0] = v / np.linalg.norm(v)
    for i in range(1, m):
        cand = rng.standard_normal((n_cand, p))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        d = np.linalg.norm(cand[:, None, :] - dirs[None, :i, :], axis=2)
        dirs[i] = cand[np.argmax(d.min(axis=1))]
    return dirs


def planted_outlier_windows(n=2000, p=4, frac=0.05, radius=5.0, seed=0):
    """Standard-normal windows with a fraction replaced by isolated plants.

    Plants sit at the given radius (in units of the clean coordinate sigma)
    along well-separated directions, so each one is genuinely locally
    outlying rather than part of a planted clump. Returns (X, y) with y = 1
    on planted rows.
    """
    n, p = int(n), int(p)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 13)))
    X = rng.standard_normal((n, p))
    n_out = int(round(frac * n))
    idx = rng.choice(n, size=n_out, replace=False)
    X[idx] = radius * _spread_directions(rng, n_out, p)
    y = np.zeros(n, dtype=np.int8)
    y[idx] = 1
    return X, y
