"""Relative Strength Index benchmark signal.

RSI here uses plain windowed gain/loss sums (no exponential smoothing) and
the standard bounded form RSI = 100 - 100 / (1 + RS).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dataset import WindowSpec
from .market_data import PriceSeries

__all__ = ["RsiState", "compute_rsi", "rsi_series", "rsi_signal"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RsiState:
    lookback: int = 14
    upper: float = 70.0
    lower: float = 30.0

    def __post_init__(self):
        if self.lookback < 2:
            raise ValueError("RSI lookback must be >= 2")
        if not 0.0 < self.lower < self.upper < 100.0:
            raise ValueError("levels must satisfy 0 < lower < upper < 100")


def compute_rsi(prices: PriceSeries, state: RsiState, t: int) -> float:
    """RSI over the lookback window of price changes ending at day index t."""
    lb = state.lookback
    if t < lb:
        raise ValueError(f"day index {t} needs at least {lb} prior prices")
    if t >= len(prices):
        raise ValueError(f"day index {t} out of range")
    window = np.diff(prices.closes[t - lb:t + 1])
    gains = float(np.sum(np.maximum(window, 0.0)))
    losses = float(np.sum(np.maximum(-window, 0.0)))
    if losses == 0.0:
        return 100.0
    if gains == 0.0:
        return 0.0
    rs = gains / losses
    return 100.0 - 100.0 / (1.0 + rs)


def rsi_series(prices: PriceSeries, state: RsiState) -> np.ndarray:
    """RSI at every day index; NaN where the window does not fit yet."""
    changes = np.diff(prices.closes)
    gains = np.maximum(changes, 0.0)
    losses = np.maximum(-changes, 0.0)
    lb = state.lookback
    n = len(prices)
    out = np.full(n, np.nan)
    if n - 1 < lb:
        return out
    csg = np.concatenate([[0.0], np.cumsum(gains)])
    csl = np.concatenate([[0.0], np.cumsum(losses)])
    g = csg[lb:] - csg[:-lb]
    l = csl[lb:] - csl[:-lb]
    rsi = np.empty_like(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        rsi = 100.0 - 100.0 / (1.0 + g / l)
    rsi[l == 0.0] = 100.0
    rsi[(g == 0.0) & (l > 0.0)] = 0.0
    out[lb:] = rsi
    return out


def rsi_signal(prices: PriceSeries, state: RsiState, spec: WindowSpec,
               crossing: bool = False) -> np.ndarray:
    """Benchmark signal aligned to the LabeledDataset targets for lookback p.

    The signal for target day t uses the RSI computed through day t-1 only.
    Level mode flags RSI >= upper or <= lower; crossing mode flags only the
    day the level is first breached. Targets whose RSI window does not fit
    yet get signal 0.
    """
    p = spec.p
    n_returns = len(prices) - 1
    if n_returns <= p:
        raise ValueError("price series too short for this lookback")
    rsi = rsi_series(prices, state)
    # target with return index t corresponds to price index t + 1, so the
    # day before the target is price index t
    idx = np.arange(p, n_returns)
    vals = rsi[idx]
    missing = np.isnan(vals)
    if np.any(missing):
        log.info("rsi_signal: %d early targets lack RSI history, emitting 0",
                 int(np.sum(missing)))
    if not crossing:
        out_of_band = (vals >= state.upper) | (vals <= state.lower)
    else:
        prev = rsi[idx - 1]
        crossed_up = (prev < state.upper) & (vals >= state.upper)
        crossed_down = (prev > state.lower) & (vals <= state.lower)
        out_of_band = np.where(np.isnan(prev), False, crossed_up | crossed_down)
    out_of_band = np.where(missing, False, out_of_band)
    return out_of_band.astype(np.int8)
