"""Lookback windows, significance labels, and the temporal train/test split."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .market_data import ReturnSeries

__all__ = [
    "WindowSpec",
    "ThresholdSpec",
    "LabeledDataset",
    "SplitDataset",
    "build_windows",
    "label_significant",
    "temporal_split",
    "make_labeled_dataset",
]

DEFAULT_LOOKBACKS = (7, 14, 30, 60)
DEFAULT_THRESHOLDS = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5)


@dataclass(frozen=True)
class WindowSpec:
    """Lookback length p in days; any p >= 1 is accepted."""

    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("lookback p must be >= 1")


@dataclass(frozen=True)
class ThresholdSpec:
    """Significance rule |r| > k * sigma."""

    k: float
    sigma: float

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("threshold multiplier k must be > 0")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")

    @property
    def cut(self) -> float:
        return self.k * self.sigma


@dataclass(frozen=True)
class LabeledDataset:
    """Feature windows with continuous target and binary significance label.

    Row i of X holds the p returns preceding target i, most recent first.
    """

    X: np.ndarray = field(repr=False)
    y_cont: np.ndarray = field(repr=False)
    y_bin: np.ndarray = field(repr=False)
    dates: tuple[dt.date, ...]

    def __post_init__(self):
        n = len(self.y_cont)
        if not (len(self.X) == n == len(self.y_bin) == len(self.dates)):
            raise ValueError("misaligned dataset fields")

    def __len__(self) -> int:
        return len(self.y_cont)


@dataclass(frozen=True)
class SplitDataset:
    train: LabeledDataset
    test: LabeledDataset
    split_ratio: float


def build_windows(returns: ReturnSeries, spec: WindowSpec):
    """Windowed design matrix: row for target t = (r_{t-1}, ..., r_{t-p}).

    Returns (X, y_cont, dates) with n = len(returns) - p rows.
    """
    r = returns.returns
    p = spec.p
    if len(r) <= p:
        raise ValueError(f"series length {len(r)} must exceed lookback {p}")
    # windows of length p starting at t-p, reversed to most-recent-first
    X = sliding_window_view(r, p)[:-1][:, ::-1].copy()
    y_cont = r[p:].copy()
    dates = tuple(returns.dates[p:])
    return X, y_cont, dates


def label_significant(y_cont, thr: ThresholdSpec) -> np.ndarray:
    """1 iff |r| strictly exceeds k * sigma."""
    y = np.asarray(y_cont, dtype=np.float64)
    return (np.abs(y) > thr.cut).astype(np.int8)


def make_labeled_dataset(returns: ReturnSeries, spec: WindowSpec,
                         thr: ThresholdSpec) -> LabeledDataset:
    X, y_cont, dates = build_windows(returns, spec)
    return LabeledDataset(X=X, y_cont=y_cont,
                          y_bin=label_significant(y_cont, thr), dates=dates)


def temporal_split(ds: LabeledDataset, ratio: float) -> SplitDataset:
    """Chronological split: first floor(ratio * n) rows train, rest test."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("split ratio must lie in (0, 1)")
    n = len(ds)
    cut = int(np.floor(ratio * n))
    if cut == 0 or cut == n:
        raise ValueError(f"split ratio {ratio} leaves an empty partition for n={n}")
    def take(sl):
        return LabeledDataset(X=ds.X[sl], y_cont=ds.y_cont[sl],
                              y_bin=ds.y_bin[sl], dates=ds.dates[sl])
    return SplitDataset(train=take(slice(0, cut)), test=take(slice(cut, n)),
                        split_ratio=ratio)
