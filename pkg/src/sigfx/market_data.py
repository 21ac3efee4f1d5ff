"""Daily exchange-rate series: CSV loading, log returns, dispersion."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "MarketDataError",
    "load_price_csv",
    "compute_returns",
    "return_sigma",
]


class MarketDataError(ValueError):
    """Raised for malformed price files or invalid series."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PriceSeries:
    """Dated daily closes for one currency pair.

    Dates are strictly increasing, closes are positive, length >= 2.
    """

    pair: str
    dates: tuple[dt.date, ...]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "closes", _frozen(self.closes))
        if len(self.dates) != len(self.closes):
            raise MarketDataError("dates and closes differ in length")
        if len(self.dates) < 2:
            raise MarketDataError("length >= 2 violated")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise MarketDataError(f"dates not strictly increasing at {b}")
        if not np.all(np.isfinite(self.closes)) or np.any(self.closes <= 0):
            raise MarketDataError("non-positive or non-finite close")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """Daily log returns; dates are the day of each return (day t)."""

    pair: str
    dates: tuple[dt.date, ...]
    returns: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "returns", _frozen(self.returns))
        if len(self.dates) != len(self.returns):
            raise MarketDataError("dates and returns differ in length")
        if not np.all(np.isfinite(self.returns)):
            raise MarketDataError("non-finite return")

    def __len__(self) -> int:
        return len(self.returns)


def load_price_csv(path, pair: str) -> PriceSeries:
    """Load a `date,close` CSV (optional header) into a PriceSeries.

    Rows are sorted ascending by date; duplicate dates, non-positive closes
    and unparseable rows are rejected with the offending line number.
    """
    rows: list[tuple[dt.date, float]] = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise MarketDataError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if lineno == 1 and _is_header(rec):
                continue
            if len(rec) < 2:
                raise MarketDataError(f"line {lineno}: expected date,close")
            try:
                date = dt.date.fromisoformat(rec[0].strip())
            except ValueError as exc:
                raise MarketDataError(f"line {lineno}: bad date {rec[0]!r}") from exc
            try:
                close = float(rec[1].strip())
            except ValueError as exc:
                raise MarketDataError(f"line {lineno}: bad close {rec[1]!r}") from exc
            if not math.isfinite(close) or close <= 0:
                raise MarketDataError(f"line {lineno}: non-positive close {rec[1]!r}")
            rows.append((date, close))
    seen = set()
    for date, _ in rows:
        if date in seen:
            raise MarketDataError(f"duplicate date {date.isoformat()}")
        seen.add(date)
    rows.sort(key=lambda r: r[0])
    if len(rows) < 2:
        raise MarketDataError("length >= 2 violated")
    dates = tuple(r[0] for r in rows)
    closes = np.array([r[1] for r in rows], dtype=np.float64)
    return PriceSeries(pair=pair, dates=dates, closes=closes)


def _is_header(rec) -> bool:
    try:
        dt.date.fromisoformat(rec[0].strip())
        return False
    except ValueError:
        return True


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    """Log returns r_t = ln(close_t / close_{t-1}); one fewer than prices."""
    r = np.diff(np.log(prices.closes))
    return ReturnSeries(pair=prices.pair, dates=prices.dates[1:], returns=r)


def return_sigma(returns: ReturnSeries | np.ndarray) -> float:
    """Population standard deviation (divide by n) of the return series."""
    r = returns.returns if isinstance(returns, ReturnSeries) else np.asarray(returns)
    if len(r) < 2:
        raise MarketDataError("need at least 2 returns for sigma")
    return float(np.std(r))
