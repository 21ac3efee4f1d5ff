"""Tests for the RSI benchmark signal."""

import datetime as dt

import numpy as np
import pytest

from sigfx.dataset import WindowSpec
from sigfx.market_data import PriceSeries
from sigfx.rsi_benchmark import (RsiState, compute_rsi, rsi_series,
                                 rsi_signal)


def _series(closes, start=dt.date(2020, 1, 1)):
    closes = np.asarray(closes, dtype=np.float64)
    dates = [start + dt.timedelta(days=i) for i in range(len(closes))]
    return PriceSeries(pair="EURUSD", dates=dates, closes=closes)


def _random_series(seed=0, n=120):
    rng = np.random.default_rng(seed)
    closes = 1.2 * np.exp(np.cumsum(0.006 * rng.normal(size=n)))
    return _series(closes)


def test_all_gains_reads_100():
    prices = _series(np.linspace(1.0, 2.0, 30))
    st = RsiState(lookback=14)
    assert compute_rsi(prices, st, 20) == 100.0


def test_all_losses_reads_0():
    prices = _series(np.linspace(2.0, 1.0, 30))
    st = RsiState(lookback=14)
    assert compute_rsi(prices, st, 20) == 0.0


def test_balanced_moves_read_50():
    closes = 1.0 + 0.01 * np.array([0, 1, 0, 1, 0, 1, 0, 1, 0])
    prices = _series(closes)
    st = RsiState(lookback=4)
    # two +0.01 and two -0.01 changes in each window
    assert compute_rsi(prices, st, 6) == pytest.approx(50.0)


def test_known_window_value():
    # changes over the window: +2, -1, +1, -2 -> gains 3, losses 3 is 50;
    # tilt one change to get 60/40 splits
    closes = np.array([10.0, 12.0, 11.0, 12.0, 10.0, 13.0])
    st = RsiState(lookback=5)
    # window changes: +2, -1, +1, -2, +3 -> gains 6, losses 3, RS = 2
    assert compute_rsi(_series(closes), st, 5) == pytest.approx(100 - 100 / 3)


def test_scale_invariance():
    prices = _random_series(seed=1)
    scaled = _series(prices.closes * 173.5)
    st = RsiState()
    a = rsi_series(prices, st)
    b = rsi_series(scaled, st)
    np.testing.assert_allclose(a[14:], b[14:], atol=1e-10)


def test_bounds():
    vals = rsi_series(_random_series(seed=2, n=300), RsiState())
    vals = vals[~np.isnan(vals)]
    assert np.all(vals >= 0.0) and np.all(vals <= 100.0)


def test_series_matches_pointwise():
    prices = _random_series(seed=3)
    st = RsiState(lookback=9)
    vals = rsi_series(prices, st)
    assert np.isnan(vals[:9]).all()
    for t in (9, 20, 57, len(prices) - 1):
        assert vals[t] == pytest.approx(compute_rsi(prices, st, t),
                                        abs=1e-10)


def test_no_look_ahead():
    prices = _random_series(seed=4, n=80)
    st = RsiState(lookback=14)
    spec = WindowSpec(p=7)
    base = rsi_signal(prices, st, spec)
    bumped = prices.closes.copy()
    bumped[-1] *= 1.5
    moved = rsi_signal(_series(bumped), st, spec)
    # only the final target may change; it is the one seeing day n-2 back
    np.testing.assert_array_equal(base[:-1], moved[:-1])


def test_alignment_uses_day_before_target():
    prices = _random_series(seed=5, n=60)
    st = RsiState(lookback=10)
    spec = WindowSpec(p=12)
    sig = rsi_signal(prices, st, spec)
    rsi = rsi_series(prices, st)
    n_returns = len(prices) - 1
    assert len(sig) == n_returns - spec.p
    for j, t in enumerate(range(spec.p, n_returns)):
        v = rsi[t]
        expect = 0 if np.isnan(v) else int(v >= st.upper or v <= st.lower)
        assert sig[j] == expect


def test_warm_up_targets_are_zero():
    prices = _series(np.linspace(1.0, 3.0, 40))
    st = RsiState(lookback=20)
    sig = rsi_signal(prices, st, WindowSpec(p=5))
    # targets 5..19 precede the first full RSI window at price index 20
    assert np.all(sig[:15] == 0)
    assert np.all(sig[15:] == 1)


def test_rising_market_flags_every_day_in_level_mode():
    prices = _series(np.linspace(1.0, 2.0, 40))
    sig = rsi_signal(prices, RsiState(lookback=5), WindowSpec(p=7))
    assert np.all(sig == 1)


def test_crossing_mode_flags_first_breach_only():
    prices = _series(np.linspace(1.0, 2.0, 40))
    st = RsiState(lookback=5)
    level = rsi_signal(prices, st, WindowSpec(p=7))
    cross = rsi_signal(prices, st, WindowSpec(p=7), crossing=True)
    assert np.all(level == 1)
    # RSI pegs at 100 from the first full window on, so no later crossing
    assert int(cross.sum()) <= 1


def test_crossing_mode_fires_on_transition():
    # flat then sharp rally: RSI jumps across the upper level once
    closes = np.concatenate([
        1.0 + 0.001 * np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]),
        np.linspace(1.001, 1.4, 12)])
    prices = _series(closes)
    st = RsiState(lookback=6)
    cross = rsi_signal(prices, st, WindowSpec(p=2), crossing=True)
    level = rsi_signal(prices, st, WindowSpec(p=2))
    assert int(cross.sum()) >= 1
    assert int(cross.sum()) < int(level.sum())
    first_level = int(np.argmax(level))
    assert cross[first_level] == 1


def test_state_validation():
    with pytest.raises(ValueError):
        RsiState(lookback=1)
    with pytest.raises(ValueError):
        RsiState(upper=30.0, lower=70.0)
    with pytest.raises(ValueError):
        RsiState(upper=110.0)
    with pytest.raises(ValueError):
        RsiState(lower=0.0)


def test_compute_rsi_index_errors():
    prices = _random_series(seed=6, n=30)
    st = RsiState(lookback=14)
    with pytest.raises(ValueError):
        compute_rsi(prices, st, 13)
    with pytest.raises(ValueError):
        compute_rsi(prices, st, 30)


def test_short_series_rejected():
    prices = _series([1.0, 1.1, 1.2])
    with pytest.raises(ValueError):
        rsi_signal(prices, RsiState(), WindowSpec(p=7))


def test_short_series_rsi_all_nan():
    vals = rsi_series(_series([1.0, 1.1, 1.2]), RsiState(lookback=14))
    assert np.isnan(vals).all()
