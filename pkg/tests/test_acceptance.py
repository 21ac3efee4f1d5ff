"""End-to-end acceptance checks, one test per promised behavior.

Each test prints a labeled summary line; run with `pytest -v` to get the
per-criterion pass/fail listing. Everything runs offline: when no real
price file is present under data/, the market-dependent checks run on the
seeded GARCH surrogate and say so in their printed line. One check, the
recall-vs-threshold trend, gates on crisis sequencing that only real
multi-crisis history has and is expected to fail on the surrogate (see
the comment on that test).
"""

import os
import time

import numpy as np
import pytest
from scipy.stats import norm, spearmanr

from sigfx import _mlp
from sigfx.classifiers import fit_classifier, predict_labels
from sigfx.config import (CLASSIFICATION_METHODS, DETECTION_METHODS,
                          REGRESSION_METHODS, ExperimentConfig)
from sigfx.evaluation import confusion_counts, metrics_from_counts
from sigfx.market_data import compute_returns, load_price_csv, return_sigma
from sigfx.outlier_detectors import fit_detector, training_signal
from sigfx.runner import expand_grid, run_grid, write_results
from sigfx.synthetic import (gaussian_returns, planted_outlier_windows,
                             synthetic_price_series, write_price_csv)

REAL_DATA = os.path.join(os.path.dirname(__file__), "..", "data",
                         "EURUSD.csv")

# scale of the stand-in EUR/USD series used when no real file is present:
# long enough that the 30% test tail still holds significant days at the
# highest threshold, the precondition the recall comparisons rest on
SURROGATE_DAYS = 5200
SURROGATE_SEED = 0

ALL_METHODS = REGRESSION_METHODS + CLASSIFICATION_METHODS + \
    DETECTION_METHODS + ("RSI",)
LOOKBACKS = (7, 14, 30, 60)
THRESHOLDS = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5)


def _eurusd_path(tmp_factory):
    if os.path.exists(REAL_DATA):
        return REAL_DATA, "real data"
    path = str(tmp_factory.mktemp("surrogate") / "EURUSD.csv")
    write_price_csv(path, synthetic_price_series(
        "EURUSD", n_days=SURROGATE_DAYS, seed=SURROGATE_SEED))
    return path, "surrogate data"


@pytest.fixture(scope="module")
def eurusd_grid(tmp_path_factory):
    """One full-methods grid over the EUR/USD series (or its surrogate),
    shared by the recall-comparison and runtime criteria."""
    path, source = _eurusd_path(tmp_path_factory)
    cfg = ExperimentConfig(pairs=("EURUSD",), data_paths={"EURUSD": path},
                           lookbacks=LOOKBACKS, thresholds=THRESHOLDS,
                           methods=ALL_METHODS, seed=0,
                           out_dir=str(tmp_path_factory.mktemp("grid_out")))
    cells = expand_grid(cfg)
    t0 = time.perf_counter()
    table = run_grid(cfg)
    elapsed = time.perf_counter() - t0
    failed = [r for r in table.results if not r.ok]
    assert not failed, "grid cells failed: %s" % [
        (f.cell.method, f.cell.lookback, f.cell.threshold_k, f.error)
        for f in failed[:5]]
    # precondition: the test tail must contain significant days even at
    # the highest threshold, else recall comparisons are vacuous
    for p in LOOKBACKS:
        counts = {r.metrics.counts.tp + r.metrics.counts.fn
                  for r in table.results
                  if r.cell.lookback == p and r.cell.threshold_k == 2.5}
        assert len(counts) == 1  # same labels for every method
        n_pos = counts.pop()
        assert n_pos >= 5, "p=%d has only %d significant test days" % (
            p, n_pos)
    return {"table": table, "source": source, "elapsed": elapsed,
            "n_cells": len(cells)}


def test_criterion_1_significant_label_rate(tmp_path_factory):
    t0 = time.perf_counter()
    if os.path.exists(REAL_DATA):
        prices = load_price_csv(REAL_DATA, "EURUSD")
        r = compute_returns(prices).returns
        source, center, tol = "real data", 0.13, 0.03
    else:
        r = gaussian_returns(1_000_000, seed=0)
        center = 2.0 * (1.0 - norm.cdf(1.5))
        source, tol = "synthetic fallback (i.i.d. Gaussian)", 0.005
    sigma = return_sigma(r)
    rate = float(np.mean(np.abs(r) > 1.5 * sigma))
    elapsed = time.perf_counter() - t0
    print("criterion 1: significant fraction %.2f%% vs %.2f%% +/- %.1fpp "
          "at k=1.5 on %s, %.2fs" % (100 * rate, 100 * center, 100 * tol,
                                     source, elapsed))
    assert abs(rate - center) <= tol
    assert elapsed < 5.0


def test_criterion_2_metric_oracle():
    rng = np.random.default_rng(2024)
    worst = 0
    for trial in range(1000):
        y = (rng.uniform(size=500) < rng.uniform(0.02, 0.5)).astype(np.int8)
        s = (rng.uniform(size=500) < rng.uniform(0.02, 0.5)).astype(np.int8)
        c = confusion_counts(y, s)
        tp = int(np.sum((y == 1) & (s == 1)))
        fp = int(np.sum((y == 0) & (s == 1)))
        fn = int(np.sum((y == 1) & (s == 0)))
        tn = int(np.sum((y == 0) & (s == 0)))
        assert (c.tp, c.fp, c.fn, c.tn) == (tp, fp, fn, tn)
        m = metrics_from_counts(c, pair="X", method="Y", lookback=1,
                                threshold_k=1.0)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = (2 * prec * rec / (prec + rec)) if prec + rec else 0.0
        assert m.precision == prec and m.recall == rec and m.f1 == f1
        worst = trial + 1
    print("criterion 2: confusion counts and metrics exact on %d random "
          "vectors of length 500" % worst)


def test_criterion_3_detector_recovery():
    X, y = planted_outlier_windows(n=2000, p=4, frac=0.05, radius=5.0,
                                   seed=0)
    recalls = {}
    for kind in DETECTION_METHODS:
        model = fit_detector(kind, X, 0.05, seed=0)
        flags = training_signal(model)
        recalls[kind] = float(np.sum(flags[y == 1])) / float(np.sum(y == 1))
    # exhaustive-search LOF reference on a small slice
    Xs = X[:200]
    ref_model = fit_detector("LOF", Xs, 0.05, seed=0)
    k = ref_model.hyperparams["k_neighbors"]
    D = np.sqrt(((Xs[:, None, :] - Xs[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(D, np.inf)
    kdist = np.sort(D, axis=1)[:, k - 1]
    nbrs = [np.nonzero(D[i] <= kdist[i])[0] for i in range(len(Xs))]
    lrd = np.array([1.0 / np.mean(np.maximum(kdist[nb], D[i, nb]))
                    for i, nb in enumerate(nbrs)])
    ref = np.array([np.mean(lrd[nbrs[i]]) / lrd[i] for i in range(len(Xs))])
    lof_err = float(np.max(np.abs(ref_model.train_scores - ref)))
    print("criterion 3: planted-outlier recall RC=%.3f LOF=%.3f PKDE=%.3f "
          "(floor 0.9); LOF vs exhaustive reference max|diff|=%.2e"
          % (recalls["RC"], recalls["LOF"], recalls["PKDE"], lof_err))
    for kind, rec in recalls.items():
        assert rec >= 0.9, "%s recall %.3f" % (kind, rec)
    assert lof_err <= 1e-9


def _group_mean_recall(table, methods):
    vals = [r.metrics.recall for r in table.results
            if r.cell.method in methods]
    return float(np.mean(vals))


def test_criterion_4_detector_recall_dominance(eurusd_grid):
    table = eurusd_grid["table"]
    det = _group_mean_recall(table, DETECTION_METHODS)
    cls = _group_mean_recall(table, CLASSIFICATION_METHODS)
    reg = _group_mean_recall(table, REGRESSION_METHODS)
    print("criterion 4: mean test recall detectors=%.3f classifiers=%.3f "
          "regressors=%.3f over %d lookbacks x %d thresholds (%s)"
          % (det, cls, reg, len(LOOKBACKS), len(THRESHOLDS),
             eurusd_grid["source"]))
    assert det > cls
    assert det > reg


def test_criterion_5_recall_improves_with_threshold(eurusd_grid):
    # Rising recall at higher thresholds is a sequencing property of real
    # FX history: the dominant crisis era sits in the front 70% of the
    # sample, so the flag budget (train label rate) stays generous at high
    # k while the few test-period extremes cluster in episodes the
    # train-calibrated cutoff still catches. Stationary surrogates invert
    # the trend: their extreme days are driven by the innovation term and
    # are invisible to the preceding window, so recall tracks the
    # shrinking budget instead (the ranking itself sharpens with k: on
    # the bundled surrogate the detectors sit at ~90% of the budget
    # ceiling at k=2.5 vs ~65% at k=1.0). Expect a failure here on the
    # synthetic stand-in; supply a real multi-crisis data/EURUSD.csv to
    # evaluate the property this test is about.
    table = eurusd_grid["table"]
    rows = sorted(((r.cell.threshold_k, r.metrics.recall)
                   for r in table.results
                   if r.cell.method == "PKDE" and r.cell.lookback == 30))
    ks = [k for k, _ in rows]
    recalls = [v for _, v in rows]
    rho = float(spearmanr(ks, recalls).statistic)
    print("criterion 5: PKDE p=30 recall by threshold %s -> spearman "
          "rho=%.3f (%s)" % (["%.2f" % v for v in recalls], rho,
                             eurusd_grid["source"]))
    assert rho > 0.0


def test_criterion_6_gradient_checks():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(10, 5))
    y_cont = rng.normal(size=10)
    y_bin = (rng.uniform(size=10) < 0.5).astype(np.float64)
    params = _mlp.init_mlp(5, hidden=_mlp.DEFAULT_HIDDEN, seed=6)
    err_mse = _mlp.gradient_check(params, X, y_cont, "mse", step=1e-5)
    err_bce = _mlp.gradient_check(params, X, y_bin, "bce", step=1e-5)
    print("criterion 6: worst relative gradient error mse=%.2e bce=%.2e "
          "(bound 1e-3, %d parameters)" % (
              err_mse, err_bce,
              params.W1.size + params.b1.size + params.W2.size + 1))
    assert err_mse < 1e-3
    assert err_bce < 1e-3


def test_criterion_7_smo_convergence():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(200, 4))
    X[100:] += 4.0
    y = np.zeros(200, dtype=np.int8)
    y[100:] = 1
    perm = rng.permutation(200)
    X, y = X[perm], y[perm]
    model = fit_classifier("SVC", X, y, seed=7)
    acc = float(np.mean(predict_labels(model, X) == y))
    kkt = model.state.kkt_violation
    gap = model.state.dual_gap
    print("criterion 7: separable 200-sample SVC kkt=%.2e (<1e-3) "
          "|sum alpha_i y_i|=%.2e (<=1e-8) train accuracy %.3f" % (
              kkt, gap, acc))
    assert kkt < 1e-3
    assert gap <= 1e-8
    assert acc == 1.0


def test_criterion_8_byte_identical_runs(tmp_path):
    data = tmp_path / "EURUSD.csv"
    write_price_csv(data, synthetic_price_series("EURUSD", n_days=900,
                                                 seed=3))
    def cfg(workers):
        return ExperimentConfig(
            pairs=("EURUSD",), data_paths={"EURUSD": str(data)},
            lookbacks=(7, 14), thresholds=(1.5, 2.0), methods=ALL_METHODS,
            seed=11, workers=workers, out_dir=str(tmp_path))
    blobs = {}
    for name, workers in (("serial_a", 1), ("serial_b", 1), ("pool", 2)):
        out = tmp_path / name
        write_results(run_grid(cfg(workers)), str(out), cfg(workers))
        blobs[name] = (out / "results.csv").read_bytes()
    print("criterion 8: results.csv identical across repeated serial and "
          "2-worker runs, %d cells, %d bytes"
          % (2 * 2 * len(ALL_METHODS), len(blobs["serial_a"])))
    assert blobs["serial_a"] == blobs["serial_b"]
    assert blobs["serial_a"] == blobs["pool"]


def test_criterion_9_desk_scale_runtime(eurusd_grid):
    # measured serial cost of the one-pair grid, scaled to 4 pairs and
    # divided across 8 cores (cells are independent, so the pool scales)
    elapsed = eurusd_grid["elapsed"]
    n_cells = eurusd_grid["n_cells"]
    full_cells = 4 * len(LOOKBACKS) * len(THRESHOLDS) * len(ALL_METHODS)
    est = elapsed * (full_cells / n_cells) / 8.0
    print("criterion 9: %d cells in %.0fs serial -> full %d-cell grid "
          "est. %.1f min on 8 cores (bound 30, %s)"
          % (n_cells, elapsed, full_cells, est / 60.0,
             eurusd_grid["source"]))
    assert est < 30.0 * 60.0
