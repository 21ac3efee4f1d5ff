"""Grid expansion, per-cell execution, result persistence and reports.

Cells are independent: each carries its own derived seed, so serial and
parallel execution produce identical bytes.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._backend import backend_name
from ._version import __version__
from .classifiers import fit_classifier, predict_labels
from .config import (CLASSIFICATION_METHODS, DETECTION_METHODS,
                     REGRESSION_METHODS, ExperimentConfig, config_digest)
from .dataset import ThresholdSpec, WindowSpec, make_labeled_dataset, temporal_split
from .evaluation import MetricsRecord, confusion_counts, metrics_from_counts
from .market_data import compute_returns, load_price_csv, return_sigma
from .outlier_detectors import fit_detector, score_windows, scores_to_signal, write_score_dump
from .regressors import fit_regressor, predict_returns, regression_to_signal
from .rsi_benchmark import RsiState, rsi_signal

__all__ = [
    "CellSpec",
    "CellResult",
    "ResultsTable",
    "cell_seed",
    "expand_grid",
    "run_experiment_cell",
    "run_grid",
    "write_results",
    "emit_report",
]

RESULTS_HEADER = "pair,method,lookback,threshold_k,tp,fp,fn,tn,precision,recall,f1,status"


@dataclass(frozen=True)
class CellSpec:
    index: int
    pair: str
    method: str
    lookback: int
    threshold_k: float
    seed: int


@dataclass(frozen=True)
class CellResult:
    cell: CellSpec
    metrics: MetricsRecord | None
    error: str | None

    @property
    def ok(self):
        return self.error is None


@dataclass(frozen=True)
class ResultsTable:
    results: tuple
    seed: int
    digest: str

    @property
    def n_failed(self):
        return sum(1 for r in self.results if not r.ok)


def cell_seed(master_seed, pair, p, k, method):
    """Order-independent 64-bit seed for one grid cell."""
    tag = "%s|%s|p=%d|k=%g|%s" % (int(master_seed), pair, p, k, method)
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")


def expand_grid(cfg):
    """Cell descriptors in deterministic (pair, lookback, threshold, method)
    product order."""
    cells = []
    for pair in cfg.pairs:
        for p in cfg.lookbacks:
            for k in cfg.thresholds:
                for m in cfg.methods:
                    cells.append(CellSpec(
                        index=len(cells), pair=pair, method=m, lookback=p,
                        threshold_k=k,
                        seed=cell_seed(cfg.seed, pair, p, k, m)))
    return cells


# per-process cache of loaded series, keyed by (path, pair)
_MARKET = {}


def _load_pair(cfg, pair):
    key = (cfg.path_for(pair), pair)
    if key not in _MARKET:
        prices = load_price_csv(key[0], pair)
        _MARKET[key] = (prices, compute_returns(prices))
    return _MARKET[key]


def _standardized(train_X, other_X):
    mu = train_X.mean(axis=0)
    sd = train_X.std(axis=0)
    sd = np.where(sd < 1e-12, 1.0, sd)
    return (train_X - mu) / sd, (other_X - mu) / sd


def _clamped_rate(y_bin):
    n = len(y_bin)
    rate = float(np.mean(y_bin))
    return min(max(rate, 1.0 / n), 1.0 - 1.0 / n)


def _method_params(cfg, method):
    return dict(cfg.method_params.get(method, {}))


def run_experiment_cell(cell, cfg):
    """Full pipeline for one cell; failures are captured, not raised."""
    try:
        return CellResult(cell=cell, metrics=_run_cell(cell, cfg), error=None)
    except Exception as exc:
        msg = str(exc) or exc.__class__.__name__
        msg = msg.replace("\n", " ").replace(",", ";")
        return CellResult(cell=cell, metrics=None, error=msg)


def _run_cell(cell, cfg):
    prices, returns = _load_pair(cfg, cell.pair)
    p, k, method = cell.lookback, cell.threshold_k, cell.method
    n_windows = len(returns) - p
    if n_windows < 2:
        raise ValueError("series too short for lookback %d" % p)
    cut = int(math.floor(cfg.split_ratio * n_windows))
    if cfg.sigma_scope == "train":
        sigma = return_sigma(returns.returns[:p + cut])
    else:
        sigma = return_sigma(returns)
    thr = ThresholdSpec(k=k, sigma=sigma)
    ds = make_labeled_dataset(returns, WindowSpec(p), thr)
    split = temporal_split(ds, cfg.split_ratio)
    train, test = split.train, split.test
    X_train, X_test = train.X, test.X
    if cfg.standardize and method != "RSI":
        X_train, X_test = _standardized(X_train, X_test)
    params = _method_params(cfg, method)

    if method in REGRESSION_METHODS:
        model = fit_regressor(method, X_train, train.y_cont, seed=cell.seed,
                              **params)
        signal = regression_to_signal(predict_returns(model, X_test), thr)
    elif method in CLASSIFICATION_METHODS:
        model = fit_classifier(method, X_train, train.y_bin, seed=cell.seed,
                               **params)
        signal = predict_labels(model, X_test)
    elif method in DETECTION_METHODS:
        q = cfg.contamination
        if q is None:
            q = _clamped_rate(train.y_bin)
        model = fit_detector(method, X_train, q, seed=cell.seed, **params)
        scores = score_windows(model, X_test)
        signal = scores_to_signal(scores, model)
        if cfg.dump_scores:
            sdir = os.path.join(cfg.out_dir, "scores")
            os.makedirs(sdir, exist_ok=True)
            name = "scores_%s_%s_p%d_k%g.csv" % (cell.pair, method, p, k)
            write_score_dump(os.path.join(sdir, name),
                             [d.isoformat() for d in test.dates],
                             scores, model, signal)
    elif method == "RSI":
        state = RsiState(lookback=p, upper=params.get("upper", 70.0),
                         lower=params.get("lower", 30.0))
        full_signal = rsi_signal(prices, state, WindowSpec(p),
                                 crossing=cfg.rsi_mode == "crossing")
        signal = full_signal[cut:]
    else:
        raise ValueError("unknown method %r" % method)

    counts = confusion_counts(test.y_bin, signal)
    return metrics_from_counts(counts, pair=cell.pair, method=method,
                               lookback=p, threshold_k=k)


_POOL_CFG = None


def _pool_init(cfg):
    global _POOL_CFG
    _POOL_CFG = cfg


def _pool_run(cell):
    return run_experiment_cell(cell, _POOL_CFG)


def run_grid(cfg, cells=None):
    """Execute every cell (serial or process pool) into a ResultsTable."""
    if cells is None:
        cells = expand_grid(cfg)
    if cfg.workers == 1:
        results = [run_experiment_cell(c, cfg) for c in cells]
    else:
        chunk = max(1, len(cells) // (cfg.workers * 4))
        with ProcessPoolExecutor(max_workers=cfg.workers,
                                 initializer=_pool_init,
                                 initargs=(cfg,)) as pool:
            results = list(pool.map(_pool_run, cells, chunksize=chunk))
    return ResultsTable(results=tuple(results), seed=cfg.seed,
                        digest=config_digest(cfg))


def _fmt_row(res):
    c = res.cell
    head = "%s,%s,%d,%g" % (c.pair, c.method, c.lookback, c.threshold_k)
    if res.ok:
        m = res.metrics
        n = m.counts
        return "%s,%d,%d,%d,%d,%.6f,%.6f,%.6f,ok" % (
            head, n.tp, n.fp, n.fn, n.tn, m.precision, m.recall, m.f1)
    return "%s,,,,,,,,error:%s" % (head, res.error)


def write_results(table, out_dir, cfg=None):
    """results.csv in grid order plus run_meta.json."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "results.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for res in table.results:
            fh.write(_fmt_row(res) + "\n")
    meta = {
        "artifact_version": __version__,
        "backend": backend_name(),
        "config_digest": table.digest,
        "master_seed": table.seed,
        "n_cells": len(table.results),
        "n_failed": table.n_failed,
        "written_at": dt.datetime.now(dt.timezone.utc).isoformat(),
    }
    if cfg is not None:
        meta["config"] = asdict(cfg)
    with open(os.path.join(out_dir, "run_meta.json"), "w",
              encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")
    return path


def emit_report(table, out_dir):
    """Per (pair, lookback) F1 and recall tables, thresholds ascending,
    one column per method present in the run."""
    os.makedirs(out_dir, exist_ok=True)
    by_pl = {}
    for res in table.results:
        c = res.cell
        by_pl.setdefault((c.pair, c.lookback), []).append(res)
    paths = []
    for (pair, p), group in sorted(by_pl.items()):
        methods = []
        for res in group:
            if res.cell.method not in methods:
                methods.append(res.cell.method)
        ks = sorted({res.cell.threshold_k for res in group})
        value = {}
        for res in group:
            if res.ok:
                value[(res.cell.threshold_k, res.cell.method)] = res.metrics
        for metric in ("f1", "recall"):
            path = os.path.join(out_dir, "%s_%s_%d.csv" % (metric, pair, p))
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("k," + ",".join(methods) + "\n")
                for k in ks:
                    row = ["%g" % k]
                    for m in methods:
                        rec = value.get((k, m))
                        row.append("" if rec is None
                                   else "%.6f" % getattr(rec, metric))
                    fh.write(",".join(row) + "\n")
            paths.append(path)
    return paths
