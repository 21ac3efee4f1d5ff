"""Significant-move forecasting on daily FX log returns.

Builds lookback windows of log returns, labels days whose next return
exceeds a threshold of k sigma, and compares regression, classification
and outlier-detection forecasters against an RSI benchmark on F1 and
recall over a pair x lookback x threshold x method grid.
"""

from sigfx._backend import backend_name
from sigfx._version import __version__
from sigfx.classifiers import ClassifierModel, fit_classifier, predict_labels
from sigfx.config import (METHODS, ConfigError, ExperimentConfig, config_digest,
                          load_config)
from sigfx.dataset import (LabeledDataset, SplitDataset, ThresholdSpec,
                           WindowSpec, build_windows, label_significant,
                           make_labeled_dataset, temporal_split)
from sigfx.evaluation import (ConfusionCounts, MetricsRecord, confusion_counts,
                              metrics_from_counts)
from sigfx.market_data import (MarketDataError, PriceSeries, ReturnSeries,
                               compute_returns, load_price_csv, return_sigma)
from sigfx.outlier_detectors import (ContaminationRule, DetectorModel,
                                     fit_detector, score_windows,
                                     scores_to_signal, training_signal)
from sigfx.regressors import (RegressorModel, fit_regressor, predict_returns,
                              regression_to_signal)
from sigfx.rsi_benchmark import RsiState, compute_rsi, rsi_signal
from sigfx.runner import (CellSpec, ResultsTable, emit_report, expand_grid,
                          run_experiment_cell, run_grid, write_results)

__all__ = [
    "backend_name",
    "__version__",
    "METHODS",
    "ConfigError",
    "ExperimentConfig",
    "config_digest",
    "load_config",
    "PriceSeries",
    "ReturnSeries",
    "MarketDataError",
    "load_price_csv",
    "compute_returns",
    "return_sigma",
    "WindowSpec",
    "ThresholdSpec",
    "LabeledDataset",
    "SplitDataset",
    "build_windows",
    "label_significant",
    "make_labeled_dataset",
    "temporal_split",
    "RegressorModel",
    "fit_regressor",
    "predict_returns",
    "regression_to_signal",
    "ClassifierModel",
    "fit_classifier",
    "predict_labels",
    "ContaminationRule",
    "DetectorModel",
    "fit_detector",
    "score_windows",
    "scores_to_signal",
    "training_signal",
    "RsiState",
    "compute_rsi",
    "rsi_signal",
    "ConfusionCounts",
    "MetricsRecord",
    "confusion_counts",
    "metrics_from_counts",
    "CellSpec",
    "ResultsTable",
    "expand_grid",
    "run_experiment_cell",
    "run_grid",
    "write_results",
    "emit_report",
]
