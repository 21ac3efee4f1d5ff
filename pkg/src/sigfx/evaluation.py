"""Confusion counting and precision/recall/F1 for significance forecasts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ConfusionCounts", "MetricsRecord", "confusion_counts", "metrics_from_counts"]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsRecord:
    """Metrics for one grid cell; identity fields are filled by the runner."""

    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    pair: str = ""
    method: str = ""
    lookback: int = 0
    threshold_k: float = field(default=0.0)


def confusion_counts(y_true, y_pred) -> ConfusionCounts:
    """Exact tp/fp/fn/tn counts for two equal-length binary vectors."""
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(f"length mismatch: {t.shape} vs {p.shape}")
    for name, v in (("y_true", t), ("y_pred", p)):
        if not np.all((v == 0) | (v == 1)):
            raise ValueError(f"{name} has a non-binary entry")
    t = t.astype(bool)
    p = p.astype(bool)
    return ConfusionCounts(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        fn=int(np.sum(t & ~p)),
        tn=int(np.sum(~t & ~p)),
    )


def metrics_from_counts(c: ConfusionCounts, **identity) -> MetricsRecord:
    """Precision, recall, and F1 with the 0/0 -> 0 convention."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0
    denom = precision + recall
    f1 = 2.0 * precision * recall / denom if denom > 0 else 0.0
    return MetricsRecord(counts=c, precision=precision, recall=recall, f1=f1, **identity)
