"""Binary classifiers over return windows: RF, SVC and NNC.

Trained directly on the thresholded significance labels. Every tie in a
decision (forest vote split, kernel decision value exactly 0, sigmoid
probability exactly 0.5) resolves to class 0, the majority "normal" side.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from sigfx import _mlp, _svm, _tree
from sigfx._serialize import jsonable

log = logging.getLogger(__name__)

KINDS = ("RF", "SVC", "NNC")


@dataclass(frozen=True)
class ClassifierModel:
    kind: str
    lookback: int
    seed: int
    hyperparams: dict
    state: Any


def _check_train(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != len(y):
        raise ValueError("X must be (n, p) with y of length n")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError("empty training data")
    if not np.isfinite(X).all():
        raise ValueError("non-finite training values")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return X, y.astype(np.int8)


def fit_classifier(kind, X, y_bin, seed=0, **overrides):
    """Fit one of RF, SVC, NNC on binary labels.

    Single-class training data degrades RF and NNC to a constant
    predictor with a logged warning; SVC has no margin to fit and raises.
    """
    kind = str(kind).upper()
    X, y = _check_train(X, y_bin)
    seed = int(seed)
    single = len(np.unique(y)) == 1
    if kind == "RF":
        hp = {"n_trees": 100, "max_features": "sqrt", "bootstrap": True,
              "min_samples_split": 2}
        hp.update(overrides)
        if single:
            state = _constant_state(kind, y)
        else:
            state = _tree.fit_forest(X, y, seed=seed, **hp)
    elif kind == "SVC":
        if single:
            raise ValueError(
                "training labels hold a single class; a margin classifier "
                "needs both")
        hp = {"C": _svm.DEFAULT_C, "gamma": None, "tol": _svm.DEFAULT_TOL,
              "max_passes": _svm.DEFAULT_MAX_PASSES}
        hp.update(overrides)
        y_pm = y.astype(np.float64) * 2.0 - 1.0
        state = _svm.fit_svc(X, y_pm, C=hp["C"], gamma=hp["gamma"],
                             tol=hp["tol"], max_passes=hp["max_passes"])
        hp["gamma"] = state.gamma
    elif kind == "NNC":
        hp = {"hidden": _mlp.DEFAULT_HIDDEN, "lr": _mlp.DEFAULT_LR,
              "epochs": _mlp.DEFAULT_EPOCHS, "batch": _mlp.DEFAULT_BATCH}
        hp.update(overrides)
        if single:
            state = _constant_state(kind, y)
        else:
            params, curve = _mlp.train_mlp(
                X, y.astype(np.float64), "bce", hidden=hp["hidden"],
                lr=hp["lr"], epochs=hp["epochs"], batch=hp["batch"],
                seed=seed)
            state = {"params": params, "loss_curve": curve}
    else:
        raise ValueError("unknown classifier kind %r, expected one of %s"
                         % (kind, "/".join(KINDS)))
    return ClassifierModel(kind=kind, lookback=X.shape[1], seed=seed,
                           hyperparams=hp, state=state)


def _constant_state(kind, y):
    label = int(y[0])
    log.warning("%s training labels are all %d; fitting a constant "
                "predictor", kind, label)
    return {"constant": label}


def _check_query(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.lookback:
        raise ValueError("expected shape (m, %d), got %r"
                         % (model.lookback, X.shape))
    return X


def predict_scores(model, X):
    """Continuous class-1 score per row: forest vote share, kernel
    decision value, or sigmoid probability."""
    X = _check_query(model, X)
    if isinstance(model.state, dict) and "constant" in model.state:
        return np.full(len(X), float(model.state["constant"]))
    if model.kind == "RF":
        return _tree.forest_vote_fraction(model.state, X)
    if model.kind == "SVC":
        return model.state.decision_values(X)
    if model.kind == "NNC":
        p = _mlp.sigmoid(_mlp.mlp_logits(model.state["params"], X))
        # the logistic map is strictly inside (0, 1); keep that contract
        # where float64 rounding would saturate the ends
        return np.clip(p, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    raise ValueError("unknown classifier kind %r" % model.kind)


def predict_labels(model, X):
    """Binary predictions; every tied decision resolves to 0."""
    X = _check_query(model, X)
    if isinstance(model.state, dict) and "constant" in model.state:
        return np.full(len(X), model.state["constant"], dtype=np.int8)
    scores = predict_scores(model, X)
    if model.kind == "SVC":
        return (scores > 0.0).astype(np.int8)
    return (scores > 0.5).astype(np.int8)


def dump_model_json(model, path):
    """Write kind, hyperparameters and fitted parameters for audits."""
    doc = {"kind": model.kind, "lookback": model.lookback,
           "seed": model.seed, "hyperparams": jsonable(model.hyperparams),
           "parameters": jsonable(model.state)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
