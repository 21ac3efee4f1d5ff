"""Continuous-target models over return windows: OLS, SVR and NNR.

All three predict the next-day return from the p previous returns. A
continuous prediction becomes a significance signal when its magnitude
clears the k*sigma cut (`regression_to_signal`); that decision rule is a
config-visible choice (`regression_rule = abs_threshold`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from sigfx import _mlp, _svm
from sigfx._serialize import jsonable

KINDS = ("OLS", "SVR", "NNR")

_OLS_RIDGE = 1e-10


@dataclass(frozen=True)
class RegressorModel:
    kind: str
    lookback: int
    seed: int
    hyperparams: dict
    state: Any


def _check_train(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != len(y):
        raise ValueError("X must be (n, p) with y of length n")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError("empty training data")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite training values")
    return X, y


def _fit_ols(X, y):
    n, p = X.shape
    A = np.hstack([np.ones((n, 1)), X])
    # tiny ridge on the slope block only; keeps collinear lag columns from
    # blowing up the solve while leaving the intercept free
    aug = np.hstack([np.zeros((p, 1)), np.sqrt(_OLS_RIDGE) * np.eye(p)])
    w, *_ = np.linalg.lstsq(np.vstack([A, aug]),
                            np.concatenate([y, np.zeros(p)]), rcond=None)
    return {"intercept": float(w[0]), "coef": w[1:].copy()}


def fit_regressor(kind, X, y_cont, seed=0, **overrides):
    """Fit one of OLS, SVR, NNR on continuous targets.

    Keyword overrides replace the per-kind defaults (C, eps, gamma for
    SVR; hidden, lr, epochs, batch for NNR).
    """
    kind = str(kind).upper()
    X, y = _check_train(X, y_cont)
    seed = int(seed)
    if kind == "OLS":
        hp = {}
        state = _fit_ols(X, y)
    elif kind == "SVR":
        hp = {"C": _svm.DEFAULT_C, "eps": _svm.DEFAULT_EPS, "gamma": None,
              "tol": _svm.DEFAULT_TOL, "max_passes": _svm.DEFAULT_MAX_PASSES}
        hp.update(overrides)
        state = _svm.fit_svr(X, y, C=hp["C"], eps=hp["eps"],
                             gamma=hp["gamma"], tol=hp["tol"],
                             max_passes=hp["max_passes"])
        hp["gamma"] = state.gamma
    elif kind == "NNR":
        hp = {"hidden": _mlp.DEFAULT_HIDDEN, "lr": _mlp.DEFAULT_LR,
              "epochs": _mlp.DEFAULT_EPOCHS, "batch": _mlp.DEFAULT_BATCH}
        hp.update(overrides)
        params, curve = _mlp.train_mlp(
            X, y, "mse", hidden=hp["hidden"], lr=hp["lr"],
            epochs=hp["epochs"], batch=hp["batch"], seed=seed)
        state = {"params": params, "loss_curve": curve}
    else:
        raise ValueError("unknown regressor kind %r, expected one of %s"
                         % (kind, "/".join(KINDS)))
    return RegressorModel(kind=kind, lookback=X.shape[1], seed=seed,
                          hyperparams=hp, state=state)


def predict_returns(model, X):
    """Continuous next-day return predictions for each window row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.lookback:
        raise ValueError("expected shape (m, %d), got %r"
                         % (model.lookback, X.shape))
    if model.kind == "OLS":
        return X @ model.state["coef"] + model.state["intercept"]
    if model.kind == "SVR":
        return model.state.decision_values(X)
    if model.kind == "NNR":
        return _mlp.mlp_logits(model.state["params"], X)
    raise ValueError("unknown regressor kind %r" % model.kind)


def regression_to_signal(preds, thr):
    """1 where |prediction| clears the threshold cut, else 0."""
    preds = np.asarray(preds, dtype=np.float64)
    return (np.abs(preds) > thr.cut).astype(np.int8)


def dump_model_json(model, path):
    """Write kind, hyperparameters and fitted parameters for audits."""
    doc = {"kind": model.kind, "lookback": model.lookback,
           "seed": model.seed, "hyperparams": jsonable(model.hyperparams),
           "parameters": jsonable(model.state)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
