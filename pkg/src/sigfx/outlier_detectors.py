"""Unsupervised window scoring: robust covariance, LOF and projected KDE.

Each detector is fitted on training windows only and turns test windows
into outlyingness scores (higher = more outlying for every kind). The
binary signal compares scores against a cutoff placed at the
(1-q)-quantile of the training scores, q being the assumed outlier
fraction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import logsumexp
from scipy.stats import chi2

from sigfx._serialize import jsonable

KINDS = ("RC", "LOF", "PKDE")

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ContaminationRule:
    """Assumed outlier fraction q in (0, 1) used to place the cutoff."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0 and math.isfinite(q)):
            raise ValueError("q must lie strictly between 0 and 1, got %r"
                             % (self.q,))
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class DetectorModel:
    kind: str
    lookback: int
    seed: int
    hyperparams: dict
    state: Any
    rule: ContaminationRule
    cutoff: float
    train_scores: np.ndarray


def training_cutoff(scores, q):
    """Smallest training score that the example convention maps q to.

    Sorted ascending, the cutoff sits at index floor((1-q)*n), clamped to
    the last score; for scores {1,2,3,4} at q = 0.5 that picks 3.
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    if n == 0:
        raise ValueError("no training scores")
    idx = min(n - 1, int(math.floor((1.0 - q) * n + 1e-9)))
    return float(np.sort(scores)[idx])


def _check_train(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D window matrix")
    if X.shape[0] < 10:
        raise ValueError("need at least 10 training windows, got %d"
                         % X.shape[0])
    if not np.isfinite(X).all():
        raise ValueError("non-finite training values")
    return X


def _pairwise_sq(A, B, block=256):
    """Squared distances accumulated feature-by-feature, in row blocks."""
    out = np.empty((A.shape[0], B.shape[0]))
    for s in range(0, A.shape[0], block):
        e = min(s + block, A.shape[0])
        D = np.zeros((e - s, B.shape[0]))
        for f in range(A.shape[1]):
            d = A[s:e, f, None] - B[None, :, f]
            D += d * d
        out[s:e] = D
    return out


# ---------------------------------------------------------------------------
# robust covariance (concentrated half-sample search)
# ---------------------------------------------------------------------------

def _ml_cov(Z):
    mu = Z.mean(axis=0)
    Xc = Z - mu
    return mu, (Xc.T @ Xc) / len(Z)


def _safe_inv(S):
    p = S.shape[0]
    ridge = 0.0
    for _ in range(8):
        try:
            M = S + ridge * np.eye(p)
            sign, logdet = np.linalg.slogdet(M)
            if sign > 0 and np.isfinite(logdet):
                return np.linalg.inv(M), logdet
        except np.linalg.LinAlgError:
            pass
        tr = float(np.trace(S)) / p
        ridge = max(ridge * 10.0, 1e-12 * (tr if tr > 0 else 1.0))
    raise ValueError("covariance is numerically singular even after "
                     "regularization; drop constant feature columns")


def _fit_mcd(X, seed, restarts, max_iter):
    n, p = X.shape
    h = math.ceil((n + p + 1) / 2)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0)))
    best = None
    for _ in range(restarts):
        subset = rng.choice(n, size=min(n, p + 1), replace=False)
        mu, S = _ml_cov(X[subset])
        support = np.sort(subset)
        for _ in range(max_iter):
            P, _ = _safe_inv(S)
            Xc = X - mu
            d2 = np.einsum("ij,jk,ik->i", Xc, P, Xc)
            new_support = np.sort(np.argsort(d2, kind="stable")[:h])
            if np.array_equal(new_support, support):
                break
            support = new_support
            mu, S = _ml_cov(X[support])
        _, logdet = _safe_inv(S)
        if best is None or logdet < best[0]:
            best = (logdet, mu, S)
    _, mu, S = best
    # half-sample scatter understates a clean cloud's spread; rescale so
    # Mahalanobis distances are on the plain-covariance scale
    frac = h / n
    c = frac / chi2.cdf(chi2.ppf(frac, p), p + 2)
    P, _ = _safe_inv(S * c)
    return {"location": mu, "precision": P, "support_size": h}


def _rc_scores(state, X):
    Xc = X - state["location"]
    d2 = np.einsum("ij,jk,ik->i", Xc, state["precision"], Xc)
    return np.sqrt(np.maximum(d2, 0.0))


# ---------------------------------------------------------------------------
# local outlier factor, novelty flavor
# ---------------------------------------------------------------------------

def _fit_lof(X, k):
    n = len(X)
    D = np.sqrt(_pairwise_sq(X, X))
    np.fill_diagonal(D, np.inf)
    k_dist = np.partition(D, k - 1, axis=1)[:, k - 1]
    lrd = np.empty(n)
    for i in range(n):
        nb = np.nonzero(D[i] <= k_dist[i])[0]
        reach = np.maximum(k_dist[nb], D[i, nb])
        mean_reach = reach.mean()
        lrd[i] = np.inf if mean_reach == 0.0 else 1.0 / mean_reach
    # in-sample factors: each row against its own (self-excluded)
    # neighborhood, the form the flag budget is applied to
    train_lof = np.empty(n)
    for i in range(n):
        nb = np.nonzero(D[i] <= k_dist[i])[0]
        if np.isinf(lrd[i]):
            train_lof[i] = 1.0 if np.isinf(lrd[nb]).any() else 0.0
        else:
            train_lof[i] = np.mean(lrd[nb]) / lrd[i]
    state = {"train": X, "k": k, "k_dist": k_dist, "lrd": lrd}
    return state, train_lof


def _lof_scores(state, X):
    train, k = state["train"], state["k"]
    k_dist, lrd = state["k_dist"], state["lrd"]
    D = np.sqrt(_pairwise_sq(X, train))
    out = np.empty(len(X))
    for i in range(len(X)):
        row = D[i]
        kd = np.partition(row, k - 1)[k - 1]
        nb = np.nonzero(row <= kd)[0]
        reach = np.maximum(k_dist[nb], row[nb])
        mean_reach = reach.mean()
        lrd_q = np.inf if mean_reach == 0.0 else 1.0 / mean_reach
        if np.isinf(lrd_q):
            # the query sits on a dense duplicate cluster: as local as
            # its neighbors, score by the limiting ratio 1
            out[i] = 1.0 if np.isinf(lrd[nb]).any() else 0.0
        else:
            out[i] = np.mean(lrd[nb]) / lrd_q
    return out


# ---------------------------------------------------------------------------
# projected kernel density
# ---------------------------------------------------------------------------

def _fit_pkde(X, var_ratio, bw_factor):
    n = len(X)
    mu = X.mean(axis=0)
    Xc = X - mu
    C = (Xc.T @ Xc) / (n - 1)
    evals, evecs = np.linalg.eigh(C)
    evals = np.maximum(evals[::-1], 0.0)
    evecs = evecs[:, ::-1]
    total = float(evals.sum())
    if not total > 0.0:
        raise ValueError("training windows have zero variance; drop "
                         "constant data or add jitter before fitting")
    ratios = np.cumsum(evals) / total
    d = min(int(np.searchsorted(ratios, var_ratio - 1e-12)) + 1, len(ratios))
    basis = np.ascontiguousarray(evecs[:, :d])
    Z = Xc @ basis
    h = np.empty(d)
    for j in range(d):
        sd = float(Z[:, j].std(ddof=1))
        iqr = float(np.percentile(Z[:, j], 75) - np.percentile(Z[:, j], 25))
        h[j] = bw_factor * min(sd, iqr / 1.34) * n ** (-0.2)
        if not h[j] > 0.0:
            raise ValueError(
                "kernel bandwidth is zero on projected dimension %d (no "
                "spread); drop degenerate columns or add jitter" % j)
    state = {"mean": mu, "basis": basis, "bandwidth": h, "train_z": Z,
             "explained": float(ratios[d - 1])}
    return state, -_loo_log_mean_density(Z, h)


def _loo_log_mean_density(Z, h, block=512):
    """Training-side density with the self kernel left out; keeping it in
    floors every isolated row at the same mass/n value and erases their
    ranking."""
    n = len(Z)
    log_norm = -float(np.sum(np.log(h))) - 0.5 * len(h) * _LOG_2PI
    out = np.empty(n)
    for s in range(0, n, block):
        e = min(s + block, n)
        L = np.zeros((e - s, n))
        for j in range(len(h)):
            d = (Z[s:e, j, None] - Z[None, :, j]) / h[j]
            L -= 0.5 * (d * d)
        L[np.arange(e - s), np.arange(s, e)] = -np.inf
        out[s:e] = logsumexp(L, axis=1)
    return out + (log_norm - math.log(n - 1))


def _pkde_log_mean_density(state, X, block=512):
    Z = (X - state["mean"]) @ state["basis"]
    T = state["train_z"]
    h = state["bandwidth"]
    n = len(T)
    log_norm = -float(np.sum(np.log(h))) - 0.5 * len(h) * _LOG_2PI
    out = np.empty(len(Z))
    for s in range(0, len(Z), block):
        e = min(s + block, len(Z))
        L = np.zeros((e - s, n))
        for j in range(len(h)):
            d = (Z[s:e, j, None] - T[None, :, j]) / h[j]
            L -= 0.5 * (d * d)
        out[s:e] = logsumexp(L, axis=1)
    return out + (log_norm - math.log(n))


def mean_kernel_density(state_or_model, X):
    """Raw mean Gaussian product-kernel density against the training
    cloud (may underflow to 0 far away; scores use the log form)."""
    state = getattr(state_or_model, "state", state_or_model)
    return np.exp(_pkde_log_mean_density(state, np.asarray(X, np.float64)))


def _pkde_scores(state, X):
    return -_pkde_log_mean_density(state, X)


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------

def fit_detector(kind, X_train, q, seed=0, **overrides):
    """Fit a detector and place its cutoff from the training scores.

    q is a ContaminationRule (a bare float in (0, 1) is accepted).
    Overrides: restarts/max_iter for RC, k_neighbors for LOF,
    var_ratio/bw_factor for PKDE.
    """
    kind = str(kind).upper()
    X = _check_train(X_train)
    rule = q if isinstance(q, ContaminationRule) else ContaminationRule(float(q))
    seed = int(seed)
    n = len(X)
    if kind == "RC":
        hp = {"restarts": 10, "max_iter": 50}
        hp.update(overrides)
        state = _fit_mcd(X, seed, hp["restarts"], hp["max_iter"])
        train_scores = _rc_scores(state, X)
    elif kind == "LOF":
        hp = {"k_neighbors": 20}
        hp.update(overrides)
        k = int(hp["k_neighbors"])
        if k >= n:
            k = n - 1
        if k < 1:
            raise ValueError("k_neighbors must be at least 1")
        hp["k_neighbors"] = k
        state, train_scores = _fit_lof(X, k)
    elif kind == "PKDE":
        hp = {"var_ratio": 0.90, "bw_factor": 0.9}
        hp.update(overrides)
        state, train_scores = _fit_pkde(X, float(hp["var_ratio"]),
                                        float(hp["bw_factor"]))
    else:
        raise ValueError("unknown detector kind %r, expected one of %s"
                         % (kind, "/".join(KINDS)))
    train_scores.setflags(write=False)
    cutoff = training_cutoff(train_scores, rule.q)
    return DetectorModel(kind=kind, lookback=X.shape[1], seed=seed,
                         hyperparams=hp, state=state, rule=rule,
                         cutoff=cutoff, train_scores=train_scores)


def score_windows(model, X):
    """Outlyingness score per row, higher = more outlying."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.lookback:
        raise ValueError("expected shape (m, %d), got %r"
                         % (model.lookback, X.shape))
    X = np.ascontiguousarray(X)
    if model.kind == "RC":
        return _rc_scores(model.state, X)
    if model.kind == "LOF":
        return _lof_scores(model.state, X)
    if model.kind == "PKDE":
        return _pkde_scores(model.state, X)
    raise ValueError("unknown detector kind %r" % model.kind)


def scores_to_signal(scores, model):
    """1 where the score clears the model's training cutoff."""
    scores = np.asarray(scores, dtype=np.float64)
    return (scores > model.cutoff).astype(np.int8)


def training_signal(model):
    """Flags over the fitted windows themselves (train-side decision)."""
    return scores_to_signal(model.train_scores, model)


def dump_model_json(model, path):
    """Write kind, hyperparameters, cutoff and fitted state for audits."""
    doc = {"kind": model.kind, "lookback": model.lookback,
           "seed": model.seed, "q": model.rule.q, "cutoff": model.cutoff,
           "hyperparams": jsonable(model.hyperparams),
           "parameters": jsonable(model.state)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def write_score_dump(path, dates, scores, model, signals=None):
    """Per-window score dump: date,score,cutoff,signal rows."""
    scores = np.asarray(scores, dtype=np.float64)
    if signals is None:
        signals = scores_to_signal(scores, model)
    if not (len(dates) == len(scores) == len(signals)):
        raise ValueError("dates, scores and signals must align")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,score,cutoff,signal\n")
        for d, s, g in zip(dates, scores, signals):
            fh.write("%s,%.9g,%.9g,%d\n" % (d, s, model.cutoff, g))
    return path
