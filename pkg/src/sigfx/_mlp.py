"""One-hidden-layer perceptron trained by mini-batch gradient descent.

Shared core for the regression (MSE) and classification (binary
cross-entropy) heads. Losses and gradients are computed from logits with
the usual stable forms; `gradient_check` compares the analytic gradient
against central finite differences for test use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_HIDDEN = 100
DEFAULT_LR = 1e-3
DEFAULT_EPOCHS = 200
DEFAULT_BATCH = 32


@dataclass
class MlpParams:
    W1: np.ndarray  # (p, hidden)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (hidden,)
    b2: float


def init_mlp(n_features, hidden=DEFAULT_HIDDEN, seed=0):
    """Normal initialization scaled by 1/sqrt(fan_in), zero biases."""
    rng = np.random.default_rng(seed)
    W1 = rng.normal(size=(n_features, hidden)) / np.sqrt(n_features)
    W2 = rng.normal(size=hidden) / np.sqrt(hidden)
    return MlpParams(W1=W1, b1=np.zeros(hidden), W2=W2, b2=0.0)


def mlp_logits(params, X):
    H = np.maximum(X @ params.W1 + params.b1, 0.0)
    return H @ params.W2 + params.b2


def sigmoid(z):
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def mlp_loss(params, X, y, loss):
    """Mean loss over the batch; loss is 'mse' or 'bce' (y in {0,1})."""
    z = mlp_logits(params, X)
    if loss == "mse":
        d = z - y
        return float(np.mean(d * d))
    if loss == "bce":
        # max(z,0) - z*y + log(1 + exp(-|z|)), exact and overflow-free
        return float(np.mean(np.maximum(z, 0.0) - z * y
                             + np.log1p(np.exp(-np.abs(z)))))
    raise ValueError("loss must be 'mse' or 'bce', got %r" % loss)


def mlp_gradients(params, X, y, loss):
    """Analytic gradient of the mean loss, same structure as the params."""
    A1 = X @ params.W1 + params.b1
    H = np.maximum(A1, 0.0)
    z = H @ params.W2 + params.b2
    n = len(y)
    if loss == "mse":
        dz = 2.0 * (z - y) / n
    elif loss == "bce":
        dz = (sigmoid(z) - y) / n
    else:
        raise ValueError("loss must be 'mse' or 'bce', got %r" % loss)
    gW2 = H.T @ dz
    gb2 = float(dz.sum())
    dH = np.outer(dz, params.W2)
    dH[A1 <= 0.0] = 0.0
    gW1 = X.T @ dH
    gb1 = dH.sum(axis=0)
    return MlpParams(W1=gW1, b1=gb1, W2=gW2, b2=gb2)


def train_mlp(X, y, loss, hidden=DEFAULT_HIDDEN, lr=DEFAULT_LR,
              epochs=DEFAULT_EPOCHS, batch=DEFAULT_BATCH, seed=0):
    """Mini-batch training with adaptive moment estimation.

    Batches are reshuffled every epoch from a seeded stream; the update
    uses bias-corrected first/second gradient moments (0.9 / 0.999,
    denominator guard 1e-8), the lr 1e-3 default belongs to that rule.
    Returns (params, per-epoch mean batch loss).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    params = init_mlp(X.shape[1], hidden=hidden, seed=seed)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    b1m, b2m, guard = 0.9, 0.999, 1e-8
    m = MlpParams(W1=np.zeros_like(params.W1), b1=np.zeros_like(params.b1),
                  W2=np.zeros_like(params.W2), b2=0.0)
    v = MlpParams(W1=np.zeros_like(params.W1), b1=np.zeros_like(params.b1),
                  W2=np.zeros_like(params.W2), b2=0.0)
    t = 0
    curve = []
    for _ in range(epochs):
        order = rng.permutation(n)
        losses = []
        for s in range(0, n, batch):
            rows = order[s:s + batch]
            Xb, yb = X[rows], y[rows]
            losses.append(mlp_loss(params, Xb, yb, loss))
            g = mlp_gradients(params, Xb, yb, loss)
            t += 1
            c1 = 1.0 - b1m ** t
            c2 = 1.0 - b2m ** t
            for name in ("W1", "b1", "W2", "b2"):
                gp = getattr(g, name)
                mp = b1m * getattr(m, name) + (1.0 - b1m) * gp
                vp = b2m * getattr(v, name) + (1.0 - b2m) * gp * gp
                setattr(m, name, mp)
                setattr(v, name, vp)
                upd = lr * (mp / c1) / (np.sqrt(vp / c2) + guard)
                setattr(params, name, getattr(params, name) - upd)
        curve.append(float(np.mean(losses)))
    for a in (params.W1, params.b1, params.W2):
        a.setflags(write=False)
    return params, tuple(curve)


def gradient_check(params, X, y, loss, step=1e-5):
    """Worst relative error between analytic and central-difference grads.

    Relative error per coordinate is |a - fd| / max(|a|, |fd|, 1e-6); the
    floor keeps finite-difference noise on true-zero gradients from
    registering as disagreement. Works on a copy, params are untouched.
    """
    work = MlpParams(W1=params.W1.copy(), b1=params.b1.copy(),
                     W2=params.W2.copy(), b2=float(params.b2))
    g = mlp_gradients(work, X, y, loss)
    worst = 0.0
    for arr, ga in ((work.W1, g.W1), (work.b1, g.b1), (work.W2, g.W2)):
        flat = arr.reshape(-1)
        gflat = ga.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            up = mlp_loss(work, X, y, loss)
            flat[i] = keep - step
            dn = mlp_loss(work, X, y, loss)
            flat[i] = keep
            fd = (up - dn) / (2.0 * step)
            a = gflat[i]
            worst = max(worst, abs(a - fd) / max(abs(a), abs(fd), 1e-6))
    keep = work.b2
    work.b2 = keep + step
    up = mlp_loss(work, X, y, loss)
    work.b2 = keep - step
    dn = mlp_loss(work, X, y, loss)
    work.b2 = keep
    fd = (up - dn) / (2.0 * step)
    worst = max(worst, abs(g.b2 - fd) / max(abs(g.b2), abs(fd), 1e-6))
    return worst
