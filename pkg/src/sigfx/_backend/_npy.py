"""NumPy fallback implementations of the hot kernels.

These are the reference semantics for the compiled extension in `_ck.pyx`:
every floating-point expression here is mirrored operation-for-operation in
the Cython source so both backends produce bit-identical results. Change one
side only together with the other.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_STEP_EPS = 1e-12


# ---------------------------------------------------------------------------
# SMO for the soft-margin RBF classifier
# ---------------------------------------------------------------------------

def smo_classifier(K, y, C, tol, max_passes):
    """Train a kernel SVM dual by sequential minimal optimization.

    K is the precomputed (n, n) kernel matrix, y holds labels in {-1, +1}.
    Returns (alpha, b, error_cache, n_updates); the error cache holds
    f(x_i) - y_i at the final iterate.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    E = -y.copy()  # f(x_i) - y_i with all-zero alpha and b = 0
    state = {"b": b, "updates": 0}

    def take_step(i, j):
        if i == j:
            return False
        ai, aj = alpha[i], alpha[j]
        yi, yj = y[i], y[j]
        Ei, Ej = E[i], E[j]
        s = yi * yj
        if s > 0.0:
            L = max(0.0, ai + aj - C)
            H = min(C, ai + aj)
        else:
            L = max(0.0, aj - ai)
            H = min(C, C + aj - ai)
        if L == H:
            return False
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta > _STEP_EPS:
            aj_new = aj + yj * (Ei - Ej) / eta
            if aj_new < L:
                aj_new = L
            elif aj_new > H:
                aj_new = H
        else:
            # degenerate curvature (duplicate rows): test both interval ends
            g = -(yj * (Ei - Ej))
            obj_L = g * (L - aj) + 0.5 * eta * (L - aj) * (L - aj)
            obj_H = g * (H - aj) + 0.5 * eta * (H - aj) * (H - aj)
            if obj_L < obj_H - _STEP_EPS:
                aj_new = L
            elif obj_H < obj_L - _STEP_EPS:
                aj_new = H
            else:
                return False
        if abs(aj_new - aj) < _STEP_EPS * (aj_new + aj + _STEP_EPS):
            return False
        ai_new = ai + s * (aj - aj_new)
        da_i = yi * (ai_new - ai)
        da_j = yj * (aj_new - aj)
        b_old = state["b"]
        b1 = b_old - Ei - da_i * K[i, i] - da_j * K[i, j]
        b2 = b_old - Ej - da_i * K[i, j] - da_j * K[j, j]
        if 0.0 < ai_new < C:
            b_new = b1
        elif 0.0 < aj_new < C:
            b_new = b2
        else:
            b_new = (b1 + b2) * 0.5
        db = b_new - b_old
        # mirrored in C as ((E + da_i*K[i]) + da_j*K[j]) + db per element
        E[:] = ((E + da_i * K[i, :]) + da_j * K[j, :]) + db
        alpha[i] = ai_new
        alpha[j] = aj_new
        state["b"] = b_new
        state["updates"] += 1
        return True

    def violation(i):
        r = E[i] * y[i]
        v = 0.0
        if alpha[i] < C and -r > v:
            v = -r
        if alpha[i] > 0.0 and r > v:
            v = r
        return v

    def examine(i):
        if violation(i) <= tol:
            return False
        j = int(np.argmax(np.abs(E - E[i])))
        if take_step(i, j):
            return True
        nb = np.nonzero((alpha > 0.0) & (alpha < C))[0]
        for j in nb:
            if take_step(i, int(j)):
                return True
        for j in range(n):
            if take_step(i, j):
                return True
        return False

    examine_all = True
    passes = 0
    while passes < max_passes:
        changed = 0
        if examine_all:
            for i in range(n):
                changed += examine(i)
        else:
            for i in np.nonzero((alpha > 0.0) & (alpha < C))[0]:
                changed += examine(int(i))
        passes += 1
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    return alpha, state["b"], E, state["updates"]


# ---------------------------------------------------------------------------
# SMO for epsilon-insensitive regression (beta = alpha - alpha*)
# ---------------------------------------------------------------------------

def smo_regressor(K, y, C, eps, tol, max_passes):
    """SMO on the beta-parameterized SVR dual with sum(beta) = 0.

    Returns (beta, b, u, n_updates) where u = K @ beta at the final iterate.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    beta = np.zeros(n)
    u = np.zeros(n)  # K @ beta, maintained incrementally
    state = {"b": 0.0, "updates": 0}

    def violation(i):
        E = u[i] + state["b"] - y[i]
        bi = beta[i]
        if bi == C:
            return max(0.0, E + eps)
        if bi == -C:
            return max(0.0, eps - E)
        if bi == 0.0:
            return max(0.0, abs(E) - eps)
        if bi > 0.0:
            return abs(E + eps)
        return abs(E - eps)

    def take_step(i, j):
        if i == j:
            return False
        bi, bj = beta[i], beta[j]
        ssum = bi + bj
        lo = max(-C, ssum - C)
        hi = min(C, ssum + C)
        if hi - lo < _STEP_EPS:
            return False
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        Gi = u[i] - y[i]
        Gj = u[j] - y[j]
        # piecewise-quadratic 1-D problem: breakpoints where beta_i or beta_j
        # changes sign
        bounds = [lo, hi]
        if lo < 0.0 < hi:
            bounds.append(0.0)
        if lo < ssum < hi:
            bounds.append(ssum)
        bounds = sorted(set(bounds))
        cands = list(bounds)
        if eta > _STEP_EPS:
            for a, c in zip(bounds[:-1], bounds[1:]):
                mid = (a + c) * 0.5
                si = 1.0 if mid > 0.0 else (-1.0 if mid < 0.0 else 0.0)
                rem = ssum - mid
                sj = 1.0 if rem > 0.0 else (-1.0 if rem < 0.0 else 0.0)
                g = (Gi - Gj) + eps * (si - sj)
                cand = bi - g / eta
                if cand < a:
                    cand = a
                elif cand > c:
                    cand = c
                cands.append(cand)
        best_phi = 0.0
        best_cand = bi
        for cand in cands:
            d = cand - bi
            if d == 0.0:
                continue
            phi = (0.5 * eta * d * d + (Gi - Gj) * d
                   + eps * (abs(bi + d) - abs(bi))
                   + eps * (abs(bj - d) - abs(bj)))
            if phi < best_phi - 1e-14:
                best_phi = phi
                best_cand = cand
        d = best_cand - bi
        if d == 0.0:
            return False
        bi_new = best_cand
        bj_new = ssum - bi_new
        # mirrored in C as (u + d*K[i]) - d*K[j] per element
        u[:] = (u + d * K[i, :]) - d * K[j, :]
        beta[i] = bi_new
        beta[j] = bj_new
        if 0.0 < bi_new < C:
            state["b"] = y[i] - u[i] - eps
        elif -C < bi_new < 0.0:
            state["b"] = y[i] - u[i] + eps
        elif 0.0 < bj_new < C:
            state["b"] = y[j] - u[j] - eps
        elif -C < bj_new < 0.0:
            state["b"] = y[j] - u[j] + eps
        state["updates"] += 1
        return True

    def examine(i):
        if violation(i) <= tol:
            return False
        G = u - y
        j = int(np.argmax(np.abs(G - G[i])))
        if take_step(i, j):
            return True
        active = np.nonzero(beta != 0.0)[0]
        for j in active:
            if take_step(i, int(j)):
                return True
        for j in range(n):
            if take_step(i, j):
                return True
        return False

    examine_all = True
    passes = 0
    while passes < max_passes:
        changed = 0
        if examine_all:
            for i in range(n):
                changed += examine(i)
        else:
            for i in np.nonzero(beta != 0.0)[0]:
                changed += examine(int(i))
        passes += 1
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    return beta, state["b"], u, state["updates"]


# ---------------------------------------------------------------------------
# CART best-split scan
# ---------------------------------------------------------------------------

def best_split(values, positives):
    """Best Gini split over pre-sorted candidate features.

    values, positives: (n_features, m) arrays, each row sorted ascending by
    value with class indicators (0.0/1.0) aligned. Returns
    (feature_index, split_position, threshold, weighted_gini); feature_index
    is -1 when no feature admits a split.
    """
    values = np.asarray(values, dtype=np.float64)
    positives = np.asarray(positives, dtype=np.float64)
    f, m = values.shape
    if m < 2:
        return -1, -1, 0.0, np.inf
    best = (np.inf, -1, -1, 0.0)
    md = float(m)
    nl = np.arange(1, m, dtype=np.float64)
    nr = md - nl
    for fi in range(f):
        v = values[fi]
        cand = v[1:] > v[:-1]
        if not cand.any():
            continue
        pl = np.cumsum(positives[fi])[:-1]
        pr = pl[-1] + positives[fi][-1] - pl
        a = pl / nl
        bq = (nl - pl) / nl
        gl = 1.0 - (a * a + bq * bq)
        c = pr / nr
        dq = (nr - pr) / nr
        gr = 1.0 - (c * c + dq * dq)
        w = (nl * gl + nr * gr) / md
        w = np.where(cand, w, np.inf)
        pos = int(np.argmin(w))
        if w[pos] < best[0]:
            thr = (v[pos] + v[pos + 1]) * 0.5
            best = (float(w[pos]), fi, pos, thr)
    if best[1] < 0:
        return -1, -1, 0.0, np.inf
    return best[1], best[2], best[3], best[0]
