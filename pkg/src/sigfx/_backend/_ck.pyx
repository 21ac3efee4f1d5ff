# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the NumPy kernels in `_npy.py`.

Every floating-point expression mirrors `_npy.py` operation-for-operation
(same order, no fused multiply-add) so both backends are bit-identical.
Keep the two files in lockstep.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double STEP_EPS = 1e-12


# ---------------------------------------------------------------------------
# SMO for the soft-margin RBF classifier
# ---------------------------------------------------------------------------

cdef struct ClsState:
    double b
    long updates

cdef bint _cls_take_step(double[:, ::1] K, double[::1] y, double[::1] alpha,
                         double[::1] E, ClsState* st, double C,
                         Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef double ai, aj, yi, yj, Ei, Ej, s, L, H, eta, aj_new, ai_new
    cdef double g, obj_L, obj_H, da_i, da_j, b1, b2, b_new, db
    cdef Py_ssize_t t, n = y.shape[0]
    if i == j:
        return False
    ai = alpha[i]; aj = alpha[j]
    yi = y[i]; yj = y[j]
    Ei = E[i]; Ej = E[j]
    s = yi * yj
    if s > 0.0:
        L = ai + aj - C
        if L < 0.0:
            L = 0.0
        H = ai + aj
        if H > C:
            H = C
    else:
        L = aj - ai
        if L < 0.0:
            L = 0.0
        H = C + aj - ai
        if H > C:
            H = C
    if L == H:
        return False
    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    if eta > STEP_EPS:
        aj_new = aj + yj * (Ei - Ej) / eta
        if aj_new < L:
            aj_new = L
        elif aj_new > H:
            aj_new = H
    else:
        g = -(yj * (Ei - Ej))
        obj_L = g * (L - aj) + 0.5 * eta * (L - aj) * (L - aj)
        obj_H = g * (H - aj) + 0.5 * eta * (H - aj) * (H - aj)
        if obj_L < obj_H - STEP_EPS:
            aj_new = L
        elif obj_H < obj_L - STEP_EPS:
            aj_new = H
        else:
            return False
    if fabs(aj_new - aj) < STEP_EPS * (aj_new + aj + STEP_EPS):
        return False
    ai_new = ai + s * (aj - aj_new)
    da_i = yi * (ai_new - ai)
    da_j = yj * (aj_new - aj)
    b1 = st.b - Ei - da_i * K[i, i] - da_j * K[i, j]
    b2 = st.b - Ej - da_i * K[i, j] - da_j * K[j, j]
    if 0.0 < ai_new < C:
        b_new = b1
    elif 0.0 < aj_new < C:
        b_new = b2
    else:
        b_new = (b1 + b2) * 0.5
    db = b_new - st.b
    for t in range(n):
        E[t] = ((E[t] + da_i * K[i, t]) + da_j * K[j, t]) + db
    alpha[i] = ai_new
    alpha[j] = aj_new
    st.b = b_new
    st.updates += 1
    return True

cdef inline double _cls_violation(double[::1] alpha, double[::1] y,
                                  double[::1] E, double C,
                                  Py_ssize_t i) noexcept nogil:
    cdef double r = E[i] * y[i]
    cdef double v = 0.0
    if alpha[i] < C and -r > v:
        v = -r
    if alpha[i] > 0.0 and r > v:
        v = r
    return v

cdef bint _cls_examine(double[:, ::1] K, double[::1] y, double[::1] alpha,
                       double[::1] E, ClsState* st, double C, double tol,
                       Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t j, t, jbest = 0
    cdef double vmax = -1.0, v, Ei
    cdef Py_ssize_t n = y.shape[0]
    if _cls_violation(alpha, y, E, C, i) <= tol:
        return False
    Ei = E[i]
    for t in range(n):
        v = fabs(E[t] - Ei)
        if v > vmax:
            vmax = v
            jbest = t
    if _cls_take_step(K, y, alpha, E, st, C, i, jbest):
        return True
    for j in range(n):
        if alpha[j] > 0.0 and alpha[j] < C:
            if _cls_take_step(K, y, alpha, E, st, C, i, j):
                return True
    for j in range(n):
        if _cls_take_step(K, y, alpha, E, st, C, i, j):
            return True
    return False


def smo_classifier(K, y, double C, double tol, long max_passes):
    """Compiled SMO; same contract and results as `_npy.smo_classifier`."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] y_ = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = y_.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] alpha = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] E = -y_.copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] snap = np.empty(n, dtype=np.int64)
    cdef double[:, ::1] Kv = K_
    cdef double[::1] yv = y_, av = alpha, Ev = E
    cdef cnp.int64_t[::1] sv = snap
    cdef ClsState st
    cdef long passes = 0
    cdef bint examine_all = True
    cdef Py_ssize_t i, t, k, changed
    st.b = 0.0
    st.updates = 0
    while passes < max_passes:
        changed = 0
        if examine_all:
            for i in range(n):
                changed += _cls_examine(Kv, yv, av, Ev, &st, C, tol, i)
        else:
            k = 0
            for t in range(n):
                if av[t] > 0.0 and av[t] < C:
                    sv[k] = t
                    k += 1
            for t in range(k):
                changed += _cls_examine(Kv, yv, av, Ev, &st, C, tol, sv[t])
        passes += 1
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    return alpha, st.b, E, st.updates


# ---------------------------------------------------------------------------
# SMO for epsilon-insensitive regression (beta = alpha - alpha*)
# ---------------------------------------------------------------------------

cdef struct RegState:
    double b
    long updates

cdef inline double _reg_violation(double[::1] beta, double[::1] u,
                                  double[::1] y, RegState* st, double C,
                                  double eps, Py_ssize_t i) noexcept nogil:
    cdef double E = u[i] + st.b - y[i]
    cdef double bi = beta[i], v
    if bi == C:
        v = E + eps
        return v if v > 0.0 else 0.0
    if bi == -C:
        v = eps - E
        return v if v > 0.0 else 0.0
    if bi == 0.0:
        v = fabs(E) - eps
        return v if v > 0.0 else 0.0
    if bi > 0.0:
        return fabs(E + eps)
    return fabs(E - eps)

cdef bint _reg_take_step(double[:, ::1] K, double[::1] y, double[::1] beta,
                         double[::1] u, RegState* st, double C, double eps,
                         Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef double bi, bj, ssum, lo, hi, eta, Gi, Gj
    cdef double bounds[4]
    cdef double cands[7]
    cdef Py_ssize_t nb = 0, nc = 0, t, q, n = y.shape[0]
    cdef double a, c, mid, si, sj, rem, g, cand, tmp
    cdef double best_phi, best_cand, d, phi, bi_new, bj_new
    if i == j:
        return False
    bi = beta[i]; bj = beta[j]
    ssum = bi + bj
    lo = ssum - C
    if lo < -C:
        lo = -C
    hi = ssum + C
    if hi > C:
        hi = C
    if hi - lo < STEP_EPS:
        return False
    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    Gi = u[i] - y[i]
    Gj = u[j] - y[j]
    bounds[nb] = lo; nb += 1
    bounds[nb] = hi; nb += 1
    if lo < 0.0 < hi:
        bounds[nb] = 0.0; nb += 1
    if lo < ssum < hi:
        bounds[nb] = ssum; nb += 1
    # insertion sort + exact dedupe, matching sorted(set(bounds))
    for t in range(1, nb):
        tmp = bounds[t]
        q = t - 1
        while q >= 0 and bounds[q] > tmp:
            bounds[q + 1] = bounds[q]
            q -= 1
        bounds[q + 1] = tmp
    q = 0
    for t in range(1, nb):
        if bounds[t] != bounds[q]:
            q += 1
            bounds[q] = bounds[t]
    nb = q + 1
    for t in range(nb):
        cands[nc] = bounds[t]; nc += 1
    if eta > STEP_EPS:
        for t in range(nb - 1):
            a = bounds[t]
            c = bounds[t + 1]
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
            cands[nc] = cand; nc += 1
    best_phi = 0.0
    best_cand = bi
    for t in range(nc):
        d = cands[t] - bi
        if d == 0.0:
            continue
        phi = (0.5 * eta * d * d + (Gi - Gj) * d
               + eps * (fabs(bi + d) - fabs(bi))
               + eps * (fabs(bj - d) - fabs(bj)))
        if phi < best_phi - 1e-14:
            best_phi = phi
            best_cand = cands[t]
    d = best_cand - bi
    if d == 0.0:
        return False
    bi_new = best_cand
    bj_new = ssum - bi_new
    for t in range(n):
        u[t] = (u[t] + d * K[i, t]) - d * K[j, t]
    beta[i] = bi_new
    beta[j] = bj_new
    if 0.0 < bi_new < C:
        st.b = y[i] - u[i] - eps
    elif -C < bi_new < 0.0:
        st.b = y[i] - u[i] + eps
    elif 0.0 < bj_new < C:
        st.b = y[j] - u[j] - eps
    elif -C < bj_new < 0.0:
        st.b = y[j] - u[j] + eps
    st.updates += 1
    return True

cdef bint _reg_examine(double[:, ::1] K, double[::1] y, double[::1] beta,
                       double[::1] u, RegState* st, double C, double eps,
                       double tol, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t j, t, jbest = 0
    cdef double vmax = -1.0, v, Gi
    cdef Py_ssize_t n = y.shape[0]
    if _reg_violation(beta, u, y, st, C, eps, i) <= tol:
        return False
    Gi = u[i] - y[i]
    for t in range(n):
        v = fabs((u[t] - y[t]) - Gi)
        if v > vmax:
            vmax = v
            jbest = t
    if _reg_take_step(K, y, beta, u, st, C, eps, i, jbest):
        return True
    for j in range(n):
        if beta[j] != 0.0:
            if _reg_take_step(K, y, beta, u, st, C, eps, i, j):
                return True
    for j in range(n):
        if _reg_take_step(K, y, beta, u, st, C, eps, i, j):
            return True
    return False


def smo_regressor(K, y, double C, double eps, double tol, long max_passes):
    """Compiled SMO for SVR; same contract and results as `_npy.smo_regressor`."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] y_ = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = y_.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] beta = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] u = np.zeros(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] snap = np.empty(n, dtype=np.int64)
    cdef double[:, ::1] Kv = K_
    cdef double[::1] yv = y_, bv = beta, uv = u
    cdef cnp.int64_t[::1] sv = snap
    cdef RegState st
    cdef long passes = 0
    cdef bint examine_all = True
    cdef Py_ssize_t i, t, k, changed
    st.b = 0.0
    st.updates = 0
    while passes < max_passes:
        changed = 0
        if examine_all:
            for i in range(n):
                changed += _reg_examine(Kv, yv, bv, uv, &st, C, eps, tol, i)
        else:
            k = 0
            for t in range(n):
                if bv[t] != 0.0:
                    sv[k] = t
                    k += 1
            for t in range(k):
                changed += _reg_examine(Kv, yv, bv, uv, &st, C, eps, tol, sv[t])
        passes += 1
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    return beta, st.b, u, st.updates


# ---------------------------------------------------------------------------
# CART best-split scan
# ---------------------------------------------------------------------------

def best_split(values, positives):
    """Compiled best Gini split; same contract and results as `_npy.best_split`."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] V = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] P_ = np.ascontiguousarray(positives, dtype=np.float64)
    cdef double[:, ::1] v = V
    cdef double[:, ::1] pos = P_
    cdef Py_ssize_t f = v.shape[0], m = v.shape[1]
    cdef Py_ssize_t fi, i, fpos, best_f = -1, best_pos = -1
    cdef double md, P, pl, nl, nr, pr, a, bq, gl, c, dq, gr, w
    cdef double fbest_w, best_w = INFINITY, best_thr = 0.0
    if m < 2:
        return -1, -1, 0.0, np.inf
    md = <double>m
    with nogil:
        for fi in range(f):
            P = 0.0
            for i in range(m):
                P += pos[fi, i]
            fbest_w = INFINITY
            fpos = -1
            pl = 0.0
            for i in range(m - 1):
                pl += pos[fi, i]
                if not (v[fi, i + 1] > v[fi, i]):
                    continue
                nl = <double>(i + 1)
                nr = md - nl
                a = pl / nl
                bq = (nl - pl) / nl
                gl = 1.0 - (a * a + bq * bq)
                pr = P - pl
                c = pr / nr
                dq = (nr - pr) / nr
                gr = 1.0 - (c * c + dq * dq)
                w = (nl * gl + nr * gr) / md
                if w < fbest_w:
                    fbest_w = w
                    fpos = i
            if fpos >= 0 and fbest_w < best_w:
                best_w = fbest_w
                best_f = fi
                best_pos = fpos
                best_thr = (v[fi, fpos] + v[fi, fpos + 1]) * 0.5
    if best_f < 0:
        return -1, -1, 0.0, np.inf
    return best_f, best_pos, best_thr, best_w
