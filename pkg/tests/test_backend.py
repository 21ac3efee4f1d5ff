"""Parity and selection tests for the two kernel backends.

The compiled extension must reproduce the NumPy fallback bit for bit, so
every comparison here is exact equality, not allclose.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from sigfx._backend import _npy
from sigfx._svm import rbf_kernel

_ck = pytest.importorskip("sigfx._backend._ck")


def _problem(seed=0, n=60, p=4):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    X[n // 2:] += 1.5
    y = np.ones(n)
    y[: n // 2] = -1.0
    K = rbf_kernel(X, X, gamma=0.5)
    return K, y, X


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_smo_classifier_bit_identical(seed):
    K, y, _ = _problem(seed)
    a1, b1, e1, u1 = _npy.smo_classifier(K, y, 1.0, 1e-3, 50)
    a2, b2, e2, u2 = _ck.smo_classifier(K, y, 1.0, 1e-3, 50)
    np.testing.assert_array_equal(a1, a2)
    assert b1 == b2
    np.testing.assert_array_equal(e1, e2)
    assert u1 == u2


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_smo_regressor_bit_identical(seed):
    rng = np.random.default_rng(seed + 100)
    X = rng.uniform(-2, 2, size=(50, 1))
    y = np.sin(X[:, 0]) + 0.05 * rng.normal(size=50)
    K = rbf_kernel(X, X, gamma=1.0)
    r1 = _npy.smo_regressor(K, y, 10.0, 0.05, 1e-3, 50)
    r2 = _ck.smo_regressor(K, y, 10.0, 0.05, 1e-3, 50)
    np.testing.assert_array_equal(r1[0], r2[0])
    assert r1[1] == r2[1]
    np.testing.assert_array_equal(r1[2], r2[2])
    assert r1[3] == r2[3]


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_best_split_bit_identical(seed):
    rng = np.random.default_rng(seed + 200)
    f, m = 5, 40
    values = np.sort(rng.normal(size=(f, m)), axis=1)
    positives = (rng.uniform(size=(f, m)) < 0.4).astype(np.float64)
    # duplicate runs exercise the no-split-candidate path
    values[2, 10:20] = values[2, 10]
    r1 = _npy.best_split(values, positives)
    r2 = _ck.best_split(values, positives)
    assert r1 == r2


def test_best_split_constant_feature_parity():
    values = np.zeros((2, 8))
    positives = np.tile([0.0, 1.0], 8).reshape(2, 8)
    assert _npy.best_split(values, positives) == _ck.best_split(values,
                                                                positives)
    one = np.zeros((1, 1))
    assert _npy.best_split(one, one) == _ck.best_split(one, one)


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("SIGFX_BACKEND", None)
    else:
        env["SIGFX_BACKEND"] = env_value
    code = ("import sigfx; print(sigfx.backend_name())")
    return subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)


def test_selection_pure():
    out = _backend_in_subprocess("pure")
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"


def test_selection_compiled():
    out = _backend_in_subprocess("compiled")
    assert out.returncode == 0
    assert out.stdout.strip() == "compiled"


def test_selection_default_prefers_compiled():
    out = _backend_in_subprocess(None)
    assert out.returncode == 0
    assert out.stdout.strip() == "compiled"


def test_selection_rejects_unknown():
    out = _backend_in_subprocess("cuda")
    assert out.returncode != 0
    assert "SIGFX_BACKEND" in out.stderr


def test_backend_names_differ():
    assert _npy.BACKEND_NAME == "numpy"
    assert _ck.BACKEND_NAME == "compiled"
