import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import nnls as scipy_nnls

from groupaccess import _accel, _kernels
from groupaccess.builtins import builtin_representation
from groupaccess.geometry import PolytopeSampler, embed

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _problem(rng, m, n, N):
    A = rng.normal(size=(m, n))
    B = rng.normal(size=(N, m))
    return A, B


def test_nnls_examples():
    A = np.eye(3)
    x, r = _kernels.nnls(A, np.array([1.0, -2.0, 3.0]))
    assert np.allclose(x, [1, 0, 3]) and np.isclose(r, 2.0)
    x, r = _kernels.nnls(np.array([[1.0, 1.0]]), np.array([2.0]))
    assert np.isclose(A[:1, :2] @ x, 2.0).all() and r < 1e-12 and x.min() >= 0
    x, r = _kernels.nnls(np.ones((2, 1)), np.array([-1.0, -1.0]))
    assert x[0] == 0 and np.isclose(r, np.sqrt(2))


@pytest.mark.parametrize("seed", range(5))
def test_nnls_matches_scipy_well_posed(seed):
    rng = np.random.default_rng(seed)
    A, B = _problem(rng, 12, 6, 50)
    for b in B:
        x, r = _kernels.nnls(A, b)
        xs, rs = scipy_nnls(A, b)
        assert np.allclose(x, xs, atol=1e-9) and np.isclose(r, rs, rtol=1e-9)


@pytest.mark.parametrize("use_numba", [False, pytest.param(True, marks=needs_numba)])
def test_nnls_batch_matches_enumeration(use_numba):
    rng = np.random.default_rng(1)
    A, B = _problem(rng, 10, 5, 300)
    X, res = _kernels.nnls_batch(A, B, use_numba=use_numba)
    Xe, re = _kernels._nnls_batch_enum(A, B)
    assert np.allclose(res, re, atol=1e-10)
    assert np.allclose(X, Xe, atol=1e-8)


@needs_numba
def test_nnls_batch_rank_deficient_residuals():
    # duplicated and dependent columns: rates are not unique, residuals are
    rng = np.random.default_rng(2)
    A0 = rng.normal(size=(8, 3))
    A = np.hstack([A0, A0[:, :1], A0[:, 1:2] + A0[:, 2:3]])
    B = rng.normal(size=(200, 8))
    X1, r1 = _kernels.nnls_batch(A, B, use_numba=True)
    X2, r2 = _kernels.nnls_batch(A, B, use_numba=False)
    assert np.allclose(r1, r2, atol=1e-9)
    assert X1.min() >= 0 and X2.min() >= 0
    assert np.allclose(np.linalg.norm(X1 @ A.T - B, axis=1), r1, atol=1e-9)


@needs_numba
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31))
def test_nnls_kkt(n, seed):
    """Optimality conditions: x >= 0, gradient <= 0 off the support, = 0 on it."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n + 4, n))
    b = rng.normal(size=n + 4)
    X, r = _kernels.nnls_batch(A, b[None, :], use_numba=True)
    x = X[0]
    g = A.T @ (b - A @ x)
    assert x.min() >= 0
    assert np.all(g <= 1e-9)
    assert np.allclose(g[x > 1e-12], 0, atol=1e-9)


@needs_numba
def test_hit_and_run_parity():
    poly = embed(builtin_representation("s3"))
    s = PolytopeSampler(poly, method="hit-and-run")
    rng = np.random.default_rng(0)
    K, steps, D = 8, 60, poly.affine_dim
    dirs = rng.standard_normal((steps, K, D))
    us = rng.random((steps, K))
    X0 = np.tile(s.center, (K, 1))
    a = _kernels.hit_and_run_chains(s.H, s.c, X0, dirs, us, thin=3, use_numba=True)
    b = _kernels.hit_and_run_chains(s.H, s.c, X0, dirs, us, thin=3, use_numba=False)
    assert a.shape == b.shape == (20, K, D)
    assert np.allclose(a, b, atol=1e-10)
    # every state is inside the polytope
    assert np.all(a.reshape(-1, D) @ s.H.T <= s.c + 1e-9)


def test_hit_and_run_interval():
    """One step in the unit square moves along the chord."""
    H = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    c = np.array([1.0, 0, 1, 0])
    X0 = np.array([[0.5, 0.5]])
    dirs = np.array([[[1.0, 0.0]]])
    for u, x in ((0.0, 0.0), (0.5, 0.5), (0.999, 0.999)):
        out = _kernels.hit_and_run_chains(H, c, X0, dirs, np.array([[u]]), use_numba=False)
        assert np.allclose(out[0, 0], [x, 0.5])


def test_env_flag_disables_numba():
    env = dict(os.environ, GROUPACCESS_DISABLE_NUMBA="1")
    code = "from groupaccess import _accel; print(_accel.USE_NUMBA)"
    p = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert p.stdout.strip() == "False"


def test_env_flag_same_counts():
    """Volume counts agree between the two kernel paths."""
    code = ("from groupaccess import mc_accessible_fraction\n"
            "from groupaccess.builtins import builtin_representation as b\n"
            "print(mc_accessible_fraction(b('noncyclic4'), 20000, seed=5).n_accessible,"
            " mc_accessible_fraction(b('z5'), 5000, seed=5, method='hit-and-run').n_accessible)")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, GROUPACCESS_DISABLE_NUMBA=flag)
        p = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        assert p.returncode == 0, p.stderr
        outs.append(p.stdout.split())
    assert outs[0] == outs[1]
