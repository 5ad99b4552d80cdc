"""The compiled and numpy backends must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest

from finbox import _kernels_py, kernels

IMPLS = kernels.backends()
needs_compiled = pytest.mark.skipif("cython" not in IMPLS, reason="compiled backend not built")


def _case(rng, n, m, values):
    B = rng.integers(-3, 4, size=(n, m))
    Bu = kernels.control_increments(B, np.array(values))
    dmax = rng.integers(-2, 4, size=n)
    dmin = dmax - rng.integers(0, 4, size=n)
    return Bu, dmax, dmin


def test_control_increments_order():
    Bu = kernels.control_increments(np.array([[1, 10]]), np.array([-1, 3]))
    assert Bu[:, 0].tolist() == [-11, 29, -7, 33]  # (-1,-1), (-1,3), (3,-1), (3,3)


def test_python_first_members_semantics():
    Bu = np.array([[0], [5]])
    out = _kernels_py.first_members(Bu, np.array([0]), np.array([0]), False)
    assert out.tolist() == [0, 0]  # 0 is both >= 0 and <= 0
    out = _kernels_py.first_members(Bu, np.array([0]), np.array([0]), True)
    assert out.tolist() == [1, -1]


@needs_compiled
def test_backends_agree_on_scans():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 4))
        Bu, dmax, dmin = _case(rng, n, m, sorted(rng.choice(np.arange(-5, 6), 3, replace=False)))
        for strict in (False, True):
            a = kernels.first_members(Bu, dmax, dmin, strict, impl=IMPLS["python"])
            b = kernels.first_members(Bu, dmax, dmin, strict, impl=IMPLS["cython"])
            assert np.array_equal(a, b)
            z = int(rng.integers(0, 2**n))
            a = kernels.member_mask(Bu, dmax, dmin, z, strict, impl=IMPLS["python"])
            b = kernels.member_mask(Bu, dmax, dmin, z, strict, impl=IMPLS["cython"])
            assert np.array_equal(a, b)


@needs_compiled
def test_backends_agree_on_rollouts():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        inc = rng.integers(-30, 31, size=(2**n, n)).astype(float)
        thr = rng.integers(0, 50, size=n).astype(float)
        x0 = np.round(rng.uniform(-300, 300, size=n) * 2**20) / 2**20
        dw = rng.integers(-10, 11, size=(int(rng.integers(0, 100)), n)).astype(float)
        sa, za = kernels.rollout_threshold(x0, thr, inc, dw, impl=IMPLS["python"])
        sb, zb = kernels.rollout_threshold(x0, thr, inc, dw, impl=IMPLS["cython"])
        assert np.array_equal(sa, sb) and np.array_equal(za, zb)


def test_pure_python_switch():
    env = dict(os.environ, FINBOX_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from finbox import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_whole_pipeline_under_fallback():
    code = (
        "from importlib import resources; from finbox import *; from finbox import kernels;"
        "from finbox.verify import scalar_minimal_box;"
        "m = load_model((resources.files('finbox') / 'data' / 'example1.json').read_text());"
        "assert kernels.BACKEND == 'python'; print(scalar_minimal_box(m).K)"
    )
    env = dict(os.environ, FINBOX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "157"
