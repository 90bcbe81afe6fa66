import os
import subprocess
import sys

import numpy as np
import pytest

from procspc import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def test_design_matrix_backends_agree():
    rng = np.random.default_rng(0)
    t = np.sort(rng.uniform(0, 1.3, 400))
    t_days = t * 90.0
    cps = np.sort(rng.uniform(0, 0.8, 7))
    periods = np.array([7.0, 365.25])
    orders = np.array([3, 10])
    a = _kernels.design_matrix_numpy(t, t_days, cps, periods, orders)
    b = _kernels.design_matrix_numba(t, t_days, cps, periods, orders)
    assert a.shape == b.shape == (400, 2 + 7 + 26)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    np.testing.assert_array_equal(a[:, :9], b[:, :9])


def test_design_matrix_backends_agree_without_columns():
    t = np.linspace(0, 1, 5)
    empty_f = np.array([], dtype=np.float64)
    empty_i = np.array([], dtype=np.int64)
    a = _kernels.design_matrix_numpy(t, t, empty_f, empty_f, empty_i)
    b = _kernels.design_matrix_numba(t, t, empty_f, empty_f, empty_i)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (5, 2)


@pytest.mark.parametrize("limits", [(80, 90, 110, 120), (0, 0, 0, 0), (1, 2, 2, 2), (-5, -5, 5, 5)])
def test_classify_backends_agree(limits):
    rng = np.random.default_rng(1)
    lsl, lcl, ucl, usl = limits
    values = np.concatenate([rng.uniform(lsl - 20, usl + 20, 5000), np.array(limits, dtype=float)])
    np.testing.assert_array_equal(
        _kernels.classify_codes_numpy(values, *limits), _kernels.classify_codes_numba(values, *limits)
    )


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("", "numba"), ("false", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, PROCSPC_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import procspc._kernels as k; print(k.BACKEND, k.design_matrix.__name__)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.split()
    assert out[0] == expected
    assert out[1].endswith(expected)
