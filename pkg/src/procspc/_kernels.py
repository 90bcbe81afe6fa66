"""Hot numeric kernels with two interchangeable backends.

Each kernel exists as ``<name>_numpy`` (vectorised numpy) and
``<name>_numba`` (``@njit`` loops).  The public names bind to numba when it
imports and ``PROCSPC_DISABLE_NUMBA`` is unset (or ``0``/``false``);
otherwise to numpy.  Both backends must agree to floating-point rounding;
tests/test_kernels.py checks that.

Zone codes: 0 CriticalLow, 1 AtRiskLow, 2 Pass, 3 AtRiskHigh, 4 CriticalHigh.
"""
from __future__ import annotations

import os

import numpy as np

TWO_PI = 2.0 * np.pi


def _numba_requested() -> bool:
    flag = os.environ.get("PROCSPC_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"


# -- design matrix ---------------------------------------------------------

def design_matrix_numpy(t, t_days, changepoints, periods, orders):
    """Columns: ``[1, t, max(t - s_j, 0)..., cos/sin(2*pi*n*t_days/P)...]``."""
    t = np.asarray(t, dtype=np.float64)
    t_days = np.asarray(t_days, dtype=np.float64)
    n = t.shape[0]
    n_cp = changepoints.shape[0]
    n_fourier = 2 * int(np.sum(orders))
    X = np.empty((n, 2 + n_cp + n_fourier))
    X[:, 0] = 1.0
    X[:, 1] = t
    if n_cp:
        X[:, 2:2 + n_cp] = np.maximum(t[:, None] - changepoints[None, :], 0.0)
    col = 2 + n_cp
    for period, order in zip(periods, orders):
        harmonics = np.arange(1, int(order) + 1, dtype=np.float64)
        arg = TWO_PI * harmonics[None, :] * t_days[:, None] / period
        X[:, col:col + 2 * order:2] = np.cos(arg)
        X[:, col + 1:col + 2 * order:2] = np.sin(arg)
        col += 2 * int(order)
    return X


def _design_matrix_loops(t, t_days, changepoints, periods, orders):
    n = t.shape[0]
    n_cp = changepoints.shape[0]
    n_fourier = 0
    for o in orders:
        n_fourier += 2 * o
    X = np.empty((n, 2 + n_cp + n_fourier))
    for i in range(n):
        ti = t[i]
        X[i, 0] = 1.0
        X[i, 1] = ti
        for j in range(n_cp):
            d = ti - changepoints[j]
            X[i, 2 + j] = d if d > 0.0 else 0.0
        col = 2 + n_cp
        for s in range(periods.shape[0]):
            for k in range(1, orders[s] + 1):
                # same operation order as the numpy path: ((2*pi*k)*t_days)/P
                arg = TWO_PI * k * t_days[i] / periods[s]
                X[i, col] = np.cos(arg)
                X[i, col + 1] = np.sin(arg)
                col += 2
    return X


# -- zone classification ---------------------------------------------------

def classify_codes_numpy(values, lsl, lcl, ucl, usl):
    values = np.asarray(values, dtype=np.float64)
    codes = np.where(values > ucl, 3, 1).astype(np.int8)
    codes[values > usl] = 4
    codes[values < lsl] = 0
    codes[(values >= lcl) & (values <= ucl)] = 2
    return codes


def _classify_codes_loops(values, lsl, lcl, ucl, usl):
    out = np.empty(values.shape[0], dtype=np.int8)
    for i in range(values.shape[0]):
        v = values[i]
        if lcl <= v <= ucl:
            out[i] = 2
        elif v > usl:
            out[i] = 4
        elif v < lsl:
            out[i] = 0
        elif v > ucl:
            out[i] = 3
        else:
            out[i] = 1
    return out


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _design_matrix_jit = _jit(_design_matrix_loops)
    _classify_codes_jit = _jit(_classify_codes_loops)

    def design_matrix_numba(t, t_days, changepoints, periods, orders):
        return _design_matrix_jit(
            np.ascontiguousarray(t, dtype=np.float64),
            np.ascontiguousarray(t_days, dtype=np.float64),
            np.ascontiguousarray(changepoints, dtype=np.float64),
            np.ascontiguousarray(periods, dtype=np.float64),
            np.ascontiguousarray(orders, dtype=np.int64),
        )

    def classify_codes_numba(values, lsl, lcl, ucl, usl):
        return _classify_codes_jit(
            np.ascontiguousarray(values, dtype=np.float64),
            float(lsl), float(lcl), float(ucl), float(usl),
        )

else:  # pragma: no cover
    design_matrix_numba = design_matrix_numpy
    classify_codes_numba = classify_codes_numpy


if USE_NUMBA:
    design_matrix = design_matrix_numba
    classify_codes = classify_codes_numba
else:
    design_matrix = design_matrix_numpy
    classify_codes = classify_codes_numpy
