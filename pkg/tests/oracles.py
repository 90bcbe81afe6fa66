"""Reference implementations written independently of the package internals."""
import math

import numpy as np


def naive_design(ds, t_start, t_span, changepoints, seasonalities):
    """Row-by-row design matrix with plain Python math (independent of the kernels)."""
    rows = []
    for d in ds:
        t = (int(d) - t_start) / t_span
        days = (int(d) - t_start) / 86400.0
        r = [1.0, t] + [max(t - s, 0.0) for s in changepoints]
        for s in seasonalities:
            for k in range(1, s.fourier_order + 1):
                r += [math.cos(2 * math.pi * k * days / s.period_days), math.sin(2 * math.pi * k * days / s.period_days)]
        rows.append(r)
    return np.array(rows)


def normal_equations_fit(ds, y, changepoints, seasonalities):
    """Unpenalized least squares on standardized y via X'X w = X'y."""
    ds = np.asarray(ds, dtype=np.int64)
    y = np.asarray(y, dtype=np.float64)
    X = naive_design(ds, int(ds[0]), float(ds[-1] - ds[0]), changepoints, seasonalities)
    y_tilde = (y - y.mean()) / y.std()
    return np.linalg.solve(X.T @ X, X.T @ y_tilde)


def zone_codes(values, lsl, lcl, ucl, usl):
    """Direct inequality translation of the zone table: 0..4 = CriticalLow..CriticalHigh."""
    v = np.asarray(values, dtype=np.float64)
    return np.select(
        [v > usl, (v > ucl) & (v <= usl), (v >= lcl) & (v <= ucl), (v >= lsl) & (v < lcl), v < lsl],
        [4, 3, 2, 1, 0],
        default=-1,
    ).astype(np.int8)
