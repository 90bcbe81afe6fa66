"""Seeded synthetic charts shared by the test modules."""
import numpy as np

from procspc.core import ChartSeries, ControlLimits

START = 1_743_465_600  # 2025-04-01 00:00:00 UTC
LIMITS = ControlLimits(lsl=80.0, lcl=90.0, target=100.0, ucl=110.0, usl=120.0)


def irregular_times(rng, n, span_days, start=START, resolution=60):
    """n distinct, sorted timestamps drawn uniformly over span_days."""
    grid = np.arange(start, start + int(span_days * 86400), resolution, dtype=np.int64)
    return np.sort(rng.choice(grid, size=n, replace=False))


def stable_chart(seed, n=500, span_days=60, limits=LIMITS, chart_id=None):
    """Noise sigma = (ucl - lcl) / 12 around the target."""
    rng = np.random.default_rng(seed)
    ds = irregular_times(rng, n, span_days)
    sigma = (limits.ucl - limits.lcl) / 12
    y = limits.target + rng.normal(0.0, sigma, n)
    return ChartSeries(chart_id or f"STABLE-{seed}", "THK-OX", limits, ds, y)


def drift_chart(seed, n=120, limits=LIMITS, rate_per_hour=0.2, noise=0.1, start_level=95.0):
    """Linear ramp in time (irregular ~hourly sampling) crossing ucl around sample 75."""
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(0.5, 1.5, n) * 3600
    ds = START + np.cumsum(gaps).astype(np.int64)
    hours = (ds - ds[0]) / 3600
    y = start_level + rate_per_hour * hours + rng.normal(0.0, noise, n)
    return ChartSeries(f"DRIFT-{seed}", "PMD", limits, ds, y)


def weekly_chart(seed, n=300, weeks=12, amplitude=5.0, noise=0.5, level=100.0):
    rng = np.random.default_rng(seed)
    ds = irregular_times(rng, n, 7 * weeks)
    days = (ds - ds[0]) / 86400
    y = level + amplitude * np.sin(2 * np.pi * days / 7) + rng.normal(0.0, noise, n)
    return ChartSeries(f"WEEKLY-{seed}", "CMP", LIMITS, ds, y)


# Fixed forecast-vs-actual rows (ds, y, yhat); every value lies above FIXTURE_LIMITS.usl.
FIXTURE_ROWS = [
    ("2025-04-02 11:35:26", 15900.67, 15964.50),
    ("2025-04-03 23:11:07", 16016.33, 16297.43),
    ("2025-04-05 07:52:34", 15657.33, 15829.26),
    ("2025-04-05 17:08:38", 16883.33, 15887.24),
    ("2025-04-05 22:17:09", 15873.67, 15905.27),
    ("2025-04-06 16:04:24", 15971.67, 15869.63),
    ("2025-04-07 21:56:02", 16226.67, 15953.18),
    ("2025-04-09 03:40:15", 15846.00, 15972.45),
    ("2025-04-09 13:40:55", 16090.00, 15862.97),
    ("2025-04-10 16:00:42", 15879.00, 16035.78),
    ("2025-04-11 08:10:13", 16096.67, 15476.12),
    ("2025-04-12 20:16:16", 15528.67, 15918.49),
    ("2025-04-14 00:45:17", 15954.00, 15950.47),
]
FIXTURE_LIMITS = ControlLimits(lsl=13000.0, lcl=13500.0, target=14000.0, ucl=14500.0, usl=15000.0)
FIXTURE_LABEL = "Critical (Tool Stop) - Above USL"


def write_chart_csv(path, series_list):
    from procspc.ingest import write_csv

    write_csv(series_list, path)
    return path
