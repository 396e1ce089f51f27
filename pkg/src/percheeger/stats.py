"""Small statistics helpers: streaming moments, bootstrap, binomial intervals."""
from __future__ import annotations

import math

import numpy as np


class RunningMoments:
    """Welford's single-pass mean and variance."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, x: float):
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)

    def extend(self, xs):
        for x in xs:
            self.push(float(x))
        return self

    @property
    def variance(self) -> float:
        if self.count < 2:
            return math.nan
        return self._m2 / (self.count - 1)


def bootstrap_ci(values, statistic, rng: np.random.Generator, resamples: int = 1000, level: float = 0.95):
    """Percentile interval and standard error of ``statistic`` over row resamples.

    The interval is widened to contain the point estimate if needed.
    """
    values = np.asarray(values)
    point = statistic(values)
    n = values.shape[0]
    idx = rng.integers(0, n, size=(resamples, n))
    draws = np.array([statistic(values[row]) for row in idx])
    alpha = (1 - level) / 2
    lo, hi = np.quantile(draws, [alpha, 1 - alpha])
    return (min(lo, point), max(hi, point)), float(np.std(draws, ddof=1))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return (math.nan, math.nan)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return (lo, hi)
