"""Deciding whether truncated norms stay bounded as ε → 0, and scanning p for p*."""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression
from tqdm import tqdm

from lpderham.cone.metric import base_integral, critical_exponent, r_integral
from lpderham.utils.utils import parallel_map

logger = logging.getLogger('logger')

SLOPE_TOL = 0.01
VALUE_CAP = 1e12


@dataclass
class DivergenceReport:
    p: float
    slope: float
    verdict: str
    value: float


def detect_divergence(omega, metric, p, schedule, slope_tol=SLOPE_TOL, cap=VALUE_CAP):
    """Fit log of the dyadic shell integrals ∫_{ε_{j+1}}^{ε_j} against log(1/ε_j).

    A convergent tail has shells shrinking like a power of ε (negative
    slope); "diverges" iff the slope exceeds −slope_tol or the truncated
    integral passes ``cap``.
    """
    eps = schedule.eps
    if len(eps) < 3:
        raise ValueError('The schedule is too short to fit a slope.')
    omega.check(metric)
    base = base_integral(omega, metric, p, schedule.torus_points)
    e = metric.r_exponent(omega.k, p)
    if base == 0.0:
        return DivergenceReport(p, float('-inf'), 'converges', 0.0)
    shells = np.array([r_integral(e, lo, hi) for hi, lo in zip(eps[:-1], eps[1:])]) * base
    X = np.log(1.0 / eps[:-1]).reshape(-1, 1)
    slope = float(LinearRegression().fit(X, np.log(shells)).coef_[0])
    value = r_integral(e, eps[-1]) * base
    diverges = slope > -slope_tol or value > cap
    return DivergenceReport(p, slope, 'diverges' if diverges else 'converges', value ** (1.0 / p))


@dataclass
class ScanReport:
    rows: list
    p_star_exact: object
    bracket: tuple
    flips: int
    summary: dict = field(default_factory=dict)

    def to_frame(self):
        return pd.DataFrame([{'p': r.p, 'slope': r.slope, 'verdict': r.verdict} for r in self.rows],
                            columns=['p', 'slope', 'verdict'])


def p_grid(p_min, p_max, p_step):
    if p_step <= 0 or p_max < p_min:
        raise ValueError(f'Empty p-grid [{p_min}, {p_max}] with step {p_step}.')
    count = int(np.floor((p_max - p_min) / p_step + 1e-9)) + 1
    return np.round(p_min + p_step * np.arange(count), 10)


def scan_thresholds(omega, metric, grid, schedule, slope_tol=SLOPE_TOL, progress=False):
    """Verdicts over a p-grid; the bracket is (last convergent p, first divergent p)."""
    grid = [float(p) for p in grid]
    if not grid:
        raise ValueError('Empty p-grid.')
    items = tqdm(grid, desc='p-scan') if progress else grid
    rows = parallel_map(lambda p: detect_divergence(omega, metric, p, schedule, slope_tol), items)
    verdicts = [r.verdict for r in rows]
    flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
    lower = max((r.p for r in rows if r.verdict == 'converges'), default=None)
    upper = min((r.p for r in rows if r.verdict == 'diverges'), default=None)
    p_star = critical_exponent(metric.alpha, metric.m, omega.k) if omega.k else None
    if flips != 1:
        logger.warning(f'Verdicts flip {flips} times on the grid.')
    summary = {'p_star_exact': None if p_star is None else float(p_star),
               'p_star_bracket': [lower, upper], 'flips': flips}
    return ScanReport(rows, p_star, (lower, upper), flips, summary)
