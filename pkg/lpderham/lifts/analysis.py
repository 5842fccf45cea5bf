"""Sampled estimates for retractions: the lift criterion, growth exponents, invariants.

Every sup and inf here is over a finite sample cloud plus user-supplied
curves; results are sampled envelopes, not certificates.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import sympy
from sklearn.linear_model import LinearRegression

from lpderham.exceptions import DegenerateInputError
from lpderham.lifts.cells import Band
from lpderham.lifts.expressions import parameter_symbol, parse
from lpderham.lifts.retractions import StandardLift

logger = logging.getLogger('logger')

DEGENERATE_DENOMINATOR = 1e-300


def dyadic_grid(j_min=1, j_max=12):
    return 2.0 ** -np.arange(j_min, j_max + 1)


class Curve:
    """t ↦ x(t), components given as expressions in t."""

    def __init__(self, components):
        self.t = parameter_symbol()
        self.exprs = [parse(c, 0, with_t=True) for c in components]
        self._f = [sympy.lambdify([self.t], e, 'numpy') for e in self.exprs]

    def __call__(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.stack([np.broadcast_to(np.asarray(f(ts), dtype=float), ts.shape)
                         for f in self._f], axis=1)

    def __repr__(self):
        return f'Curve({[str(e) for e in self.exprs]})'


def sample_cloud(cell, rng, count, min_margin=0.0, max_rounds=50):
    """``count`` points of the cell whose kink margin is at least ``min_margin``."""
    kept = []
    total = 0
    for _ in range(max_rounds):
        Q = cell.sample(rng, count)
        Q = Q[cell.smooth_margin(Q) >= min_margin]
        kept.append(Q)
        total += len(Q)
        if total >= count:
            break
    cloud = np.vstack(kept)[:count]
    if len(cloud) == 0:
        raise DegenerateInputError(f'No samples with kink margin at least {min_margin}.')
    return cloud


def _slope(ts, values):
    """Slope, intercept and largest residual of log(values) against log(t)."""
    X = np.log(ts).reshape(-1, 1)
    y = np.log(values)
    est = LinearRegression().fit(X, y)
    residual = float(np.max(np.abs(est.predict(X) - y)))
    return float(est.coef_[0]), float(est.intercept_), residual


@dataclass
class CriterionReport:
    sup_ratio: float
    witness: dict
    verdict: str
    curve_slopes: list
    rows: list = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=['source', 't', 'ratio'])


def lipschitz_criterion(theta_a, theta_b, base_retraction, points, t_grid=None, curves=(),
                        bound=1e3, slope_tol=0.01):
    """sup of |θa(r′_t x) − θb(r′_t x)| / |θa(x) − θb(x)| over the cloud and the curves.

    A curve is evaluated at the same t as the retraction. The verdict is
    "unbounded" when a curve ratio grows like a negative power of t or the sup
    exceeds ``bound``.
    """
    t_grid = dyadic_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def ratios(X, t):
        below = np.abs(theta_a(X) - theta_b(X))
        X_t = base_retraction(X, t)
        above = np.abs(theta_a(X_t) - theta_b(X_t))
        keep = below > DEGENERATE_DENOMINATOR
        out = np.full(len(X), np.nan)
        out[keep] = above[keep] / below[keep]
        return out

    best, witness, rows, any_valid = -np.inf, None, [], False
    for t in t_grid:
        r = ratios(points, t)
        if np.any(~np.isnan(r)):
            any_valid = True
            i = int(np.nanargmax(r))
            rows.append(('cloud', float(t), float(r[i])))
            if r[i] > best:
                best, witness = float(r[i]), {'x': points[i].tolist(), 't': float(t), 'source': 'cloud'}
    slopes = []
    for c, curve in enumerate(curves):
        X = curve(t_grid)
        r = np.array([ratios(X[j:j + 1], t)[0] for j, t in enumerate(t_grid)])
        valid = ~np.isnan(r) & (r > 0)
        if not np.any(valid):
            slopes.append(None)
            continue
        any_valid = True
        for t, value in zip(t_grid[valid], r[valid]):
            rows.append((f'curve{c}', float(t), float(value)))
        j = int(np.nanargmax(r))
        if r[j] > best:
            best, witness = float(r[j]), {'x': X[j].tolist(), 't': float(t_grid[j]),
                                          'source': f'curve{c}'}
        slopes.append(_slope(t_grid[valid], r[valid])[0] if valid.sum() > 1 else None)
    if not any_valid:
        raise DegenerateInputError('θa = θb at every sampled point.')
    unbounded = best > bound or any(s is not None and s < -slope_tol for s in slopes)
    verdict = 'unbounded' if unbounded else 'bounded'
    logger.info(f'Lift criterion: sup ratio {best:.6g} at {witness}; verdict {verdict}.')
    return CriterionReport(best, witness, verdict, slopes, rows)


@dataclass
class GrowthFit:
    lam: float
    mu: float
    lam_residual: float
    mu_residual: float
    power_law: bool
    t_grid: np.ndarray
    sup_norms: np.ndarray
    inf_dets: np.ndarray
    sample_count: int

    def to_frame(self):
        return pd.DataFrame({'t': self.t_grid, 'sup_norm': self.sup_norms,
                             'inf_det': self.inf_dets})

    def summary(self):
        return {'lambda': self.lam, 'mu': self.mu, 'lambda_residual': self.lam_residual,
                'mu_residual': self.mu_residual, 'power_law': self.power_law,
                'samples': self.sample_count}


def fit_growth_exponents(retraction, points, t_grid=None, residual_tol=0.1):
    """Fit ‖Dr_t‖ ≲ t^λ (max-entry norm, upper envelope) and |det Dr_t| ≳ t^μ (lower envelope)."""
    t_grid = dyadic_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    sup_norms, inf_dets = [], []
    for t in t_grid:
        D = retraction.jacobian(points, t)
        sup_norms.append(float(np.max(np.abs(D))))
        inf_dets.append(float(np.min(np.abs(retraction.det(points, t)))))
    sup_norms, inf_dets = np.array(sup_norms), np.array(inf_dets)
    if np.any(sup_norms <= 0) or np.any(inf_dets <= 0):
        raise DegenerateInputError('Derivative vanishes on the sample; no power law to fit.')
    lam, _, lam_res = _slope(t_grid, sup_norms)
    mu, _, mu_res = _slope(t_grid, inf_dets)
    power_law = max(lam_res, mu_res) <= residual_tol
    if not power_law:
        logger.warning(f'Growth is not a power law on this grid (residuals {lam_res:.3g}, '
                       f'{mu_res:.3g}).')
    return GrowthFit(lam, mu, lam_res, mu_res, power_law, t_grid, sup_norms, inf_dets,
                     len(points))


def difference_quotients(retraction, P, Q, t):
    """|r_t(p) − r_t(q)| / |p − q| for paired rows of P and Q."""
    P, Q = np.atleast_2d(P), np.atleast_2d(Q)
    distance = np.linalg.norm(P - Q, axis=1)
    return np.linalg.norm(retraction(P, t) - retraction(Q, t), axis=1) / distance


def fiber_quotients(lift, X, t, fraction=0.5):
    """Difference quotients of a band lift between (x, θ₁(x)) and a point up the fiber."""
    if not isinstance(lift, StandardLift) or not isinstance(lift.cell, Band):
        raise TypeError('Fiber quotients are taken for band lifts.')
    X = np.atleast_2d(X)
    lower = lift.cell.lower(X)
    P = np.hstack([X, lower[:, None]])
    Q = np.hstack([X, (lower + fraction * lift.cell.width(X))[:, None]])
    return difference_quotients(lift, P, Q, t)


def check_endpoints(retraction, Q):
    """max |r(q, 1) − q| and max |r(q, 0) − apex|."""
    Q = np.atleast_2d(Q)
    identity = float(np.max(np.abs(retraction(Q, 1.0) - Q)))
    apex = float(np.max(np.linalg.norm(retraction(Q, 0.0) - retraction.apex, axis=1)))
    return {'identity_error': identity, 'apex_error': apex}


def check_tau_preservation(lift, Q, t_grid):
    """max |τ(r(q, t)) − τ(q)| over the samples and the grid."""
    if not isinstance(lift, StandardLift) or not isinstance(lift.cell, Band):
        raise TypeError('τ is defined on band lifts.')
    tau = lift.cell.tau(Q)
    return max(float(np.max(np.abs(lift.cell.tau(lift(Q, t)) - tau))) for t in t_grid)


def check_cell_preservation(retraction, cell, Q, t_grid, tol=1e-9):
    """First (q, t) with r(q, t) outside the cell, or None."""
    for t in t_grid:
        inside = cell.contains(retraction(Q, t), tol)
        if not np.all(inside):
            i = int(np.argmin(inside))
            return {'q': np.atleast_2d(Q)[i].tolist(), 't': float(t)}
    return None
