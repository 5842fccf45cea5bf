"""The radial homotopy operator R_ε on a horn and its L^p bound.

The horn over the unit m-cube is U = {(s, z): 0 < s ≤ 1, z ∈ s^α [−½, ½]^m},
which carries the same volume growth r^{αm} as the warped cone. It retracts
onto its apex by r_t(s, z) = (t s, t^α z), whose derivative has norm t and
determinant t^{1 + αm}. The test family ω_β = s^{−β} ds ∧ dz_1 ∧ … ∧ dz_{k−1}
has closed-form norms, and

    R_ε ω_β = T_ε(β) s^{−β} [s dz′ + Σ_i (−1)^i α z_i ds ∧ dz_{≠i}],
    T_ε(β) = ∫_ε^1 t^{α(k−1) − β} dt.
"""
import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from lpderham.cone.metric import base_integral, r_integral
from lpderham.exceptions import QuadratureError
from lpderham.lifts import DiagonalPowerRetraction, dyadic_grid, fit_growth_exponents

logger = logging.getLogger('logger')

GAUSS_ORDER = 16
GAP_GRID = np.logspace(-9, 0, 60)
FIT_SAMPLES = 200


def homotopy_bound_constant(p, lam, mu, k, eps=0.0):
    """Constant C with ‖R_ε ω‖_p ≤ C ‖ω‖_p, valid for p > μ / (1 + (k − 1)λ).

    C = p / (p(1 + (k − 1)λ) − μ) · (1 − ε^{−μ/p + (k − 1)λ + 1}).
    """
    threshold = mu / (1 + (k - 1) * lam)
    if p <= threshold:
        raise ValueError(f'p={p} must exceed the threshold μ/(1+(k−1)λ) = {threshold:.12g}.')
    exponent = -mu / p + (k - 1) * lam + 1
    return p / (p * (1 + (k - 1) * lam) - mu) * (1 - eps ** exponent)


class HornModel:
    """Closed-form norms of ω_β and R_ε ω_β on the horn."""

    def __init__(self, alpha, m, k, p):
        if k < 1:
            raise ValueError('R_ε lowers degree; forms of degree 0 have no image.')
        if k - 1 > m:
            raise ValueError(f'No {k}-forms of the form ds ∧ dz′ on a horn over an {m}-cube.')
        self.alpha, self.m, self.k, self.p = float(alpha), m, k, float(p)
        self.mu = 1 + self.alpha * m
        self.beta_max = min(self.mu / self.p, 1 + self.alpha * (k - 1))
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
        if k > 1:
            Y = np.array(list(product(nodes / 2, repeat=k - 1)))
            W = np.prod(np.array(list(product(weights / 2, repeat=k - 1))), axis=1)
            self._y_sq, self._w = np.sum(Y ** 2, axis=1), W
        else:
            self._y_sq, self._w = None, None

    def _check_beta(self, beta):
        if not 0 <= beta < self.beta_max:
            raise ValueError(f'β={beta} outside [0, {self.beta_max}).')

    def fiber_mean(self, s):
        """Mean over the cube of (1 + α² s^{2α−2} |y′|²)^{p/2}."""
        if self._w is None:
            return 1.0
        a = self.alpha
        values = (1 + a ** 2 * s ** (2 * a - 2) * self._y_sq) ** (self.p / 2)
        return float(np.dot(self._w, values))

    def form_norm(self, beta):
        """‖ω_β‖_p."""
        self._check_beta(beta)
        return (1.0 / (self.alpha * self.m + 1 - beta * self.p)) ** (1 / self.p)

    def time_integral(self, beta, eps):
        return r_integral(self.alpha * (self.k - 1) - beta, eps)

    def _radial_part(self, beta):
        """(∫_0^1 s^{αm − βp + p} fiber_mean(s) ds)^{1/p}."""
        a = self.alpha * self.m - beta * self.p + self.p
        value, abserr = quad(self.fiber_mean, 0.0, 1.0, weight='alg', wvar=(a, 0.0))
        if abserr > 1e-6 * max(1.0, abs(value)):
            raise QuadratureError(f'Radial integral at β={beta} has error estimate {abserr:.3g}.')
        return value ** (1 / self.p)

    def operator_norm(self, beta, eps):
        """‖R_ε ω_β‖_p."""
        self._check_beta(beta)
        return self.time_integral(beta, eps) * self._radial_part(beta)

    def ratio(self, beta, eps):
        return self.operator_norm(beta, eps) / self.form_norm(beta)

    def gap_ratio(self, beta, eps):
        """‖R_ε ω_β − R_0 ω_β‖_p / ‖ω_β‖_p."""
        self._check_beta(beta)
        c = self.alpha * (self.k - 1) - beta
        return eps ** (c + 1) / (c + 1) * self._radial_part(beta) / self.form_norm(beta)

    def pullback_ratio(self, beta, eps):
        """‖r_ε^* ω_β‖_p / ‖ω_β‖_p = ε^{1 + α(k−1) − β}."""
        return eps ** (1 + self.alpha * (self.k - 1) - beta)

    def sup_ratio(self, eps):
        """Largest ratio over β ∈ [0, β_max): gap grid, then bounded refinement."""
        betas = np.unique(np.clip(self.beta_max * (1 - GAP_GRID), 0.0, None))
        values = np.array([self.ratio(b, eps) for b in betas])
        i = int(np.argmax(values))
        lower = betas[max(i - 1, 0)]
        upper = min(betas[min(i + 1, len(betas) - 1)], self.beta_max * (1 - GAP_GRID[0]))
        best_beta, best = float(betas[i]), float(values[i])
        if upper > lower:
            res = minimize_scalar(lambda b: -self.ratio(b, eps), bounds=(lower, upper),
                                  method='bounded')
            if -res.fun > best:
                best_beta, best = float(res.x), float(-res.fun)
        return best_beta, best


@dataclass
class RetractionExperiment:
    alpha: float
    m: int
    k: int
    p: float
    lam: float
    mu: float
    rows: list = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=['eps', 'beta', 'ratio', 'bound', 'pullback_ratio',
                                                'gap', 'form_norm', 'operator_norm'])

    def summary(self):
        return {'alpha': self.alpha, 'm': self.m, 'k': self.k, 'p': self.p,
                'lambda_hat': self.lam, 'mu_hat': self.mu,
                'max_ratio': max((r[2] for r in self.rows), default=0.0)}


def horn_growth(metric, rng, t_grid=None):
    """Fit λ̂ and μ̂ for the horn retraction from sampled Jacobians."""
    alpha = float(metric.alpha)
    retraction = DiagonalPowerRetraction([1.0] + [alpha] * metric.m)
    s = rng.uniform(0.05, 1.0, size=FIT_SAMPLES)
    Z = rng.uniform(-0.5, 0.5, size=(FIT_SAMPLES, metric.m)) * (s ** alpha)[:, None]
    points = np.hstack([s[:, None], Z])
    return fit_growth_exponents(retraction, points, dyadic_grid() if t_grid is None else t_grid)


def retraction_operator_experiment(omega, metric, p, eps_schedule, rng, pullback_beta=None):
    """Sampled sup of ‖R_ε ω‖ / ‖ω‖ over the test family, per ε in the schedule.

    The family members carry the base norm of ``omega``: the absolute norms at
    the maximizing β are scaled by (∫_M |ω|_M^p)^{1/p}, and a zero ω gives zero
    rows. Also reports the bound from the fitted exponents (None when p is at
    or below the threshold), ‖r_ε^* ω‖ / ‖ω‖ and ‖R_ε ω − R_0 ω‖ / ‖ω‖ at
    ``pullback_beta`` (half of the admissible range by default).
    """
    omega.check(metric)
    model = HornModel(metric.alpha, metric.m, omega.k, p)
    fit = horn_growth(metric, rng)
    logger.info(f'Horn growth exponents: λ̂={fit.lam:.6g}, μ̂={fit.mu:.6g}.')
    beta_p = model.beta_max / 2 if pullback_beta is None else float(pullback_beta)
    scale = base_integral(omega, metric, p) ** (1.0 / p)
    experiment = RetractionExperiment(float(metric.alpha), metric.m, omega.k, float(p), fit.lam,
                                      fit.mu)
    for eps in eps_schedule:
        eps = float(eps)
        if not 0 <= eps < 1:
            raise ValueError(f'eps must lie in [0, 1), got {eps}.')
        try:
            bound = homotopy_bound_constant(p, fit.lam, fit.mu, omega.k, eps)
        except ValueError as err:
            logger.warning(str(err))
            bound = None
        if scale == 0.0:
            experiment.rows.append((eps, 0.0, 0.0, bound, 0.0, 0.0, 0.0, 0.0))
            continue
        beta, ratio = model.sup_ratio(eps)
        experiment.rows.append((eps, beta, ratio, bound, model.pullback_ratio(beta_p, eps),
                                model.gap_ratio(beta_p, eps), scale * model.form_norm(beta),
                                scale * model.operator_norm(beta, eps)))
        logger.debug(f'eps={eps:.3g}: sup ratio {ratio:.6g} at β={beta:.6g}, bound {bound}.')
    return experiment
