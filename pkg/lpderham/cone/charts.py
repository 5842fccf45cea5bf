"""Integrals over bi-Lipschitz chart images.

For an L-bi-Lipschitz chart φ: D ⊂ ℝ^k → ℝ^N the area factor
J = √det(Dφᵀ Dφ) lies in [L^{−k}, L^k], so for f ≥ 0 the surface integral
∫_{φ(D)} f is squeezed between L^{∓k} ∫_D f ∘ φ.
"""
import logging
from dataclasses import dataclass
from itertools import product

import numpy as np
import sympy

from lpderham.exceptions import DimensionMismatch
from lpderham.lifts.expressions import Expression, coordinate_symbols, parse

logger = logging.getLogger('logger')

GAUSS_ORDER = 16


class Chart:
    """φ with components given as expressions in x0, …, x{k−1}."""

    def __init__(self, components, k, lipschitz):
        self.k = k
        self.ambient_dim = len(components)
        if self.ambient_dim < k:
            raise DimensionMismatch(f'A chart of a {k}-dimensional surface into R^{self.ambient_dim}.')
        self.lipschitz = float(lipschitz)
        self.symbols = list(coordinate_symbols(k))
        self.exprs = [parse(c, k) for c in components]
        self._f = [sympy.lambdify(self.symbols, e, 'numpy') for e in self.exprs]
        self._df = [[sympy.lambdify(self.symbols, sympy.diff(e, s), 'numpy') for s in self.symbols]
                    for e in self.exprs]

    @staticmethod
    def _column(fn, X):
        return np.broadcast_to(np.asarray(fn(*X.T), dtype=float), (X.shape[0],))

    def __call__(self, X):
        X = np.atleast_2d(X)
        return np.stack([self._column(f, X) for f in self._f], axis=1)

    def area_factor(self, X):
        X = np.atleast_2d(X)
        D = np.stack([np.stack([self._column(g, X) for g in row], axis=1) for row in self._df],
                     axis=1)
        return np.sqrt(np.linalg.det(np.einsum('nji,njk->nik', D, D)))


@dataclass
class ChartCheck:
    surface_integral: float
    flat_integral: float
    lower: float
    upper: float
    area_min: float
    area_max: float
    holds: bool

    def summary(self):
        return dict(self.__dict__)


def gauss_box(box, order=GAUSS_ORDER):
    """Tensor Gauss-Legendre nodes and weights on a box [(a_1, b_1), …]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    axes = [((b - a) / 2 * nodes + (a + b) / 2, (b - a) / 2 * weights) for a, b in box]
    X = np.array(list(product(*[x for x, _ in axes])))
    W = np.prod(np.array(list(product(*[w for _, w in axes]))), axis=1)
    return X, W


def chart_integral_check(chart, integrand, box, order=GAUSS_ORDER, rel_tol=1e-9):
    """∫_{φ(D)} f against the bi-Lipschitz bracket, f an Expression on the ambient space."""
    if len(box) != chart.k:
        raise DimensionMismatch(f'A {len(box)}-dimensional box for a {chart.k}-dimensional chart.')
    if not isinstance(integrand, Expression) or integrand.n_vars != chart.ambient_dim:
        raise DimensionMismatch('The integrand must be a function on the ambient space.')
    X, W = gauss_box(box, order)
    values = integrand(chart(X))
    if np.any(values < 0):
        raise ValueError('The bracket holds for nonnegative integrands.')
    area = chart.area_factor(X)
    surface = float(np.dot(W, values * area))
    flat = float(np.dot(W, values))
    factor = chart.lipschitz ** chart.k
    lower, upper = flat / factor, flat * factor
    slack = rel_tol * max(1.0, abs(upper))
    holds = lower - slack <= surface <= upper + slack
    if not holds:
        logger.warning(f'Surface integral {surface:.6g} outside [{lower:.6g}, {upper:.6g}]; '
                       f'the chart is not {chart.lipschitz}-bi-Lipschitz on the box.')
    return ChartCheck(surface, flat, lower, upper, float(area.min()), float(area.max()), holds)
