"""Warped cones M × (0, 1] with g = dr² + r^{2α} g_M over the flat unit m-torus.

A radially constant k-form has pointwise norm r^{−kα} |ω|_M and the volume
form is r^{αm} dr ∧ dV_M, so its truncated L^p norm separates into an
r-integral with a closed form and an integral over M.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

logger = logging.getLogger('logger')

TORUS_POINTS = 64
LOG_CASE_TOL = 1e-12


def as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class ConeMetric:
    alpha: Fraction
    m: int

    def __post_init__(self):
        object.__setattr__(self, 'alpha', as_fraction(self.alpha))
        if self.alpha < 1:
            raise ValueError(f'The warping exponent must be at least 1, got {self.alpha}.')
        if self.m < 1:
            raise ValueError(f'The base dimension must be at least 1, got {self.m}.')

    @property
    def base_volume(self):
        return 1.0

    def r_exponent(self, k, p):
        """Exponent e of r in |ω|^p dV: e = αm − αkp."""
        a = float(self.alpha)
        return a * self.m - a * k * p


class RadialForm:
    """A radially constant k-form, known through its base norm |ω|_M on the torus."""

    def __init__(self, k, base_norm=1.0, name=None):
        if k < 0:
            raise ValueError(f'Degree {k} is negative.')
        self.k = k
        self._base_norm = base_norm
        self.name = name or 'radial'

    def base_norm(self, Y):
        """|ω|_M at torus points Y of shape (N, m)."""
        Y = np.atleast_2d(Y)
        if callable(self._base_norm):
            return np.abs(np.asarray(self._base_norm(Y), dtype=float))
        return np.full(Y.shape[0], abs(float(self._base_norm)))

    def check(self, metric):
        if self.k > metric.m:
            raise ValueError(f'A {self.k}-form has no base part on a {metric.m}-torus.')


@dataclass(frozen=True)
class TruncationSchedule:
    j_min: int = 4
    j_max: int = 20
    torus_points: int = TORUS_POINTS

    def __post_init__(self):
        if not self.j_max > self.j_min >= 0:
            raise ValueError(f'Schedule needs j_max > j_min >= 0, got {self.j_min}:{self.j_max}.')

    @property
    def eps(self):
        return 2.0 ** -np.arange(self.j_min, self.j_max + 1)

    @classmethod
    def parse(cls, text):
        j_min, j_max = (int(v) for v in str(text).split(':'))
        return cls(j_min, j_max)


def critical_exponent(alpha, m, k):
    """p* = (αm + 1) / (kα): radially constant k-forms are L^p iff p < p*."""
    if k == 0:
        raise ValueError('The critical exponent is defined for k >= 1.')
    alpha = as_fraction(alpha)
    return (alpha * m + 1) / (k * alpha)


def r_integral(e, lower, upper=1.0):
    """∫_lower^upper r^e dr, with the logarithmic case at e = −1."""
    if abs(e + 1) < LOG_CASE_TOL:
        return math.log(upper / lower)
    return (upper ** (e + 1) - lower ** (e + 1)) / (e + 1)


def torus_integral(fn, m, points_per_axis=None):
    """Periodic trapezoid rule on [0, 1)^m (about 64² nodes beyond two dimensions)."""
    if points_per_axis is None:
        points_per_axis = TORUS_POINTS if m <= 2 else max(2, round(TORUS_POINTS ** (2 / m)))
    axis = np.arange(points_per_axis) / points_per_axis
    Y = np.array(list(product(axis, repeat=m)))
    return float(np.mean(fn(Y)))


def base_integral(omega, metric, p, points_per_axis=None):
    """∫_M |ω|_M^p dV_M."""
    return metric.base_volume * torus_integral(lambda Y: omega.base_norm(Y) ** p, metric.m,
                                               points_per_axis)


def lp_norm_truncated(omega, metric, p, eps, points_per_axis=None):
    """(∫_ε^1 r^{αm − αkp} dr · ∫_M |ω|_M^p dV_M)^{1/p}."""
    if p < 1:
        raise ValueError(f'p must be at least 1, got {p}.')
    if not 0 < eps < 1:
        raise ValueError(f'eps must lie in (0, 1), got {eps}.')
    omega.check(metric)
    base = base_integral(omega, metric, p, points_per_axis)
    if base == 0.0:
        return 0.0
    return (r_integral(metric.r_exponent(omega.k, p), eps) * base) ** (1.0 / p)
