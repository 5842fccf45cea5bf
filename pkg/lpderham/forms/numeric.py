"""Pointwise-evaluable forms, comass norms and line integrals.

A ``NumericForm`` wraps an evaluator ``point -> {I: float}``. Its exterior
derivative is either supplied (``derivative=``) or taken by central finite
differences with step ``FD_STEP``.
"""
import logging
import math
from itertools import combinations

import numpy as np
from scipy.integrate import quad

from lpderham.exceptions import DimensionMismatch, QuadratureError
from lpderham.forms.exterior import PolyForm

logger = logging.getLogger('logger')

FD_STEP = 1e-6
DEFAULT_FRAME_BUDGET = 10_000


class NumericForm:
    def __init__(self, n, k, evaluator, derivative=None, closed=False, name=None):
        if not 0 <= k <= n:
            raise ValueError(f'Degree {k} is outside [0, {n}].')
        self.n = n
        self.k = k
        self._evaluator = evaluator
        self._derivative = derivative
        self.closed = closed
        self.name = name or 'numeric'

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f'Point of shape {x.shape} for a form on R^{self.n}.')
        return self._evaluator(x)

    def __repr__(self):
        return f'NumericForm({self.name}, n={self.n}, k={self.k})'

    @property
    def has_derivative(self):
        return self._derivative is not None

    def d(self):
        if self._derivative is not None:
            return self._derivative
        if self.k == self.n:
            raise ValueError('A top-degree form has no derivative in this space.')
        if self.closed:
            return zero_numeric_form(self.n, self.k + 1)
        return finite_difference_derivative(self)

    def combine(self, other, a=1.0, b=1.0):
        """The form a·self + b·other."""
        if (self.n, self.k) != (other.n, other.k):
            raise DimensionMismatch('Forms of different shape cannot be combined.')

        def evaluate(x):
            left, right = self(x), other(x)
            keys = set(left) | set(right)
            return {I: a * left.get(I, 0.0) + b * right.get(I, 0.0) for I in keys}

        derivative = None
        if self.has_derivative and other.has_derivative:
            derivative = self.d().combine(other.d(), a, b)
        return NumericForm(self.n, self.k, evaluate, derivative=derivative,
                           closed=self.closed and other.closed,
                           name=f'({a}·{self.name} + {b}·{other.name})')

    def __add__(self, other):
        return self.combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self.combine(other, 1.0, -1.0)

    def __neg__(self):
        return self.shift(0.0, scale=-1.0)

    def shift(self, constant, scale=1.0):
        """scale·self + constant, for 0-forms (constant must be 0 otherwise)."""
        if self.k != 0 and constant:
            raise ValueError('Only 0-forms can be shifted by a constant.')
        base = self

        def evaluate(x):
            values = base(x)
            if base.k == 0:
                return {(): scale * values.get((), 0.0) + constant}
            return {I: scale * v for I, v in values.items()}

        derivative = None
        if base.has_derivative:
            derivative = base.d().shift(0.0, scale=scale)
        return NumericForm(self.n, self.k, evaluate, derivative=derivative,
                           closed=self.closed, name=self.name)


def zero_numeric_form(n, k):
    return NumericForm(n, k, lambda x: {}, closed=True, name='zero')


def finite_difference_derivative(form, h=FD_STEP):
    n, k = form.n, form.k
    targets = list(combinations(range(n), k + 1))

    def evaluate(x):
        out = {}
        cache = {}
        for j in range(n):
            step = np.zeros(n)
            step[j] = h
            cache[j] = (form(x + step), form(x - step))
        for J in targets:
            total = 0.0
            for pos, j in enumerate(J):
                I = J[:pos] + J[pos + 1:]
                plus, minus = cache[j]
                partial = (plus.get(I, 0.0) - minus.get(I, 0.0)) / (2 * h)
                total += -partial if pos % 2 else partial
            out[J] = total
        return out

    return NumericForm(n, k + 1, evaluate, name=f'd({form.name})')


def from_polyform(omega):
    """Float view of a PolyForm without the parameter variable."""
    if omega.has_t:
        raise ValueError('Only forms without the parameter variable have a numeric view.')
    evaluate_all = omega.float_evaluator()

    def evaluate(x):
        return {I: float(v[0]) for I, v in evaluate_all(x[None, :]).items()}

    derivative = None
    closed = omega.k == omega.n
    if omega.k < omega.n:
        d_omega = omega.d()
        closed = d_omega.is_zero()
        derivative = zero_numeric_form(omega.n, omega.k + 1) if closed \
            else from_polyform(d_omega)
    return NumericForm(omega.n, omega.k, evaluate, derivative=derivative,
                       closed=closed, name='poly')


def as_numeric(form):
    return from_polyform(form) if isinstance(form, PolyForm) else form


def winding_form(center=(0.0, 0.0)):
    """(x dy − y dx)/(x² + y²) about ``center``; closed, not exact on the punctured plane."""
    c = np.asarray(center, dtype=float)

    def evaluate(p):
        x, y = p - c
        r2 = x * x + y * y
        if r2 == 0.0:
            raise ValueError('The winding form is undefined at its center.')
        return {(0,): -y / r2, (1,): x / r2}

    return NumericForm(2, 1, evaluate, derivative=zero_numeric_form(2, 2), closed=True,
                       name='winding')


def pointwise_norm(form, x, budget=DEFAULT_FRAME_BUDGET, rng=None):
    """Comass of ``form`` at ``x``.

    Exact for k ∈ {0, 1, n}; otherwise a lower bound from ``budget`` random
    orthonormal k-frames.
    """
    if isinstance(form, PolyForm):
        if form.has_t:
            raise ValueError('Comass is taken on forms without the parameter variable.')
        values = {I: float(v[0]) for I, v in form.float_evaluator()(
            np.asarray(x, dtype=float)[None, :]).items()}
    else:
        values = form(x)
    n, k = form.n, form.k
    if k == 0:
        return abs(values.get((), 0.0))
    if k == 1:
        return math.sqrt(sum(values.get((i,), 0.0) ** 2 for i in range(n)))
    if k == n:
        return abs(values.get(tuple(range(n)), 0.0))
    index_sets = [I for I, v in values.items() if v != 0.0]
    if not index_sets:
        return 0.0
    rng = np.random.default_rng(0) if rng is None else rng
    coeffs = np.array([values[I] for I in index_sets])
    best = 0.0
    remaining = budget
    while remaining > 0:
        batch = min(remaining, 2048)
        frames, _ = np.linalg.qr(rng.standard_normal((batch, n, k)))
        minors = np.stack([np.linalg.det(frames[:, list(I), :]) for I in index_sets], axis=1)
        best = max(best, float(np.max(np.abs(minors @ coeffs))))
        remaining -= batch
    return best


class Path:
    """A piecewise-smooth curve given as pieces (γ, γ′) on [0, 1]."""

    def pieces(self):
        raise NotImplementedError


class PolygonalPath(Path):
    def __init__(self, points, closed=False):
        self.points = np.asarray(points, dtype=float)
        if self.points.ndim != 2 or len(self.points) < 2:
            raise ValueError('A polygonal path needs at least two points.')
        self.closed = closed

    def pieces(self):
        pts = list(self.points)
        if self.closed:
            pts.append(pts[0])
        out = []
        for a, b in zip(pts[:-1], pts[1:]):
            a, b = np.array(a), np.array(b)
            out.append((lambda s, a=a, b=b: a + s * (b - a), lambda s, a=a, b=b: b - a))
        return out


class CircularPath(Path):
    def __init__(self, center, radius, turns=1):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.turns = turns

    def pieces(self):
        c, r, w = self.center, self.radius, 2 * math.pi * self.turns

        def gamma(s):
            return c + r * np.array([math.cos(w * s), math.sin(w * s)])

        def velocity(s):
            return r * w * np.array([-math.sin(w * s), math.cos(w * s)])

        return [(gamma, velocity)]


def quad_checked(fn, a, b, tol, limit):
    result = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    value, abserr = result[0], result[1]
    # a warning alone (e.g. roundoff at machine precision) is fine if the error estimate is
    if len(result) > 3 and abserr > 10 * tol * max(1.0, abs(value)):
        raise QuadratureError(f'Quadrature on [{a}, {b}] missed tolerance {tol}: {result[3]}')
    return value


def line_integral(form, path, tol=1e-10, limit=200):
    """∫_γ ω for a 1-form by adaptive quadrature on every piece of the path."""
    form = as_numeric(form)
    if form.k != 1:
        raise ValueError(f'Line integrals need a 1-form, got degree {form.k}.')
    total = 0.0
    for gamma, velocity in path.pieces():
        def integrand(s, gamma=gamma, velocity=velocity):
            values = form(gamma(s))
            v = velocity(s)
            return sum(values.get((i,), 0.0) * v[i] for i in range(form.n))

        total += quad_checked(integrand, 0.0, 1.0, tol, limit)
    return total


def segment_residual(primitive, form, points, directions, h=1e-3, tol=1e-12):
    """Largest |ξ(x+hv) − ξ(x−hv) − ∫ω| / (2h) over the given points.

    Verifies dξ = ω for a 0-form primitive of a 1-form by quadrature.
    """
    primitive, form = as_numeric(primitive), as_numeric(form)
    if primitive.k != 0 or form.k != 1:
        raise ValueError('segment_residual compares a 0-form with a 1-form.')
    worst = 0.0
    for x, v in zip(np.asarray(points, float), np.asarray(directions, float)):
        a, b = x - h * v, x + h * v
        increment = line_integral(form, PolygonalPath([a, b]), tol=tol)
        difference = primitive(b).get((), 0.0) - primitive(a).get((), 0.0)
        worst = max(worst, abs(difference - increment) / (2 * h))
    return worst
