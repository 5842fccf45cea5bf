"""Cell towers: intervals and points of ℝ, graphs and bands over lower cells."""
import logging

import numpy as np

from lpderham.exceptions import CheckFailed, DegenerateInputError
from lpderham.lifts.expressions import Expression, verify_lipschitz

logger = logging.getLogger('logger')

SAMPLE_MARGIN = 1e-6
DEGENERATE_FIBER = 1e-300


def _as_expression(value, n_vars, lipschitz=None):
    if isinstance(value, Expression):
        return value
    return Expression(value, n_vars, lipschitz=lipschitz)


class Cell:
    ambient_dim = 1
    dimension = 1
    base = None

    def functions(self):
        """The bounding functions of this level."""
        return []

    def tower(self):
        """Levels from the bottom of the tower up to this cell."""
        levels = [] if self.base is None else self.base.tower()
        return levels + [self]

    def smooth_margin(self, Q):
        """Smallest kink margin of every bounding function along the tower."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        margin = np.full(Q.shape[0], np.inf)
        for level in self.tower():
            X = Q[:, :level.ambient_dim - 1]
            for f in level.functions():
                margin = np.minimum(margin, f.smooth_margin(X))
        return margin


class Interval(Cell):
    def __init__(self, a, b):
        if not a < b:
            raise ValueError(f'Interval ({a}, {b}) is empty.')
        self.a, self.b = float(a), float(b)

    def sample(self, rng, count, margin=SAMPLE_MARGIN):
        width = self.b - self.a
        u = rng.uniform(margin, 1 - margin, size=count)
        return (self.a + u * width)[:, None]

    def contains(self, Q, tol=1e-12):
        Q = np.atleast_2d(Q)
        return (Q[:, 0] >= self.a - tol) & (Q[:, 0] <= self.b + tol)

    def __repr__(self):
        return f'Interval({self.a}, {self.b})'


class Point(Cell):
    dimension = 0

    def __init__(self, c):
        self.c = float(c)

    def sample(self, rng, count, margin=SAMPLE_MARGIN):
        return np.full((count, 1), self.c)

    def contains(self, Q, tol=1e-12):
        return np.abs(np.atleast_2d(Q)[:, 0] - self.c) <= tol

    def __repr__(self):
        return f'Point({self.c})'


class Graph(Cell):
    """{(x, θ(x)) : x in the base cell}."""

    def __init__(self, base, theta, lipschitz=None):
        self.base = base
        self.theta = _as_expression(theta, base.ambient_dim, lipschitz)
        self.ambient_dim = base.ambient_dim + 1
        self.dimension = base.dimension

    def functions(self):
        return [self.theta]

    def sample(self, rng, count, margin=SAMPLE_MARGIN):
        X = self.base.sample(rng, count, margin)
        return np.hstack([X, self.theta(X)[:, None]])

    def contains(self, Q, tol=1e-12):
        Q = np.atleast_2d(Q)
        X = Q[:, :-1]
        return self.base.contains(X, tol) & (np.abs(Q[:, -1] - self.theta(X)) <= tol)

    def __repr__(self):
        return f'Graph({self.theta.expr} over {self.base})'


class Band(Cell):
    """{(x, y) : θ₁(x) < y < θ₂(x)} over the base cell."""

    def __init__(self, base, lower, upper, lipschitz_lower=None, lipschitz_upper=None):
        self.base = base
        self.lower = _as_expression(lower, base.ambient_dim, lipschitz_lower)
        self.upper = _as_expression(upper, base.ambient_dim, lipschitz_upper)
        self.ambient_dim = base.ambient_dim + 1
        self.dimension = base.dimension + 1

    def functions(self):
        return [self.lower, self.upper]

    def width(self, X):
        return self.upper(X) - self.lower(X)

    def tau(self, Q):
        """Fiber parameter τ = (y − θ₁(x)) / (θ₂(x) − θ₁(x))."""
        Q = np.atleast_2d(Q)
        X = Q[:, :-1]
        width = self.width(X)
        if np.any(np.abs(width) < DEGENERATE_FIBER):
            raise DegenerateInputError('τ is undefined where θ₁ = θ₂.')
        return (Q[:, -1] - self.lower(X)) / width

    def sample(self, rng, count, margin=SAMPLE_MARGIN):
        X = self.base.sample(rng, count, margin)
        u = rng.uniform(margin, 1 - margin, size=count)
        return np.hstack([X, (self.lower(X) + u * self.width(X))[:, None]])

    def contains(self, Q, tol=1e-12):
        Q = np.atleast_2d(Q)
        X = Q[:, :-1]
        y = Q[:, -1]
        return self.base.contains(X, tol) & (y >= self.lower(X) - tol) & (y <= self.upper(X) + tol)

    def check_ordering(self, rng, count=1000):
        """θ₁ < θ₂ on sampled base points; returns the smallest sampled width."""
        X = self.base.sample(rng, count)
        width = self.width(X)
        i = int(np.argmin(width))
        if width[i] < 0:
            raise CheckFailed(f'θ₁ > θ₂ at {X[i].tolist()}.',
                              witness={'x': X[i].tolist(), 'width': float(width[i])})
        return float(width[i])

    def __repr__(self):
        return f'Band({self.lower.expr} < y < {self.upper.expr} over {self.base})'


def verify_declared_constants(cell, rng, pairs=100_000, radius=0.1):
    """Sample nearby point pairs in the base of every level and check declared constants."""
    report = {}
    for depth, level in enumerate(cell.tower()):
        if level.base is None:
            continue
        for f in level.functions():
            if f.lipschitz is None:
                continue
            A = level.base.sample(rng, pairs)
            B = A + radius * rng.uniform(-1, 1, size=A.shape)
            inside = level.base.contains(B)
            report[f'{depth}:{f.expr}'] = verify_lipschitz(f, A[inside], B[inside])
    return report
