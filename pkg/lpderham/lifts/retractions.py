"""Deformation retractions r(q, t) onto an apex, and standard lifts to graphs and bands.

Every retraction evaluates on arrays of points (N, dim) at one parameter t and
provides its Jacobian in q. For lifts the Jacobian is lower triangular: the
base block Dr′_t, then one row per level, so |det Dr_t| is det Dr′_t times the
fiber derivative ∂y′/∂y of every band level.
"""
import logging

import numpy as np
import sympy

from lpderham.exceptions import DegenerateInputError, DimensionMismatch
from lpderham.lifts.cells import DEGENERATE_FIBER, Band, Graph
from lpderham.lifts.expressions import coordinate_symbols, parameter_symbol, parse

logger = logging.getLogger('logger')


class Retraction:
    dim = None

    def __call__(self, Q, t):
        Q = self._points(Q)
        if t == 1.0:
            return Q.copy()
        return self._evaluate(Q, float(t))

    def _points(self, Q):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim == 1:
            Q = Q[None, :]
        if Q.shape[1] != self.dim:
            raise DimensionMismatch(f'Points in R^{Q.shape[1]} for a retraction of R^{self.dim}.')
        return Q

    def _evaluate(self, Q, t):
        raise NotImplementedError

    def jacobian(self, Q, t):
        """(N, dim, dim) derivative in q."""
        raise NotImplementedError

    def det(self, Q, t):
        return np.linalg.det(self.jacobian(Q, t))

    @property
    def apex(self):
        return self._evaluate(np.zeros((1, self.dim)), 0.0)[0]


class DiagonalPowerRetraction(Retraction):
    """r_t(x)_i = t^{w_i} x_i."""

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError('Diagonal power weights must be positive.')
        self.dim = len(self.weights)

    def _evaluate(self, Q, t):
        return Q * t ** self.weights

    def jacobian(self, Q, t):
        Q = self._points(Q)
        return np.broadcast_to(np.diag(float(t) ** self.weights),
                               (Q.shape[0], self.dim, self.dim)).copy()

    def det(self, Q, t):
        Q = self._points(Q)
        return np.full(Q.shape[0], float(t) ** self.weights.sum())

    @property
    def apex(self):
        return np.zeros(self.dim)

    def __repr__(self):
        return f'DiagonalPowerRetraction({self.weights.tolist()})'


class CustomRetraction(Retraction):
    """Components given as expressions in x0, …, x{n−1} and t."""

    def __init__(self, components):
        self.dim = len(components)
        self.symbols = list(coordinate_symbols(self.dim))
        self.t = parameter_symbol()
        self.exprs = [parse(c, self.dim, with_t=True) for c in components]
        args = self.symbols + [self.t]
        self._f = [sympy.lambdify(args, e, 'numpy') for e in self.exprs]
        self._df = [[sympy.lambdify(args, sympy.diff(e, s), 'numpy') for s in self.symbols]
                    for e in self.exprs]

    def _column(self, fn, Q, t):
        return np.broadcast_to(np.asarray(fn(*Q.T, t), dtype=float), (Q.shape[0],))

    def _evaluate(self, Q, t):
        return np.stack([self._column(f, Q, t) for f in self._f], axis=1)

    def jacobian(self, Q, t):
        Q = self._points(Q)
        return np.stack([np.stack([self._column(g, Q, float(t)) for g in row], axis=1)
                         for row in self._df], axis=1)

    def __repr__(self):
        return f'CustomRetraction({[str(e) for e in self.exprs]})'


class StandardLift(Retraction):
    """Lift of r′ on the base to a graph or band cell over it.

    Graph: r_t(x, y) = (r′_t x, θ(r′_t x)).
    Band:  r_t(x, y) = (r′_t x, (1 − τ) θ₁(r′_t x) + τ θ₂(r′_t x)), τ = τ(x, y).
    """

    def __init__(self, base_retraction, cell):
        if not isinstance(cell, (Graph, Band)):
            raise TypeError('Standard lifts are defined over graph and band cells.')
        if base_retraction.dim != cell.base.ambient_dim:
            raise DimensionMismatch(
                f'Base retraction acts on R^{base_retraction.dim}, the cell base lives in '
                f'R^{cell.base.ambient_dim}.')
        self.base = base_retraction
        self.cell = cell
        self.dim = cell.ambient_dim

    def _evaluate(self, Q, t):
        X, y = Q[:, :-1], Q[:, -1]
        X_t = self.base(X, t)
        if isinstance(self.cell, Graph):
            y_t = self.cell.theta(X_t)
        else:
            tau = self._tau(X, y)
            y_t = (1 - tau) * self.cell.lower(X_t) + tau * self.cell.upper(X_t)
        return np.hstack([X_t, y_t[:, None]])

    def _tau(self, X, y):
        width = self.cell.width(X)
        if np.any(np.abs(width) < DEGENERATE_FIBER):
            raise DegenerateInputError('Lift evaluated on a degenerate fiber θ₁ = θ₂.')
        return (y - self.cell.lower(X)) / width

    def _fiber_row(self, X, y, t):
        """(∂y′/∂x, ∂y′/∂y) at the points."""
        X_t = self.base(X, t)
        D_base = self.base.jacobian(X, t)
        if isinstance(self.cell, Graph):
            row = np.einsum('ni,nij->nj', self.cell.theta.gradient(X_t), D_base)
            return row, np.zeros(X.shape[0])
        lower, upper = self.cell.lower, self.cell.upper
        width = upper(X) - lower(X)
        if np.any(np.abs(width) < DEGENERATE_FIBER):
            raise DegenerateInputError('Jacobian evaluated on a degenerate fiber θ₁ = θ₂.')
        tau = (y - lower(X)) / width
        width_t = upper(X_t) - lower(X_t)
        grad_lo, grad_up = lower.gradient(X), upper.gradient(X)
        d_tau = (-grad_lo * width[:, None] - (y - lower(X))[:, None] * (grad_up - grad_lo)) \
            / (width ** 2)[:, None]
        mixed = (1 - tau)[:, None] * lower.gradient(X_t) + tau[:, None] * upper.gradient(X_t)
        row = np.einsum('ni,nij->nj', mixed, D_base) + width_t[:, None] * d_tau
        return row, width_t / width

    def jacobian(self, Q, t):
        Q = self._points(Q)
        X, y = Q[:, :-1], Q[:, -1]
        N, m = X.shape
        D = np.zeros((N, m + 1, m + 1))
        D[:, :m, :m] = self.base.jacobian(X, t)
        row, fiber = self._fiber_row(X, y, t)
        D[:, m, :m] = row
        D[:, m, m] = fiber
        return D

    def det(self, Q, t):
        """det Dr′_t times ∂y′/∂y; graph levels count as 1 (intrinsic to the cell)."""
        Q = self._points(Q)
        X, y = Q[:, :-1], Q[:, -1]
        base_det = self.base.det(X, t)
        if isinstance(self.cell, Graph):
            return base_det
        return base_det * self.cell.width(self.base(X, t)) / self.cell.width(X)

    @property
    def apex(self):
        x0 = np.asarray(self.base.apex, dtype=float)[None, :]
        if isinstance(self.cell, Graph):
            return np.append(x0[0], self.cell.theta(x0)[0])
        return np.append(x0[0], self.cell.lower(x0)[0])

    def __repr__(self):
        return f'StandardLift({self.base} to {self.cell})'


def lift_through(cell, base_retraction):
    """Lift ``base_retraction`` level by level up to ``cell``."""
    if cell.ambient_dim == base_retraction.dim:
        return base_retraction
    if cell.base is None:
        raise DimensionMismatch('The base retraction does not match any level of the tower.')
    return StandardLift(lift_through(cell.base, base_retraction), cell)
