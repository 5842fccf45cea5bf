"""Function descriptors: sympy expressions in x0, x1, … with a declared Lipschitz constant.

The grammar is polynomials, rational powers (roots), abs, min and max, closed
under composition. Expressions are compiled with ``lambdify`` and evaluated on
arrays of points of shape (N, n).
"""
import logging

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr

from lpderham.exceptions import CheckFailed, DimensionMismatch

logger = logging.getLogger('logger')

FD_STEP = 1e-6
_ALLOWED_FUNCTIONS = (sympy.Abs, sympy.Min, sympy.Max)


def coordinate_symbols(n_vars):
    names = ' '.join(f'x{i}' for i in range(n_vars))
    return sympy.symbols(names, real=True, seq=True) if n_vars else ()


def parameter_symbol():
    return sympy.Symbol('t', positive=True)


def parse(text, n_vars, with_t=False):
    """Parse ``text`` in the grammar; reject unknown symbols and functions."""
    symbols = list(coordinate_symbols(n_vars))
    local = {str(s): s for s in symbols}
    if with_t:
        local['t'] = parameter_symbol()
    local.update({'abs': sympy.Abs, 'Abs': sympy.Abs, 'min': sympy.Min, 'max': sympy.Max,
                  'sqrt': sympy.sqrt})
    expr = parse_expr(str(text), local_dict=local) if not isinstance(text, sympy.Basic) else text
    expr = sympy.sympify(expr)
    unknown = expr.free_symbols - set(local.values())
    if unknown:
        raise ValueError(f'Unknown symbols {sorted(map(str, unknown))} in {text!r}.')
    bad = [f for f in expr.atoms(sympy.Function) if not isinstance(f, _ALLOWED_FUNCTIONS)]
    if bad:
        raise ValueError(f'Functions {sorted(map(str, bad))} are outside the grammar.')
    return expr


def _broadcast(value, count):
    return np.broadcast_to(np.asarray(value, dtype=float), (count,)).copy()


def _points(X, n_vars):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != n_vars:
        raise DimensionMismatch(f'Points with {X.shape[1]} coordinates for a function of {n_vars}.')
    return X


class Expression:
    """A Lipschitz function ℝⁿ → ℝ from the expression grammar."""

    def __init__(self, text, n_vars, lipschitz=None):
        self.n_vars = n_vars
        self.expr = parse(text, n_vars)
        self.lipschitz = None if lipschitz is None else float(lipschitz)
        self.symbols = list(coordinate_symbols(n_vars))
        self._f = sympy.lambdify(self.symbols, self.expr, 'numpy')
        self.has_kinks = self.expr.has(sympy.Abs, sympy.Min, sympy.Max)
        self._grad = None
        if not self.expr.has(sympy.Min, sympy.Max):
            self._grad = [sympy.lambdify(self.symbols, sympy.diff(self.expr, s), 'numpy')
                          for s in self.symbols]
        self._kinks = self._kink_functions()

    def __repr__(self):
        return f'Expression({self.expr}, L={self.lipschitz})'

    def __call__(self, X):
        X = _points(X, self.n_vars)
        return _broadcast(self._f(*X.T), X.shape[0])

    def gradient(self, X):
        """(N, n) array of partial derivatives; central differences across min/max."""
        X = _points(X, self.n_vars)
        if self._grad is not None:
            return np.stack([_broadcast(g(*X.T), X.shape[0]) for g in self._grad], axis=1)
        out = np.empty_like(X)
        for j in range(self.n_vars):
            step = np.zeros(self.n_vars)
            step[j] = FD_STEP
            out[:, j] = (self(X + step) - self(X - step)) / (2 * FD_STEP)
        return out

    def _kink_functions(self):
        kinks = []
        for node in sympy.preorder_traversal(self.expr):
            if isinstance(node, sympy.Abs):
                kinks.append(node.args[0])
            elif isinstance(node, (sympy.Min, sympy.Max)):
                args = node.args
                kinks.extend(a - b for i, a in enumerate(args) for b in args[i + 1:])
        return [sympy.lambdify(self.symbols, k, 'numpy') for k in kinks]

    def smooth_margin(self, X):
        """Distance-like margin to the non-smooth locus: min |kink argument|."""
        X = _points(X, self.n_vars)
        margin = np.full(X.shape[0], np.inf)
        for k in self._kinks:
            margin = np.minimum(margin, np.abs(_broadcast(k(*X.T), X.shape[0])))
        return margin


def verify_lipschitz(expr, points_a, points_b, slack=1e-9):
    """Largest |f(p) − f(q)| / |p − q| over the pairs; CheckFailed above the declared L."""
    points_a, points_b = _points(points_a, expr.n_vars), _points(points_b, expr.n_vars)
    distance = np.linalg.norm(points_a - points_b, axis=1)
    keep = distance > 0
    quotients = np.abs(expr(points_a[keep]) - expr(points_b[keep])) / distance[keep]
    worst = float(quotients.max(initial=0.0))
    if expr.lipschitz is not None and worst > expr.lipschitz * (1 + slack):
        i = int(np.argmax(quotients))
        raise CheckFailed(f'{expr.expr} has difference quotient {worst:.6g} above L={expr.lipschitz}.',
                          witness={'p': points_a[keep][i].tolist(), 'q': points_b[keep][i].tolist(),
                                   'quotient': worst, 'declared': expr.lipschitz})
    return worst
