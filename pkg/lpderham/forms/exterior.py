"""Polynomial differential forms with exact rational coefficients.

A ``PolyForm`` on ℝⁿ (optionally times the parameter interval) stores one
polynomial per strictly increasing index set. Index sets are 0-based; when a
form carries the parameter variable, ``dt`` has index ``n``. The public
operations are ``wedge``, ``exterior_derivative``, ``pullback``, ``split_dt``
and ``interior_product``; all of them are exact.
"""
import logging

from sympy.polys.domains import QQ

from lpderham.exceptions import DimensionMismatch
from lpderham.forms.polynomial import (as_polynomial, compose, evaluate_exact,
                                       float_evaluator, poly_from_json,
                                       poly_to_json, polynomial_ring, to_qq)

logger = logging.getLogger('logger')


def merge_sign(I, J):
    """Sign of the permutation sorting the concatenation ``I + J``; 0 if they overlap."""
    if set(I) & set(J):
        return 0
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


def permutation_sign(seq):
    """Sign of the permutation that sorts ``seq``; 0 on repeated entries."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq))
                     if seq[a] > seq[b])
    return -1 if inversions % 2 else 1


class PolyForm:
    """A k-form whose coefficients are polynomials over QQ."""

    def __init__(self, n, k, components=None, has_t=False):
        total = n + (1 if has_t else 0)
        if k < 0:
            raise ValueError(f'Degree {k} is negative.')
        if k > total and components:
            raise ValueError(f'Only the zero {k}-form exists in dimension {total}.')
        self.n = n
        self.k = k
        self.has_t = has_t
        self.ring = polynomial_ring(n, has_t)
        comps = {}
        for I, value in (components or {}).items():
            I = tuple(int(i) for i in I)
            if len(I) != k or any(a >= b for a, b in zip(I, I[1:])) \
                    or (I and (I[0] < 0 or I[-1] >= total)):
                raise ValueError(
                    f'Index set {I} is not a strictly increasing subset of size {k} '
                    f'of range({total}).')
            p = as_polynomial(self.ring, value)
            if p:
                comps[I] = p
        self.components = comps

    @property
    def total_vars(self):
        return self.n + (1 if self.has_t else 0)

    @classmethod
    def zero(cls, n, k, has_t=False):
        return cls(n, k, {}, has_t=has_t)

    @classmethod
    def function(cls, p, n, has_t=False):
        return cls(n, 0, {(): p}, has_t=has_t)

    @classmethod
    def differential(cls, n, i, has_t=False):
        """The 1-form dx_i (dt when ``i == n`` and ``has_t``)."""
        return cls(n, 1, {(i,): 1}, has_t=has_t)

    def coordinate(self, i):
        return self.ring.gens[i]

    def is_zero(self):
        return not self.components

    def _check_compatible(self, other):
        if not isinstance(other, PolyForm):
            raise TypeError(f'Expected a PolyForm, got {type(other).__name__}.')
        if (self.n, self.has_t) != (other.n, other.has_t):
            raise DimensionMismatch(
                f'Forms on different spaces: n={self.n}, t={self.has_t} vs '
                f'n={other.n}, t={other.has_t}.')

    def __add__(self, other):
        self._check_compatible(other)
        if self.k != other.k:
            raise DimensionMismatch(f'Cannot add a {self.k}-form and a {other.k}-form.')
        comps = dict(self.components)
        for I, p in other.components.items():
            comps[I] = comps.get(I, self.ring.zero) + p
        return PolyForm(self.n, self.k, comps, has_t=self.has_t)

    def __neg__(self):
        return PolyForm(self.n, self.k, {I: -p for I, p in self.components.items()},
                        has_t=self.has_t)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiply by a rational constant or a polynomial of the same ring."""
        factor = as_polynomial(self.ring, factor)
        return PolyForm(self.n, self.k, {I: factor * p for I, p in self.components.items()},
                        has_t=self.has_t)

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.n, self.k, self.has_t, self.components) == \
            (other.n, other.k, other.has_t, other.components)

    __hash__ = None

    def __repr__(self):
        if not self.components:
            return f'PolyForm(n={self.n}, k={self.k}, 0)'
        names = [str(s) for s in self.ring.symbols]
        terms = []
        for I, p in sorted(self.components.items()):
            basis = '∧'.join(f'd{names[i]}' for i in I)
            terms.append(f'({p.as_expr()})' + (f'·{basis}' if basis else ''))
        return f'PolyForm(n={self.n}, k={self.k}, ' + ' + '.join(terms) + ')'

    def wedge(self, other):
        return wedge(self, other)

    def d(self):
        return exterior_derivative(self)

    def constant_value(self):
        """The rational value of a constant 0-form."""
        if self.k != 0:
            raise ValueError('Only 0-forms have a constant value.')
        p = self.components.get((), self.ring.zero)
        if any(any(m) for m in p.keys()):
            raise ValueError('The 0-form is not constant.')
        return p.get(self.ring.zero_monom, QQ(0))

    def evaluate(self, point):
        """Exact coefficient table at a rational point."""
        return {I: evaluate_exact(p, point) for I, p in self.components.items()}

    def float_evaluator(self):
        """Vectorized evaluator ``X (N, total_vars) -> {I: values (N,)}``."""
        evaluators = {I: float_evaluator(p) for I, p in self.components.items()}

        def evaluate(X):
            return {I: f(X) for I, f in evaluators.items()}

        return evaluate

    def to_json(self):
        return {
            'n': self.n,
            'k': self.k,
            'has_t': self.has_t,
            'components': [{'I': list(I), 'poly': poly_to_json(p)}
                           for I, p in sorted(self.components.items())],
        }

    @classmethod
    def from_json(cls, payload):
        n, k = int(payload['n']), int(payload['k'])
        has_t = bool(payload.get('has_t', False))
        R = polynomial_ring(n, has_t)
        comps = {}
        for item in payload.get('components', []):
            I = tuple(int(i) for i in item['I'])
            comps[I] = comps.get(I, R.zero) + poly_from_json(R, item['poly'])
        return cls(n, k, comps, has_t=has_t)


class PolyMap:
    """A polynomial map from ℝ^source (times the parameter interval if ``has_t``)."""

    def __init__(self, source_dim, components, has_t=False):
        self.source_dim = source_dim
        self.has_t = has_t
        self.ring = polynomial_ring(source_dim, has_t)
        self.components = [as_polynomial(self.ring, c) for c in components]

    @property
    def target_dim(self):
        return len(self.components)

    @classmethod
    def identity(cls, n):
        R = polynomial_ring(n)
        return cls(n, list(R.gens))

    @classmethod
    def affine_scaling(cls, base, factor):
        """x ↦ base + factor·(x − base) with a rational factor."""
        n = len(base)
        R = polynomial_ring(n)
        factor = to_qq(factor)
        base = [to_qq(b) for b in base]
        return cls(n, [R.ground_new(b) + factor * (x - b) for x, b in zip(R.gens, base)])

    @classmethod
    def radial(cls, base):
        """(x, t) ↦ base + t·(x − base)."""
        n = len(base)
        R = polynomial_ring(n, True)
        t = R.gens[-1]
        base = [to_qq(b) for b in base]
        return cls(n, [R.ground_new(b) + t * (x - b) for x, b in zip(R.gens[:-1], base)],
                   has_t=True)


def wedge(a, b):
    a._check_compatible(b)
    comps = {}
    for I, p in a.components.items():
        for J, q in b.components.items():
            sign = merge_sign(I, J)
            if not sign:
                continue
            K = tuple(sorted(I + J))
            comps[K] = comps.get(K, a.ring.zero) + (p * q if sign > 0 else -(p * q))
    return PolyForm(a.n, a.k + b.k, comps, has_t=a.has_t)


def exterior_derivative(omega):
    gens = omega.ring.gens
    comps = {}
    for I, p in omega.components.items():
        for j in range(omega.total_vars):
            if j in I:
                continue
            dp = p.diff(gens[j])
            if not dp:
                continue
            before = sum(1 for i in I if i < j)
            K = tuple(sorted(I + (j,)))
            comps[K] = comps.get(K, omega.ring.zero) + (-dp if before % 2 else dp)
    return PolyForm(omega.n, omega.k + 1, comps, has_t=omega.has_t)


def pullback(omega, phi):
    """φ*ω for a polynomial map φ whose target is ω's space."""
    if phi.target_dim != omega.total_vars:
        raise DimensionMismatch(
            f'Map has target dimension {phi.target_dim}; form lives in dimension '
            f'{omega.total_vars}.')
    n, has_t = phi.source_dim, phi.has_t
    differentials = []
    for c in phi.components:
        differentials.append(exterior_derivative(PolyForm.function(c, n, has_t=has_t)))
    result = PolyForm.zero(n, omega.k, has_t=has_t)
    for I, p in omega.components.items():
        term = PolyForm.function(compose(p, phi.components, phi.ring), n, has_t=has_t)
        for i in I:
            term = wedge(term, differentials[i])
        result = result + term
    return result


def split_dt(omega):
    """Write ω = ω₀ + dt∧ω₁ with neither part containing dt."""
    if not omega.has_t:
        raise ValueError('split_dt needs a form carrying the parameter variable.')
    t_index = omega.n
    without, with_dt = {}, {}
    for I, p in omega.components.items():
        if I and I[-1] == t_index:
            # dx_J ∧ dt = (−1)^{k−1} dt ∧ dx_J
            with_dt[I[:-1]] = p if (omega.k - 1) % 2 == 0 else -p
        else:
            without[I] = p
    omega0 = PolyForm(omega.n, omega.k, without, has_t=True)
    omega1 = PolyForm(omega.n, max(omega.k - 1, 0), with_dt, has_t=True)
    return omega0, omega1


def recombine_dt(omega0, omega1):
    dt = PolyForm.differential(omega0.n, omega0.n, has_t=True)
    return omega0 + wedge(dt, omega1)


def interior_product(omega, field):
    """ι_V ω for a polynomial vector field V given by its components."""
    if len(field) != omega.total_vars:
        raise DimensionMismatch(
            f'Vector field has {len(field)} components; form lives in dimension '
            f'{omega.total_vars}.')
    if omega.k == 0:
        raise ValueError('The interior product of a 0-form is not defined.')
    field = [as_polynomial(omega.ring, v) for v in field]
    comps = {}
    for I, p in omega.components.items():
        for pos, i in enumerate(I):
            J = I[:pos] + I[pos + 1:]
            term = field[i] * p
            comps[J] = comps.get(J, omega.ring.zero) + (-term if pos % 2 else term)
    return PolyForm(omega.n, omega.k - 1, comps, has_t=omega.has_t)


def to_float_table(omega, point):
    """Float coefficient table at one point."""
    evaluate = omega.float_evaluator()
    return {I: float(v[0]) for I, v in evaluate([point]).items()}
