"""Čech cochains of forms over the nerve of a cover, δ and the total differential.

A cochain of Čech degree l and form degree k assigns to every l-simplex I of
the nerve a form on U_I. Forms on U_I are written in ambient coordinates, so
restriction to a smaller intersection is the identity. Values are alternating
and stored on sorted tuples only; a missing entry is zero.

Values are ``PolyForm``s, ``NumericForm``s or, for constant 0-cochains,
plain numbers (QQ elements in exact runs, floats otherwise).
"""
import logging

from sympy.polys.domains import QQ

from lpderham.exceptions import DimensionMismatch
from lpderham.forms.exterior import PolyForm
from lpderham.forms.homotopy import random_polyform
from lpderham.forms.numeric import NumericForm, as_numeric
from lpderham.forms.polynomial import qq_to_float
from lpderham.topology.simplicial import faces, normalize_simplex

logger = logging.getLogger('logger')


def _to_float(value):
    return qq_to_float(value) if isinstance(value, QQ.dtype) else float(value)


def is_form(value):
    return isinstance(value, (PolyForm, NumericForm))


def negate(value):
    if isinstance(value, NumericForm):
        return value.shift(0.0, scale=-1.0)
    return -value


def add_values(a, b):
    """Sum of two cochain values; ``None`` stands for zero."""
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, PolyForm) and isinstance(b, PolyForm):
        return a + b
    if is_form(a) and is_form(b):
        return as_numeric(a) + as_numeric(b)
    if is_form(a) or is_form(b):
        raise TypeError('Cannot add a form and a constant.')
    if isinstance(a, float) or isinstance(b, float):
        return _to_float(a) + _to_float(b)
    return a + b


def value_is_zero(value):
    if isinstance(value, PolyForm):
        return value.is_zero()
    if isinstance(value, NumericForm):
        return False
    return value == 0


def constant_of(value, point):
    """The number carried by a constant 0-form value, read at ``point``."""
    if isinstance(value, PolyForm):
        return value.constant_value()
    if isinstance(value, NumericForm):
        if value.k != 0:
            raise ValueError('Only 0-forms carry constants.')
        return float(value(_float_point(point)).get((), 0.0))
    return value


def _float_point(point):
    return [_to_float(c) for c in point]


class CechCochain:
    def __init__(self, nerve_, l, k, values=None):
        if l < 0 or k < 0:
            raise ValueError(f'Degrees must be nonnegative, got l={l}, k={k}.')
        self.nerve = nerve_
        self.l = l
        self.k = k
        stored = {}
        for I, value in (values or {}).items():
            key, sign = normalize_simplex(tuple(int(i) for i in I))
            if not sign:
                continue
            if len(key) != l + 1:
                raise DimensionMismatch(f'Index tuple {I} does not have {l + 1} entries.')
            if key not in nerve_.simplices:
                raise ValueError(f'{list(key)} is not a simplex of the nerve.')
            if is_form(value) and value.k != k:
                raise DimensionMismatch(f'A {value.k}-form stored in a cochain of {k}-forms.')
            stored[key] = add_values(stored.get(key), value if sign > 0 else negate(value))
        self.values = {I: v for I, v in stored.items() if not value_is_zero(v)}

    def __getitem__(self, index_tuple):
        """Value at an arbitrarily ordered tuple; None when it is zero."""
        key, sign = normalize_simplex(tuple(index_tuple))
        if not sign or key not in self.values:
            return None
        value = self.values[key]
        return value if sign > 0 else negate(value)

    def __add__(self, other):
        if (self.l, self.k) != (other.l, other.k) or self.nerve is not other.nerve:
            raise DimensionMismatch('Cochains live in different groups.')
        values = dict(self.values)
        for I, v in other.values.items():
            values[I] = add_values(values.get(I), v)
        return CechCochain(self.nerve, self.l, self.k, values)

    def __neg__(self):
        return CechCochain(self.nerve, self.l, self.k,
                           {I: negate(v) for I, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return not self.values

    def __repr__(self):
        return f'CechCochain(l={self.l}, k={self.k}, entries={sorted(self.values)})'


def cech_delta(phi):
    """(δφ)_J = Σ_j (−1)^j φ_{J without its j-th index}."""
    values = {}
    for J in phi.nerve.simplices_of_dim(phi.l + 1):
        acc = None
        for j, face in enumerate(faces(J)):
            v = phi.values.get(face)
            if v is None:
                continue
            acc = add_values(acc, negate(v) if j % 2 else v)
        if acc is not None:
            values[J] = acc
    return CechCochain(phi.nerve, phi.l + 1, phi.k, values)


def cech_d(phi):
    """Exterior derivative applied entry by entry."""
    values = {}
    for I, v in phi.values.items():
        if not is_form(v):
            continue
        values[I] = v.d()
    return CechCochain(phi.nerve, phi.l, phi.k + 1, values)


def total_differential(element):
    """D = δ + (−1)^l d on C^l(U, Ω^k).

    ``element`` maps (l, k) to a cochain of that bidegree; so does the result.
    """
    out = {}

    def accumulate(cochain):
        key = (cochain.l, cochain.k)
        out[key] = out[key] + cochain if key in out else cochain

    for (l, k), phi in sorted(element.items()):
        if (phi.l, phi.k) != (l, k):
            raise DimensionMismatch(f'Cochain of bidegree {(phi.l, phi.k)} stored under {(l, k)}.')
        accumulate(cech_delta(phi))
        d_phi = cech_d(phi)
        accumulate(-d_phi if l % 2 else d_phi)
    return {key: c for key, c in out.items() if not c.is_zero()}


def random_cochain(rng, nerve_, l, k, n, degree=2, n_terms=2):
    """Random polynomial cochain on every l-simplex of the nerve."""
    return CechCochain(nerve_, l, k, {I: random_polyform(rng, n, k, degree=degree, n_terms=n_terms)
                                      for I in nerve_.simplices_of_dim(l)})
