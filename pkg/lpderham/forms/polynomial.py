"""Exact polynomial coefficients.

Coefficients of polynomial forms are elements of sympy's sparse ``PolyRing``
over ``QQ``. The ring for ``n`` coordinates has generators ``x0 .. x{n-1}``;
a ring carrying the parameter variable appends ``t`` as its last generator.
Rings are cached, so two forms over the same coordinates share one ring and
compare equal term by term.
"""
import functools
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, ring

from lpderham.exceptions import DimensionMismatch


@functools.lru_cache(maxsize=None)
def polynomial_ring(n_vars: int, has_t: bool = False):
    names = [f'x{i}' for i in range(n_vars)]
    if has_t:
        names.append('t')
    if not names:
        raise ValueError('A polynomial ring needs at least one variable.')
    return ring(','.join(names), QQ, lex)[0]


def to_qq(value):
    """Convert ints, Fractions, decimal strings, floats and sympy numbers to QQ.

    Floats go through their shortest decimal representation, so ``0.1`` is
    read as ``1/10``.
    """
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError('Booleans are not rational coefficients.')
    if isinstance(value, (int, np.integer)):
        return QQ(int(value))
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f'Cannot represent {value} as a rational.')
        value = Fraction(repr(float(value)))
        return QQ(value.numerator, value.denominator)
    if isinstance(value, str):
        value = Fraction(value.strip())
        return QQ(value.numerator, value.denominator)
    if isinstance(value, sympy.Basic):
        value = sympy.nsimplify(value) if not value.is_Rational else value
        return QQ(int(value.p), int(value.q))
    raise TypeError(f'Cannot convert {type(value).__name__} to a rational.')


def qq_pair(c):
    return int(QQ.numer(c)), int(QQ.denom(c))


def qq_to_float(c):
    num, den = qq_pair(c)
    return num / den


def as_polynomial(R, value):
    """Coerce a constant or a polynomial of ring ``R`` into ``R``."""
    if isinstance(value, PolyElement):
        if value.ring != R:
            raise DimensionMismatch(
                f'Polynomial over {value.ring.symbols} used where {R.symbols} is expected.')
        return value
    return R.ground_new(to_qq(value))


def evaluate_exact(p, point):
    """Value of ``p`` at a rational point (sequence convertible by ``to_qq``)."""
    point = [to_qq(v) for v in point]
    if len(point) != p.ring.ngens:
        raise DimensionMismatch(f'Point has {len(point)} coordinates, ring has {p.ring.ngens}.')
    total = QQ(0)
    for monom, coeff in p.items():
        term = coeff
        for v, e in zip(point, monom):
            if e:
                term = term * v ** e
        total += term
    return total


def float_evaluator(p):
    """Vectorized float evaluation: ``X`` of shape (N, ngens) -> (N,)."""
    items = sorted(p.items())
    ngens = p.ring.ngens
    if not items:
        return lambda X: np.zeros(np.asarray(X, dtype=float).reshape(-1, ngens).shape[0])
    monoms = np.array([m for m, _ in items], dtype=float)
    coeffs = np.array([qq_to_float(c) for _, c in items], dtype=float)

    def evaluate(X):
        X = np.asarray(X, dtype=float).reshape(-1, ngens)
        return (X[:, None, :] ** monoms[None, :, :]).prod(axis=-1) @ coeffs

    return evaluate


def compose(p, images, target_ring):
    """Substitute ``images[i]`` (polynomials of ``target_ring``) for generator i."""
    if len(images) != p.ring.ngens:
        raise DimensionMismatch(
            f'{len(images)} substitutions given for a ring with {p.ring.ngens} generators.')
    images = [as_polynomial(target_ring, q) for q in images]
    powers = [{0: target_ring.one} for _ in images]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = power(i, e - 1) * images[i]
        return cache[e]

    result = target_ring.zero
    for monom, coeff in p.items():
        term = target_ring.ground_new(coeff)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        result += term
    return result


def integrate_last_variable(p, lower, upper, target_ring):
    """Exact integral of ``p`` over its last generator from ``lower`` to ``upper``."""
    lower, upper = to_qq(lower), to_qq(upper)
    if target_ring.ngens != p.ring.ngens - 1:
        raise DimensionMismatch('Target ring must drop exactly the last generator.')
    acc = {}
    for monom, coeff in p.items():
        e = monom[-1]
        value = coeff * (upper ** (e + 1) - lower ** (e + 1)) / QQ(e + 1)
        key = tuple(monom[:-1])
        acc[key] = acc.get(key, QQ(0)) + value
    return target_ring.from_dict(acc)


def poly_to_json(p):
    return [{'exps': list(monom), 'num': qq_pair(coeff)[0], 'den': qq_pair(coeff)[1]}
            for monom, coeff in sorted(p.items())]


def poly_from_json(R, items):
    acc = {}
    for item in items:
        exps = tuple(int(e) for e in item['exps'])
        if len(exps) != R.ngens:
            raise DimensionMismatch(f'Exponent vector {exps} does not fit {R.symbols}.')
        acc[exps] = acc.get(exps, QQ(0)) + QQ(int(item['num']), int(item.get('den', 1)))
    return R.from_dict(acc)


def random_polynomial(rng, R, degree, n_terms, coeff_bound=3):
    """A sparse polynomial with small integer coefficients and total degree <= degree."""
    ngens = R.ngens
    monoms = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(ngens), d):
            monom = [0] * ngens
            for i in combo:
                monom[i] += 1
            monoms.append(tuple(monom))
    picks = rng.choice(len(monoms), size=min(n_terms, len(monoms)), replace=False)
    acc = {}
    for idx in sorted(int(i) for i in picks):
        coeff = int(rng.integers(-coeff_bound, coeff_bound + 1))
        if coeff:
            acc[monoms[idx]] = QQ(coeff)
    return R.from_dict(acc)


def to_float_point(point):
    """Float coordinates of a point whose entries may be QQ elements."""
    return np.array([qq_to_float(v) if isinstance(v, QQ.dtype) else float(v) for v in point],
                    dtype=float)
