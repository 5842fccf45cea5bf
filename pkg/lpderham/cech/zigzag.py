"""Localization, the zig-zag down the Čech–De Rham double complex, and periods.

Starting from ξ⁰_i = K ω on U_i, every rung solves dξ^{s+1}_I = (δξ^s)_I on U_I
with the radial homotopy about the base point of U_I. After k − 1 rungs the
cochain δξ^{k−1} is constant; its pairing with a nerve k-cycle c, times
(−1)^⌊k/2⌋, is the period of ω over c.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from sympy.polys.domains import QQ

from lpderham.cech.cochain import (CechCochain, add_values, cech_delta, constant_of, is_form)
from lpderham.cech.constants import pairing
from lpderham.exceptions import CheckFailed, DimensionMismatch, NonClosedFormError
from lpderham.forms.exterior import PolyForm
from lpderham.forms.homotopy import radial_homotopy, random_polyform
from lpderham.forms.numeric import (NumericForm, PolygonalPath, from_polyform, line_integral,
                                    pointwise_norm, segment_residual)
from lpderham.forms.polynomial import qq_to_float, to_float_point, to_qq
from lpderham.topology.simplicial import boundary, sample_points
from lpderham.utils.utils import parallel_map

logger = logging.getLogger('logger')

DEFAULT_SAMPLES = 1000
RESIDUAL_TOL = 1e-7
DIAGNOSTIC_FRAMES = 512

# For k = 1 the pairing of δξ⁰ with a 1-cycle is minus the line integral along
# the path through the base points: (δξ⁰)_{ij} = ξ⁰_j − ξ⁰_i = −∫_{b_i→b_j} ω.
LINE_INTEGRAL_SIGN = -1


@dataclass
class ZigzagState:
    nerve: object
    form: object
    rungs: list
    constants: CechCochain
    diagnostics: list = field(default_factory=list)

    @property
    def exact(self):
        return all(isinstance(v, QQ.dtype) for v in self.constants.values.values())


def _check_closed(form, n):
    if form.n != n:
        raise DimensionMismatch(f'Form lives on R^{form.n}, the complex in R^{n}.')
    if form.k == 0:
        raise ValueError('Localization needs a form of degree at least 1.')
    if isinstance(form, PolyForm):
        if form.has_t:
            raise ValueError('Forms with the parameter variable cannot be localized.')
        if form.k < form.n and not form.d().is_zero():
            raise NonClosedFormError('The form is not closed.')
    elif not form.closed:
        raise NonClosedFormError(f'{form.name} is not declared closed.')


def _random_interior_point(complex_, simplex, rng):
    weights = [to_qq(int(w)) for w in rng.integers(1, 10, size=len(simplex))]
    total = sum(weights, QQ(0))
    pts = complex_.points(simplex)
    return tuple(sum((w * p[c] for w, p in zip(weights, pts)), QQ(0)) / total
                 for c in range(complex_.ambient_dim))


def _base_point(cover, index_tuple, rng):
    if rng is None or len(index_tuple) == 1:
        return cover.base_point(index_tuple)
    return _random_interior_point(cover.complex, cover.witness(index_tuple), rng)


def _perturb(value, rng, n):
    """Add something closed: d of a random form, or a random constant on 0-forms."""
    if value.k == 0:
        constant = to_qq(f'{int(rng.integers(-20, 21))}/{int(rng.integers(1, 8))}')
        if isinstance(value, PolyForm):
            return value + PolyForm.function(constant, n)
        return value.shift(qq_to_float(constant))
    exact = random_polyform(rng, n, value.k - 1, degree=2, n_terms=2).d()
    return add_values(value, exact if isinstance(value, PolyForm) else from_polyform(exact))


def localize(form, nerve_, samples=DEFAULT_SAMPLES, tol=RESIDUAL_TOL, rng=None):
    """ξ⁰ with dξ⁰_i = ω on U_i, by the radial homotopy about each piece's base point."""
    cover = nerve_.cover
    _check_closed(form, cover.complex.ambient_dim)
    indices = list(range(len(cover)))
    primitives = parallel_map(lambda i: radial_homotopy(form, cover.base_points[i], 0), indices)
    xi0 = CechCochain(nerve_, 0, form.k - 1, {(i,): v for i, v in zip(indices, primitives)})
    if isinstance(form, NumericForm) and form.k == 1 and samples:
        check_rng = np.random.default_rng(0) if rng is None else rng
        _verify_numeric_rung(form, xi0, samples, tol, check_rng)
    return xi0


def _verify_numeric_rung(form, xi0, samples, tol, rng):
    cover = xi0.nerve.cover
    complex_ = cover.complex
    per_piece = max(1, samples // len(cover))
    for (i,), primitive in sorted(xi0.values.items()):
        simplices = cover.intersection_simplices((i,))
        top = max(len(s) for s in simplices)
        simplices = [s for s in simplices if len(s) == top and len(s) > 1]
        if not simplices:
            continue
        picks = rng.integers(0, len(simplices), size=per_piece)
        points, directions = [], []
        for pick in picks:
            simplex = simplices[int(pick)]
            points.append(sample_points(complex_, simplex, rng, 1, margin=0.2)[0])
            pts = complex_.float_points(simplex)
            v = rng.standard_normal(len(simplex) - 1) @ (pts[1:] - pts[0])
            directions.append(v / np.linalg.norm(v))
        residual = segment_residual(primitive, form, points, directions)
        logger.debug(f'Piece {i}: primitive residual {residual:.3e}')
        if residual > tol:
            raise CheckFailed(f'Primitive on piece {i} misses dξ = ω by {residual:.3e}.',
                              witness={'piece': i, 'residual': residual})


def zigzag(form, nerve_, rng=None, samples=DEFAULT_SAMPLES, tol=RESIDUAL_TOL):
    """Run the ladder ξ⁰, …, ξ^{k−1} and read off the constants δξ^{k−1}.

    With ``rng`` given, every rung is moved by a random valid choice: base
    points inside σ_I, exact additions, random constants on the last rung.
    """
    cover = nerve_.cover
    n = cover.complex.ambient_dim
    xi = localize(form, nerve_, samples=samples, tol=tol)
    if rng is not None:
        xi = CechCochain(nerve_, 0, xi.k, {I: _perturb(v, rng, n) for I, v in xi.values.items()})
    rungs = [xi]
    for level in range(1, form.k):
        target = cech_delta(rungs[-1])
        items = sorted(target.values.items())
        bases = [_base_point(cover, I, rng) for I, _ in items]
        solved = parallel_map(lambda job: radial_homotopy(job[0][1], job[1], 0),
                              list(zip(items, bases)))
        values = {I: v for (I, _), v in zip(items, solved)}
        if rng is not None:
            values = {I: _perturb(v, rng, n) for I, v in values.items()}
        rungs.append(CechCochain(nerve_, level, form.k - 1 - level, values))
        logger.debug(f'Rung {level}: {len(values)} entries.')
    last = cech_delta(rungs[-1])
    constants = CechCochain(nerve_, form.k, 0, {
        J: constant_of(v, cover.base_point(J)) for J, v in last.values.items()})
    diagnostics = [_rung_diagnostics(level, rung) for level, rung in enumerate(rungs)]
    return ZigzagState(nerve_, form, rungs, constants, diagnostics)


def _rung_diagnostics(level, rung):
    cover = rung.nerve.cover
    norms = [pointwise_norm(v, to_float_point(cover.base_point(I)), budget=DIAGNOSTIC_FRAMES)
             for I, v in sorted(rung.values.items()) if is_form(v)]
    return {'level': level, 'entries': len(rung.values), 'sup_norm': max(norms, default=0.0)}


def integrate_over_cycle(form, chain, nerve_, state=None, rng=None):
    """(−1)^⌊k/2⌋ Σ a_I (δξ^{k−1})_I for a nerve k-cycle c = Σ a_I [I]."""
    if chain.is_zero():
        return 0.0
    if not boundary(chain).is_zero():
        raise ValueError('The chain is not a cycle.')
    if chain.degree != form.k:
        raise DimensionMismatch(f'A {chain.degree}-chain cannot be paired with a {form.k}-form.')
    missing = [s for s in chain.coeffs if s not in nerve_.simplices]
    if missing:
        raise ValueError(f'{[list(s) for s in missing]} are not simplices of the nerve.')
    state = zigzag(form, nerve_, rng=rng) if state is None else state
    total = pairing(state.constants, chain)
    sign = -1 if (form.k // 2) % 2 else 1
    value = qq_to_float(total) if isinstance(total, QQ.dtype) else float(total)
    return sign * value


def chain_line_integral(form, chain, cover):
    """Σ a_ij ∫ ω along b_i → (base point of U_ij) → b_j, for a 1-chain of the nerve."""
    total = 0.0
    for (i, j), a in sorted(chain.coeffs.items()):
        points = [to_float_point(cover.base_points[i]), to_float_point(cover.base_point((i, j))),
                  to_float_point(cover.base_points[j])]
        total += qq_to_float(a) * line_integral(form, PolygonalPath(points))
    return total
