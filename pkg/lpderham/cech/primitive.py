"""Global primitives of closed forms with vanishing periods.

Once δc = δξ^{k−1} is solved, the ladder is descended with the homotopy
(Kφ)_I = Σ_j ρ_j φ_{jI} of the barycentric partition of unity:

    η^{k−1} = ξ^{k−1} − c,  x^{s−1} = K η^s,  η^{s−1} = ξ^{s−1} − d x^{s−1}.

Every η^s is δ-closed, so η⁰ is a single form, built here simplex by simplex.
"""
import logging
from dataclasses import dataclass

import numpy as np

from lpderham.cech.cochain import constant_of
from lpderham.cech.constants import solve_constants
from lpderham.cech.zigzag import RESIDUAL_TOL, zigzag
from lpderham.exceptions import CheckFailed, DimensionMismatch, NonzeroPeriodError
from lpderham.forms.exterior import PolyForm, to_float_table
from lpderham.forms.numeric import NumericForm, pointwise_norm, segment_residual
from lpderham.forms.polynomial import qq_to_float
from lpderham.topology.simplicial import (barycentric_coordinates, normalize_simplex,
                                          sample_points, simplex_volume)

logger = logging.getLogger('logger')

LP_SAMPLES = 256
NORM_FRAMES = 256


class PiecewiseForm:
    """One form per top simplex of a complex in ℝⁿ."""

    def __init__(self, complex_, pieces, k):
        self.complex = complex_
        self.pieces = dict(pieces)
        self.k = k
        self.n = complex_.ambient_dim
        self._charts = {}
        for simplex in self.pieces:
            pts = complex_.float_points(simplex)
            self._charts[simplex] = np.linalg.inv(np.hstack([pts, np.ones((len(pts), 1))]))

    def locate(self, x, tol=1e-12):
        x = np.append(np.asarray(x, dtype=float), 1.0)
        for simplex, chart in sorted(self._charts.items()):
            if np.all(x @ chart >= -tol):
                return simplex
        raise ValueError(f'Point {x[:-1]} lies outside the complex.')

    def __call__(self, x):
        form = self.pieces[self.locate(x)]
        if isinstance(form, PolyForm):
            return to_float_table(form, np.asarray(x, dtype=float))
        return form(np.asarray(x, dtype=float))

    def is_primitive_of(self, omega):
        """dξ = ω exactly on every top simplex (polynomial pieces only)."""
        return all(isinstance(f, PolyForm) and f.d() == omega for f in self.pieces.values())

    def to_json(self):
        return [{'simplex': list(s), 'form': f.to_json()}
                for s, f in sorted(self.pieces.items()) if isinstance(f, PolyForm)]


@dataclass
class PrimitiveReport:
    primitive: PiecewiseForm
    constants: object
    p: float
    norm_ratio: float
    exact: bool


def lp_norm(complex_, form, p, rng, samples=LP_SAMPLES):
    """Monte-Carlo L^p norm over the top simplices; ``form`` is global or piecewise."""
    total = 0.0
    for simplex in complex_.top_simplices():
        points = sample_points(complex_, simplex, rng, samples)
        piece = form.pieces[simplex] if isinstance(form, PiecewiseForm) else form
        values = np.array([pointwise_norm(piece, x, budget=NORM_FRAMES, rng=rng) for x in points])
        total += simplex_volume(complex_, simplex) * float(np.mean(values ** p))
    return total ** (1.0 / p)


def _partition_on(cover, simplex, coords):
    """ρ_j on a top simplex: sum of the hat functions of vertices assigned to piece j."""
    rho = {}
    for v, lam in zip(simplex, coords):
        owner = min(i for i, piece in enumerate(cover.pieces) if v in piece)
        rho[owner] = rho[owner] + lam if owner in rho else lam
    return rho


def _descend_on_simplex(state, c, simplex, n):
    cover = state.nerve.cover
    k = state.form.k
    relevant = sorted(i for i, piece in enumerate(cover.pieces) if piece & set(simplex))
    rho = _partition_on(cover, simplex, barycentric_coordinates(cover.complex, simplex))

    def rung_value(level, I):
        return state.rungs[level][I]

    # η^{k−1}_I = ξ^{k−1}_I − c_I on the relevant tuples
    top = k - 1
    eta = {}
    for I in state.nerve.simplices_of_dim(top):
        if not set(I) <= set(relevant):
            continue
        value = rung_value(top, I)
        value = PolyForm.zero(n, 0) if value is None else value
        constant = c[I]
        eta[I] = value - PolyForm.function(constant, n) if constant is not None else value
    for level in range(top, 0, -1):
        x = {}
        for I in state.nerve.simplices_of_dim(level - 1):
            if not set(I) <= set(relevant):
                continue
            acc = PolyForm.zero(n, k - 1 - level)
            for j, rho_j in rho.items():
                key, sign = normalize_simplex((j,) + I)
                if not sign or key not in eta:
                    continue
                term = eta[key].scale(rho_j)
                acc = acc + term if sign > 0 else acc - term
            x[I] = acc
        lower = {}
        for I, x_I in x.items():
            xi = rung_value(level - 1, I)
            xi = PolyForm.zero(n, k - level) if xi is None else xi
            lower[I] = xi - x_I.d()
        eta = lower
    return eta[(relevant[0],)]


def global_primitive(form, nerve_, p=2.0, rng=None, samples=LP_SAMPLES, state=None):
    """ξ with dξ = ω on a pure n-dimensional complex in ℝⁿ, plus ‖ξ‖_p / ‖ω‖_p."""
    cover = nerve_.cover
    complex_ = cover.complex
    n = complex_.ambient_dim
    if form.k == 0:
        raise ValueError('A primitive needs a form of degree at least 1.')
    if complex_.dimension != n or not complex_.is_pure():
        raise DimensionMismatch('Global primitives are built on pure n-dimensional complexes in R^n.')
    numeric = isinstance(form, NumericForm)
    if numeric and form.k != 1:
        raise ValueError('Numeric global primitives are built for 1-forms only.')
    rng = np.random.default_rng(0) if rng is None else rng
    state = zigzag(form, nerve_) if state is None else state
    solution = solve_constants(state.constants)
    if not solution.feasible:
        period = solution.period
        period = _as_float(period)
        raise NonzeroPeriodError(f'Period {period:.12g} on {solution.cycle}: the form is not exact.',
                                 cycle=solution.cycle, period=period)
    c = solution.cochain

    pieces = {}
    for simplex in complex_.top_simplices():
        if numeric:
            i = min(j for j, piece in enumerate(cover.pieces) if piece & set(simplex))
            constant = c[(i,)]
            shift = 0.0 if constant is None else _as_float(constant_of(constant, ()))
            pieces[simplex] = state.rungs[0][(i,)].shift(-shift)
        else:
            pieces[simplex] = _descend_on_simplex(state, c, simplex, n)
    primitive = PiecewiseForm(complex_, pieces, form.k - 1)

    if numeric:
        _check_numeric_primitive(primitive, form, rng)
    elif not primitive.is_primitive_of(form):
        raise CheckFailed('Sanity check: descent did not produce a primitive.',
                          witness={'form': form.to_json()})

    form_norm = lp_norm(complex_, form, p, rng, samples)
    ratio = 0.0 if form_norm == 0.0 else lp_norm(complex_, primitive, p, rng, samples) / form_norm
    logger.info(f'Global primitive: ||xi||_{p} / ||omega||_{p} = {ratio:.6g}')
    return PrimitiveReport(primitive, c, p, ratio, exact=not numeric)


def _as_float(value):
    return value if isinstance(value, float) else qq_to_float(value)


def _check_numeric_primitive(primitive, form, rng, per_simplex=8):
    complex_ = primitive.complex
    for simplex, piece in sorted(primitive.pieces.items()):
        points = sample_points(complex_, simplex, rng, per_simplex, margin=0.2)
        directions = rng.standard_normal(points.shape)
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        residual = segment_residual(piece, form, points, directions)
        if residual > RESIDUAL_TOL:
            raise CheckFailed(f'Primitive misses dξ = ω by {residual:.3e} on {list(simplex)}.',
                              witness={'simplex': list(simplex), 'residual': residual})
