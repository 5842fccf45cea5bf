"""The radial homotopy operator.

For a base point b and r_t(x) = b + t(x − b), write r*ω = ω₀ + dt∧ω₁ and set

    K_ε ω = ∫_ε^1 ω₁(x, t) dt.

On polynomial forms this is exact and satisfies

    d K_ε ω + K_ε dω = ω − r_ε* ω.

On numeric forms the same integral, ∫_ε^1 t^{k−1} ι_{x−b} ω(r_t x) dt, is
taken by adaptive quadrature.
"""
import logging
from itertools import combinations

from lpderham.exceptions import DimensionMismatch, NonClosedFormError
from lpderham.forms.exterior import PolyForm, PolyMap, pullback, split_dt
from lpderham.forms.numeric import NumericForm, quad_checked
from lpderham.forms.polynomial import (integrate_last_variable, polynomial_ring,
                                       random_polynomial, to_float_point, to_qq)

logger = logging.getLogger('logger')


def integrate_dt(p, eps, target_ring):
    """∫_ε^1 p(x, t) dt, exactly."""
    return integrate_last_variable(p, eps, 1, target_ring)


def radial_homotopy(omega, base, eps=0, integrator=integrate_dt):
    """K_ε ω about ``base``. Dispatches on PolyForm / NumericForm."""
    if isinstance(omega, NumericForm):
        return numeric_radial_homotopy(omega, base, eps=float(eps))
    if omega.has_t:
        raise ValueError('radial_homotopy takes forms without the parameter variable.')
    if omega.k == 0:
        raise ValueError('0-forms have no radial primitive (K of a function is 0).')
    if len(base) != omega.n:
        raise DimensionMismatch(f'Base point has {len(base)} coordinates, form lives in R^{omega.n}.')
    eps = to_qq(eps)
    if not 0 <= eps < 1:
        raise ValueError(f'eps must lie in [0, 1), got {eps}.')
    pulled = pullback(omega, PolyMap.radial(base))
    _, omega1 = split_dt(pulled)
    target = polynomial_ring(omega.n)
    comps = {I: integrator(p, eps, target) for I, p in omega1.components.items()}
    return PolyForm(omega.n, omega.k - 1, comps)


def eps_pullback(omega, base, eps):
    """r_ε* ω for r_ε(x) = b + ε(x − b)."""
    return pullback(omega, PolyMap.affine_scaling(base, eps))


def homotopy_defect(omega, base, eps, integrator=integrate_dt):
    """d K_ε ω + K_ε dω − (ω − r_ε* ω); the zero form when the identity holds."""
    lhs = PolyForm.zero(omega.n, omega.k)
    if omega.k > 0:
        lhs = lhs + radial_homotopy(omega, base, eps, integrator).d()
    d_omega = omega.d()
    if omega.k < omega.n:
        lhs = lhs + radial_homotopy(d_omega, base, eps, integrator)
    return lhs - (omega - eps_pullback(omega, base, eps))


def poincare_primitive(omega, base):
    """γ = K_0 ω with dγ = ω, for a closed polynomial form of degree ≥ 1."""
    if omega.k == 0:
        raise ValueError('A primitive needs a form of degree at least 1.')
    if omega.k < omega.n and not omega.d().is_zero():
        raise NonClosedFormError('The form is not closed, so K_0 ω is not a primitive.')
    return radial_homotopy(omega, base, 0)


def numeric_radial_homotopy(omega, base, eps=0.0, tol=1e-12, limit=200):
    n, k = omega.n, omega.k
    if k == 0:
        raise ValueError('0-forms have no radial primitive (K of a function is 0).')
    base = to_float_point(base)
    if base.shape != (n,):
        raise DimensionMismatch(f'Base point of shape {base.shape} for a form on R^{n}.')
    targets = list(combinations(range(n), k - 1))

    def evaluate(x):
        v = x - base
        out = {}
        for J in targets:
            def integrand(t, J=J):
                values = omega(base + t * v)
                total = 0.0
                for i in range(n):
                    if i in J:
                        continue
                    I = tuple(sorted(J + (i,)))
                    pos = I.index(i)
                    term = v[i] * values.get(I, 0.0)
                    total += -term if pos % 2 else term
                return t ** (k - 1) * total

            out[J] = quad_checked(integrand, eps, 1.0, tol, limit)
        return out

    # d K_0 ω = ω for closed ω of positive degree
    derivative = omega if (omega.closed and eps == 0.0) else None
    return NumericForm(n, k - 1, evaluate, derivative=derivative, closed=False,
                       name=f'K({omega.name})')


def random_polyform(rng, n, k, degree=3, n_terms=3, has_t=False):
    """A random PolyForm with a few nonzero components of total degree <= degree."""
    R = polynomial_ring(n, has_t)
    total = n + (1 if has_t else 0)
    index_sets = list(combinations(range(total), k))
    picks = rng.choice(len(index_sets), size=min(len(index_sets), 2), replace=False)
    comps = {}
    for idx in sorted(int(i) for i in picks):
        comps[index_sets[idx]] = random_polynomial(rng, R, degree, n_terms)
    return PolyForm(n, k, comps, has_t=has_t)


def random_closed_form(rng, n, k, degree=3, n_terms=3):
    """dη for a random (k−1)-form η; exact, hence closed."""
    if k == 0:
        raise ValueError('Closed 0-forms are constants; ask for k >= 1.')
    return random_polyform(rng, n, k - 1, degree=degree + 1, n_terms=n_terms).d()


def random_base_point(rng, n, bound=3, denominator=4):
    return [to_qq(f'{int(rng.integers(-bound * denominator, bound * denominator + 1))}'
                  f'/{denominator}') for _ in range(n)]
