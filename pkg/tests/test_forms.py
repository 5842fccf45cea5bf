import math

import numpy as np
import pytest

from lpderham.exceptions import NonClosedFormError
from lpderham.forms import (CircularPath, PolyForm, PolyMap, line_integral, pointwise_norm,
                            poincare_primitive, pullback, radial_homotopy, random_closed_form,
                            recombine_dt, split_dt, wedge, winding_form)
from lpderham.forms.homotopy import (homotopy_defect, numeric_radial_homotopy,
                                     random_base_point, random_polyform)
from lpderham.forms.numeric import from_polyform
from lpderham.forms.polynomial import polynomial_ring, to_qq


def test_homotopy_identity_on_random_forms(rng):
    for _ in range(50):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(0, min(3, n) + 1))
        omega = random_polyform(rng, n, k, degree=int(rng.integers(0, 4)))
        base = random_base_point(rng, n)
        for eps in ('0', '1/2'):
            assert homotopy_defect(omega, base, eps).is_zero()


def test_poincare_lemma_on_closed_forms(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, n + 1))
        omega = random_closed_form(rng, n, k, degree=2)
        base = random_base_point(rng, n)
        if omega.is_zero():
            continue
        assert poincare_primitive(omega, base).d() == omega


def test_d_squared_vanishes(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(0, n + 1))
        omega = random_polyform(rng, n, k, degree=3)
        assert omega.d().d().is_zero()


def test_leibniz_rule(rng):
    a = random_polyform(rng, 3, 1, degree=2)
    b = random_polyform(rng, 3, 1, degree=2)
    lhs = wedge(a, b).d()
    rhs = wedge(a.d(), b) - wedge(a, b.d())
    assert lhs == rhs


def test_wedge_anticommutes_on_one_forms():
    dx = PolyForm.differential(2, 0)
    dy = PolyForm.differential(2, 1)
    assert wedge(dx, dy) == -wedge(dy, dx)
    assert wedge(dx, dx).is_zero()


def test_pullback_commutes_with_d(rng):
    omega = random_polyform(rng, 2, 1, degree=2)
    phi = PolyMap.affine_scaling([to_qq('1/2'), to_qq(-1)], '1/3')
    assert pullback(omega, phi).d() == pullback(omega.d(), phi)


def test_pullback_of_area_form_under_a_fold():
    R = polynomial_ring(2)
    x, y = R.gens
    phi = PolyMap(2, [x ** 2, y])
    area = PolyForm(2, 2, {(0, 1): 1})
    assert pullback(area, phi) == PolyForm(2, 2, {(0, 1): 2 * x})


def test_forms_above_the_dimension_must_vanish():
    assert PolyForm(2, 3).is_zero()
    with pytest.raises(ValueError):
        PolyForm(1, 2, {(0, 1): 1})


def test_radial_primitive_of_area_form():
    area = PolyForm(2, 2, {(0, 1): 1})
    x, y = area.ring.gens
    gamma = poincare_primitive(area, [0, 0])
    assert gamma.d() == area
    assert gamma == PolyForm(2, 1, {(0,): -y * to_qq('1/2'), (1,): x * to_qq('1/2')})


def test_non_closed_form_has_no_primitive():
    x = PolyForm.zero(2, 1).ring.gens[0]
    omega = PolyForm(2, 1, {(1,): x ** 2})
    with pytest.raises(NonClosedFormError):
        poincare_primitive(omega, [0, 0])


def test_zero_forms_have_no_radial_primitive():
    with pytest.raises(ValueError):
        radial_homotopy(PolyForm.function(1, 2), [0, 0])


def test_winding_integral_is_two_pi():
    value = line_integral(winding_form(), CircularPath((0.0, 0.0), 0.5))
    assert value == pytest.approx(2 * math.pi, abs=1e-9)


def test_numeric_homotopy_matches_exact(rng):
    omega = random_polyform(rng, 2, 1, degree=2)
    base = [to_qq(0), to_qq(0)]
    exact = from_polyform(radial_homotopy(omega, base, 0))
    numeric = numeric_radial_homotopy(from_polyform(omega), base)
    x = np.array([0.3, -0.7])
    assert numeric(x).get((), 0.0) == pytest.approx(exact(x).get((), 0.0), abs=1e-10)


def test_comass_of_one_and_top_forms():
    omega = PolyForm(2, 1, {(0,): 3, (1,): 4})
    assert pointwise_norm(omega, [0.1, 0.2]) == pytest.approx(5.0)
    area = PolyForm(2, 2, {(0, 1): -2})
    assert pointwise_norm(area, [0.0, 0.0]) == pytest.approx(2.0)


def test_sampled_comass_in_middle_degree(rng):
    omega = PolyForm(3, 2, {(0, 1): 3, (1, 2): 4})
    comass = pointwise_norm(omega, [0.0, 0.0, 0.0], rng=rng)
    assert 0.98 * 5.0 <= comass <= 5.0 + 1e-9


def test_split_dt_recombines(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(1, n + 2))
        omega = random_polyform(rng, n, k, degree=2, has_t=True)
        omega0, omega1 = split_dt(omega)
        assert all(n not in I for I in omega0.components)
        assert all(n not in I for I in omega1.components)
        assert (recombine_dt(omega0, omega1) - omega).is_zero()
