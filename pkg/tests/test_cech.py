import math

import numpy as np
import pytest
from sympy.polys.domains import QQ

from lpderham.cech import (LINE_INTEGRAL_SIGN, CechCochain, cech_d, cech_delta,
                           chain_line_integral, global_primitive, integrate_over_cycle,
                           localize, random_cochain, solve_constants, total_differential, zigzag)
from lpderham.exceptions import DimensionMismatch, NonzeroPeriodError
from lpderham.forms import PolyForm, random_closed_form, winding_form
from lpderham.topology import Chain, boundary, get_complex, homology, nerve, star_cover


def star_nerve(name):
    return nerve(star_cover(get_complex(name)))


def random_bidegree(rng, nerve_):
    l = int(rng.integers(0, nerve_.dimension))
    k = int(rng.integers(0, nerve_.cover.complex.ambient_dim + 1))
    return l, k


def test_delta_squared_vanishes(rng):
    nerves = [star_nerve('annulus'), star_nerve('tetrahedron_boundary')]
    for i in range(100):
        nerve_ = nerves[i % 2]
        l, k = random_bidegree(rng, nerve_)
        phi = random_cochain(rng, nerve_, l, k, nerve_.cover.complex.ambient_dim)
        assert cech_delta(cech_delta(phi)).is_zero()


def test_d_and_delta_commute(rng):
    nerve_ = star_nerve('disk')
    phi = random_cochain(rng, nerve_, 1, 0, 2)
    assert (cech_d(cech_delta(phi)) - cech_delta(cech_d(phi))).is_zero()


def test_total_differential_squared_vanishes(rng):
    nerves = [star_nerve('annulus'), star_nerve('tetrahedron_boundary')]
    for i in range(100):
        nerve_ = nerves[i % 2]
        n = nerve_.cover.complex.ambient_dim
        l, k = random_bidegree(rng, nerve_)
        element = {(l, k): random_cochain(rng, nerve_, l, k, n)}
        if k > 0:
            element[(l + 1, k - 1)] = random_cochain(rng, nerve_, l + 1, k - 1, n)
        assert total_differential(total_differential(element)) == {}


def test_solve_constants_inverts_delta(rng):
    nerve_ = star_nerve('disk')
    c = CechCochain(nerve_, 0, 0, {(i,): QQ(int(rng.integers(-5, 6)))
                                   for i in range(len(nerve_.cover))})
    g = cech_delta(c)
    solution = solve_constants(g)
    assert solution.feasible
    assert (cech_delta(solution.cochain) - g).is_zero()


def test_annulus_period_matches_line_integral():
    nerve_ = star_nerve('annulus')
    form = winding_form()
    _, cycles = homology(nerve_, 1)
    state = zigzag(form, nerve_)
    value = integrate_over_cycle(form, cycles[0], nerve_, state=state)
    oracle = LINE_INTEGRAL_SIGN * chain_line_integral(form, cycles[0], nerve_.cover)
    assert abs(value) == pytest.approx(2 * math.pi, abs=1e-6)
    assert value == pytest.approx(oracle, abs=1e-6)


def test_period_is_independent_of_rung_choices():
    nerve_ = star_nerve('annulus')
    form = winding_form()
    cycle = homology(nerve_, 1)[1][0]
    values = [integrate_over_cycle(form, cycle, nerve_, rng=np.random.default_rng(seed))
              for seed in range(5)]
    assert max(values) - min(values) < 1e-9


def test_period_depends_only_on_the_homology_class():
    nerve_ = star_nerve('annulus')
    form = winding_form()
    state = zigzag(form, nerve_, rng=np.random.default_rng(0))
    cycle = homology(nerve_, 1)[1][0]
    value = integrate_over_cycle(form, cycle, nerve_, state=state)
    assert nerve_.simplices_of_dim(2)
    for simplex in nerve_.simplices_of_dim(2):
        shifted = cycle + boundary(Chain.simplex(simplex, 3))
        assert integrate_over_cycle(form, shifted, nerve_, state=state) == pytest.approx(
            value, abs=1e-9)


def test_two_form_periods_are_independent_of_choices(rng):
    nerve_ = star_nerve('tetrahedron_boundary')
    cycle = homology(nerve_, 2)[1][0]
    form = random_closed_form(rng, 3, 2, degree=2)
    values = [integrate_over_cycle(form, cycle, nerve_, rng=np.random.default_rng(seed))
              for seed in range(5)]
    assert max(values) - min(values) < 1e-9
    assert abs(values[0]) < 1e-9


def test_exact_forms_have_no_periods(rng):
    nerve_ = star_nerve('annulus')
    cycle = homology(nerve_, 1)[1][0]
    for _ in range(3):
        form = random_closed_form(rng, 2, 1, degree=2)
        assert abs(integrate_over_cycle(form, cycle, nerve_)) < 1e-9


def test_zero_chain_integrates_to_zero():
    nerve_ = star_nerve('annulus')
    assert integrate_over_cycle(winding_form(), Chain(), nerve_) == 0.0


def test_non_cycle_is_rejected():
    nerve_ = star_nerve('annulus')
    with pytest.raises(ValueError):
        integrate_over_cycle(winding_form(), Chain({(0, 1): 1}), nerve_)


def test_degree_mismatch_is_rejected():
    nerve_ = star_nerve('disk')
    area = PolyForm(2, 2, {(0, 1): 1})
    cycle = Chain({(0, 1): 1, (1, 4): 1, (0, 4): -1})
    assert boundary(cycle).is_zero()
    with pytest.raises(DimensionMismatch):
        integrate_over_cycle(area, cycle, nerve_)


def test_disk_area_form_has_a_global_primitive(rng):
    nerve_ = star_nerve('disk')
    area = PolyForm(2, 2, {(0, 1): 1})
    report = global_primitive(area, nerve_, p=2.0, rng=rng)
    assert report.exact
    assert report.primitive.is_primitive_of(area)
    assert report.norm_ratio > 0


def test_winding_form_is_refused_with_a_cycle():
    nerve_ = star_nerve('annulus')
    with pytest.raises(NonzeroPeriodError) as info:
        global_primitive(winding_form(), nerve_)
    assert boundary(info.value.cycle).is_zero()
    assert abs(info.value.period) == pytest.approx(2 * math.pi, abs=1e-6)


def test_localized_primitives_differentiate_to_the_form(rng):
    nerve_ = star_nerve('disk')
    for k in (1, 2):
        omega = random_closed_form(rng, 2, k, degree=2)
        xi0 = localize(omega, nerve_)
        for value in cech_d(xi0).values.values():
            assert (value - omega).is_zero()
