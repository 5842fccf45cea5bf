import math

import numpy as np
import pytest

from lpderham.exceptions import CheckFailed
from lpderham.flattening import (CATALOG, Cone, RegularFamily, Stage, bilipschitz_estimate,
                                 build_flattening, cone_membership, continuity_test,
                                 flatten_cone_check, get_family, graph_cone_bound, graph_test,
                                 normal_basis, region_test, round_trip_error, sample_cone,
                                 tilt_aperture, tilted_cone_bound)
from lpderham.lifts.expressions import Expression

FAMILIES = sorted(CATALOG)


def test_cone_membership_examples():
    cone = Cone([1.0, 0.0, 0.0], 0.5)
    assert cone_membership([1.0, 0.0, 0.0], cone)
    assert not cone_membership([0.0, 1.0, 0.0], cone)
    assert cone_membership([0.0, 0.0, 0.0], cone)
    assert cone_membership([0.5, math.sqrt(0.75), 0.0], cone)
    assert not cone_membership([-1.0, 0.0, 0.0], cone)


def test_sampled_cone_points_are_members(rng):
    cone = Cone([0.0, 1.0, 0.0], 0.7)
    assert np.all(cone.contains(sample_cone(rng, cone, 10_000)))


def test_tilting_a_cone_shrinks_its_aperture():
    assert tilt_aperture(0.9, 0.0) == pytest.approx(0.9)
    assert tilt_aperture(0.9, 0.1) < 0.9
    assert tilt_aperture(0.1, math.pi / 2) < 0


@pytest.mark.parametrize('text,n,L', [('abs(x1)/2', 2, 0.5),
                                      ('sqrt(x0**2 + x1**2)/4', 2, 0.25),
                                      ('x0 - x2', 3, math.sqrt(2))])
def test_graph_over_a_cone_stays_in_the_shrunk_cone(rng, text, n, L):
    report = graph_cone_bound(Expression(text, n, lipschitz=L), L, 0.9, rng, samples=100_000)
    assert report.aperture == pytest.approx(0.9 / (1 + L))
    assert report.samples == 100_000
    assert report.violations == 0


def test_graph_of_the_second_coordinate_halves_the_aperture(rng):
    report = graph_cone_bound(Expression('x1', 2, lipschitz=1), 1.0, 0.8, rng)
    assert report.aperture == pytest.approx(0.4)
    assert report.samples == 100_000
    assert report.violations == 0


def test_graph_cone_bound_needs_xi_to_vanish_at_the_apex(rng):
    with pytest.raises(ValueError):
        graph_cone_bound(Expression('x0 + 1', 2, lipschitz=1), 1.0, 0.9, rng, samples=10)


@pytest.mark.parametrize('angle', [0.05, 0.1, 0.2])
def test_tilted_cone_estimate_has_no_violations(rng, angle):
    lam = [math.sin(angle), 0.0, math.cos(angle)]
    report = tilted_cone_bound(lam, 0.9, rng, samples=100_000)
    assert not report.vacuous
    assert report.violations == 0
    assert report.extra['eps'] == pytest.approx(1 - math.cos(angle))


def test_tilted_cone_estimate_can_be_vacuous(rng):
    report = tilted_cone_bound([math.sin(0.1), 0.0, math.cos(0.1)], 0.05, rng, samples=10)
    assert report.vacuous
    assert report.aperture <= 0


def test_normal_basis_is_orthonormal_and_starts_at_e1_lambda():
    lam = np.array([math.sin(0.3), 0.0, math.cos(0.3)])
    B = normal_basis(lam)
    assert np.allclose(B.T @ B, np.eye(2))
    assert np.allclose(B.T @ lam, 0.0)
    e1_lam = np.array([1.0, 0.0, -lam[0] / lam[2]])
    assert np.allclose(B[:, 0], e1_lam / np.linalg.norm(e1_lam))


def test_single_plane_flattening_is_an_isometry(rng):
    h = build_flattening(get_family('single_plane'), rng)
    Q = rng.uniform(-3, 3, size=(1000, 3))
    assert np.allclose(h(Q), Q)
    estimate = bilipschitz_estimate(h, rng, pairs=2000)
    assert estimate.lower == pytest.approx(1.0)
    assert estimate.upper == pytest.approx(1.0)


@pytest.mark.parametrize('name', FAMILIES)
def test_round_trip(rng, name):
    h = build_flattening(get_family(name), rng)
    assert round_trip_error(h, rng, samples=20_000) <= 1e-9


@pytest.mark.parametrize('name', FAMILIES)
def test_images_of_the_hypersurfaces_are_graphs(rng, name):
    h = build_flattening(get_family(name), rng)
    assert max(graph_test(h, points_per_axis=32).values()) <= 1e-9


@pytest.mark.parametrize('name', FAMILIES)
def test_regions_map_below_the_graphs(rng, name):
    h = build_flattening(get_family(name), rng)
    excess = [v for v in region_test(h, rng).values() if v is not None]
    assert max(excess, default=0.0) <= 1e-9


@pytest.mark.parametrize('name', ['parallel_planes', 'tilted_planes', 'three_planes'])
def test_flattening_is_continuous_and_bilipschitz(rng, name):
    h = build_flattening(get_family(name), rng)
    assert np.isfinite(continuity_test(h, rng, samples=500))
    estimate = bilipschitz_estimate(h, rng, pairs=5000)
    assert not estimate.degenerate
    assert estimate.upper < 10


def test_two_plane_distortion_is_at_most_one_plus_the_tilt_slope(rng):
    family = get_family('tilted_planes')
    L = max(family.stage(k).lipschitz for k in (1, 2))
    assert L == pytest.approx(math.tan(0.1))
    estimate = bilipschitz_estimate(build_flattening(family, rng), rng, pairs=20_000)
    assert estimate.upper <= (1 + L) * (1 + 1e-3)
    assert estimate.lower >= 1 / ((1 + L) * (1 + 1e-3))


def test_flattened_cone_on_the_kinked_family(rng):
    h = build_flattening(get_family('kinked'), rng)
    result = flatten_cone_check(h, 0.9, rng, samples=20_000)
    assert result.aperture > 0
    assert result.report.violations == 0


def test_flattened_cone_needs_surfaces_through_the_apex(rng):
    h = build_flattening(get_family('parallel_planes'), rng)
    with pytest.raises(ValueError):
        flatten_cone_check(h, 0.9, rng, samples=10)


def test_family_with_a_wrong_lipschitz_constant_is_refused(rng):
    family = get_family({'name': 'bad', 'stages': [{'lambda': [0, 0, 1], 'zeta': 'x0',
                                                     'L': 0.1}]})
    with pytest.raises(CheckFailed):
        build_flattening(family, rng)


def test_family_out_of_order_is_refused(rng):
    e_n = [0.0, 0.0, 1.0]
    family = RegularFamily([Stage(e_n, Expression('1', 3, 0.0), Expression('0', 3, 0.0)),
                            Stage(e_n, Expression('0', 3, 0.0))])
    with pytest.raises(CheckFailed):
        build_flattening(family, rng)


def test_unknown_family_name():
    with pytest.raises(ValueError):
        get_family('moebius')
