from fractions import Fraction

import numpy as np
import pytest

from lpderham.cone import (Chart, ConeMetric, RadialForm, TruncationSchedule,
                           chart_integral_check, critical_exponent, detect_divergence,
                           get_radial_form, homotopy_bound_constant, horn_growth,
                           lp_norm_truncated, nontrivial_class_check, p_grid,
                           retraction_operator_experiment, scan_thresholds)
from lpderham.lifts.expressions import Expression

BRACKETS = [
    ((1, 1, 1), (1.5, 2.5), (1.95, 2.0)),
    ((2, 1, 1), (1.0, 2.0), (1.45, 1.5)),
    ((1, 2, 1), (1.0, 4.0), (2.95, 3.0)),
    ((2, 2, 2), (1.0, 1.5), (1.2, 1.25)),
]


def test_critical_exponent_formula():
    assert critical_exponent(1, 1, 1) == 2
    assert critical_exponent(2, 1, 1) == Fraction(3, 2)
    assert critical_exponent(1, 2, 1) == 3
    assert critical_exponent(2, 2, 2) == Fraction(5, 4)
    with pytest.raises(ValueError):
        critical_exponent(1, 1, 0)


@pytest.mark.parametrize('params,span,bracket', BRACKETS)
def test_divergence_scan_brackets_the_critical_exponent(params, span, bracket):
    alpha, m, k = params
    metric = ConeMetric(alpha, m)
    scan = scan_thresholds(RadialForm(k), metric, p_grid(span[0], span[1], 0.05),
                           TruncationSchedule())
    assert scan.flips == 1
    assert scan.bracket[0] == pytest.approx(bracket[0])
    assert scan.bracket[1] == pytest.approx(bracket[1])
    p_star = float(critical_exponent(alpha, m, k))
    assert scan.bracket[0] < p_star <= scan.bracket[1]
    assert list(scan.to_frame().columns) == ['p', 'slope', 'verdict']


def test_truncated_norm_grows_only_above_the_threshold():
    metric = ConeMetric(1, 1)
    omega = RadialForm(1)
    below = [lp_norm_truncated(omega, metric, 1.5, eps) for eps in (1e-2, 1e-4, 1e-8)]
    above = [lp_norm_truncated(omega, metric, 3.0, eps) for eps in (1e-2, 1e-4, 1e-8)]
    assert below[-1] - below[0] < 0.2
    assert above[-1] > 50 * above[0]


def test_zero_form_converges_everywhere():
    report = detect_divergence(RadialForm(1, 0.0), ConeMetric(1, 1), 10.0, TruncationSchedule())
    assert report.verdict == 'converges'


def test_short_schedule_is_rejected():
    with pytest.raises(ValueError, match='too short'):
        detect_divergence(RadialForm(1), ConeMetric(1, 1), 1.5, TruncationSchedule(4, 5))


def test_base_norm_expression_on_the_torus():
    omega = get_radial_form({'k': 1, 'base_norm': '1 + x0'}, 1)
    report = detect_divergence(omega, ConeMetric(1, 1), 1.5, TruncationSchedule())
    assert report.verdict == 'converges'


def test_empty_grid_and_bad_metric_are_rejected():
    with pytest.raises(ValueError):
        p_grid(2.0, 1.0, 0.05)
    with pytest.raises(ValueError):
        ConeMetric('1/2', 1)
    with pytest.raises(ValueError):
        RadialForm(3).check(ConeMetric(1, 2))


def test_homotopy_bound_constant():
    assert homotopy_bound_constant(3.0, 1.0, 2.0, 1) == pytest.approx(3.0)
    assert homotopy_bound_constant(4.0, 1.0, 2.0, 1, eps=0.5) == pytest.approx(2 * (1 - 0.5 ** 0.5))
    with pytest.raises(ValueError):
        homotopy_bound_constant(2.0, 1.0, 2.0, 1)


def test_horn_growth_exponents(rng):
    fit = horn_growth(ConeMetric(1, 1), rng)
    assert fit.lam == pytest.approx(1.0, abs=0.05)
    assert fit.mu == pytest.approx(2.0, abs=0.05)


def test_retraction_ratio_respects_the_bound(rng):
    metric = ConeMetric(1, 1)
    for p in (4.0, 3.0, 2.5):
        experiment = retraction_operator_experiment(RadialForm(1), metric, p, [0.0, 0.5], rng)
        for eps, _, ratio, bound, *_ in experiment.rows:
            assert bound is not None
            assert ratio <= 1.05 * bound


def test_retraction_ratio_blows_up_near_the_threshold(rng):
    metric = ConeMetric(1, 1)
    far = retraction_operator_experiment(RadialForm(1), metric, 4.0, [0.0], rng).rows[0][2]
    near = retraction_operator_experiment(RadialForm(1), metric, 2.001, [0.0], rng).rows[0][2]
    assert near >= 10 * far


def test_pullback_norm_decreases_to_zero(rng):
    eps = [0.5] + list(2.0 ** -np.arange(2, 21))
    experiment = retraction_operator_experiment(RadialForm(1), ConeMetric(1, 1), 4.0, eps, rng)
    pullback = [row[4] for row in experiment.rows]
    assert all(b < a for a, b in zip(pullback, pullback[1:]))
    assert pullback[-1] < 1e-3 * pullback[0]


def test_bound_is_absent_below_the_threshold(rng):
    experiment = retraction_operator_experiment(RadialForm(1), ConeMetric(1, 1), 1.5, [0.0], rng)
    assert experiment.rows[0][3] is None


def test_retraction_norms_scale_with_the_base_norm():
    metric = ConeMetric(1, 1)
    unit, double = (retraction_operator_experiment(RadialForm(1, c), metric, 4.0, [0.0, 0.5],
                                                   np.random.default_rng(0)).rows
                    for c in (1.0, 2.0))
    for a, b in zip(unit, double):
        assert b[2] == pytest.approx(a[2])
        assert b[6] == pytest.approx(2 * a[6])
        assert b[7] == pytest.approx(2 * a[7])
        assert a[6] > 0


def test_zero_form_has_zero_retraction_rows(rng):
    experiment = retraction_operator_experiment(RadialForm(1, 0.0), ConeMetric(1, 1), 4.0,
                                                [0.0, 0.5], rng)
    for eps, beta, ratio, bound, *norms in experiment.rows:
        assert ratio == 0.0
        assert norms == [0.0, 0.0, 0.0, 0.0]
        assert bound is not None


def test_chart_integral_bracket():
    integrand = Expression('x0**2 + x1**2 + x2**2', 3)
    box = [(0.0, 1.0), (0.0, 1.0)]
    good = Chart(['x0', 'x1', '(x0 + x1)/2'], 2, lipschitz=1.25)
    check = chart_integral_check(good, integrand, box)
    assert check.holds
    assert check.area_min == pytest.approx(np.sqrt(1.5))
    bad = Chart(['x0', 'x1', '(x0 + x1)/2'], 2, lipschitz=1.0)
    assert not chart_integral_check(bad, integrand, box).holds


def test_angular_class_is_lp_and_not_exact(rng):
    metric = ConeMetric(1, 1)
    below = nontrivial_class_check(metric, 1.5, rng)
    assert below['in_lp_and_nonexact']
    assert abs(below['period']) == pytest.approx(1.0, abs=1e-6)
    above = nontrivial_class_check(metric, 2.5, rng)
    assert above['verdict'] == 'diverges'
    assert not above['in_lp_and_nonexact']
