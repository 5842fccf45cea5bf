import numpy as np
import pytest

from lpderham.exceptions import CheckFailed, DegenerateInputError
from lpderham.lifts import (Band, Curve, CustomRetraction, DiagonalPowerRetraction, Graph,
                            Interval, check_cell_preservation, check_endpoints,
                            check_tau_preservation, difference_quotients, dyadic_grid,
                            fiber_quotients, fit_growth_exponents, get_cell, get_retraction,
                            lift_through, lipschitz_criterion, sample_cloud,
                            verify_declared_constants)

SQUARE = Band(Interval(-1, 1), '-1', '1')
KINK = 'abs(x0**2 - x1)'
WITNESS_CURVE = Curve(['t', 't**2 + t**5'])


def kink_band():
    return Band(SQUARE, '0', KINK, lipschitz_upper=3)


def closed_form_ratio(t):
    return abs(t ** 4 - t ** 3 - t ** 6) / t ** 5


def test_criterion_along_the_witness_curve_matches_closed_form(rng):
    cell = kink_band()
    points = SQUARE.sample(rng, 100)
    report = lipschitz_criterion(cell.lower, cell.upper, DiagonalPowerRetraction([1, 1]), points,
                                 t_grid=[0.1, 0.01], curves=[WITNESS_CURVE])
    curve_rows = {t: value for source, t, value in report.rows if source == 'curve0'}
    assert curve_rows[0.1] == pytest.approx(closed_form_ratio(0.1), rel=1e-9)
    assert curve_rows[0.1] == pytest.approx(90.1, abs=0.01)
    assert curve_rows[0.01] > 1e3
    assert report.verdict == 'unbounded'


def test_criterion_is_t_squared_for_the_weighted_retraction(rng):
    cell = kink_band()
    cloud = sample_cloud(cell, rng, 500, min_margin=0.01)
    t_grid = dyadic_grid(1, 12)
    report = lipschitz_criterion(cell.lower, cell.upper, DiagonalPowerRetraction([1, 2]),
                                 cloud[:, :-1], t_grid=t_grid, curves=[WITNESS_CURVE])
    for _, t, value in report.rows:
        assert value == pytest.approx(t ** 2, abs=1e-12)
    assert report.verdict == 'bounded'
    assert report.sup_ratio == pytest.approx(0.25, abs=1e-12)


def test_constant_bounds_give_ratio_one(rng):
    cell = Band(Interval(-1, 1), '0', '1')
    report = lipschitz_criterion(cell.lower, cell.upper, DiagonalPowerRetraction([1]),
                                 Interval(-1, 1).sample(rng, 50), t_grid=[0.5, 0.25])
    assert report.sup_ratio == pytest.approx(1.0)


def test_criterion_refuses_coinciding_bounds():
    with pytest.raises(DegenerateInputError):
        lipschitz_criterion(Band(Interval(-1, 1), '0', '0').lower,
                            Band(Interval(-1, 1), '0', '0').upper,
                            DiagonalPowerRetraction([1]), np.array([[0.5]]), t_grid=[0.5])


@pytest.mark.parametrize('weights,lam,mu', [([1, 1], 1.0, 2.0), ([1, 2], 1.0, 3.0)])
def test_growth_exponents_of_diagonal_retractions(rng, weights, lam, mu):
    points = rng.uniform(-1, 1, size=(500, 2))
    fit = fit_growth_exponents(DiagonalPowerRetraction(weights), points)
    assert fit.lam == pytest.approx(lam, abs=0.05)
    assert fit.mu == pytest.approx(mu, abs=0.05)
    assert fit.power_law


def test_growth_exponent_of_the_band_lift(rng):
    cell = kink_band()
    lift = lift_through(cell, DiagonalPowerRetraction([1, 2]))
    cloud = sample_cloud(cell, rng, 1000, min_margin=0.05)
    fit = fit_growth_exponents(lift, cloud)
    assert fit.mu == pytest.approx(5.0, abs=0.1)
    det = lift.det(cloud, 0.5)
    assert np.allclose(det, 0.5 ** 5)
    assert np.allclose(np.linalg.det(lift.jacobian(cloud, 0.5)), det)


def test_jacobian_is_lower_triangular(rng):
    cell = kink_band()
    lift = lift_through(cell, DiagonalPowerRetraction([1, 1]))
    D = lift.jacobian(sample_cloud(cell, rng, 50, min_margin=0.05), 0.3)
    assert np.all(D[:, 0, 1:] == 0)
    assert np.all(D[:, 1, 2:] == 0)


def test_custom_retraction_matches_the_diagonal_one(rng):
    points = rng.uniform(-1, 1, size=(20, 2))
    custom = CustomRetraction(['t*x0', 't**2*x1'])
    diagonal = DiagonalPowerRetraction([1, 2])
    assert np.allclose(custom(points, 0.3), diagonal(points, 0.3))
    assert np.allclose(custom.jacobian(points, 0.3), diagonal.jacobian(points, 0.3))


def test_endpoint_laws_and_invariants(rng):
    cell = kink_band()
    lift = lift_through(cell, DiagonalPowerRetraction([1, 2]))
    cloud = sample_cloud(cell, rng, 500, min_margin=0.01)
    errors = check_endpoints(lift, cloud)
    assert errors['identity_error'] == 0.0
    assert errors['apex_error'] < 1e-12
    assert check_tau_preservation(lift, cloud, dyadic_grid(1, 12)) < 1e-10
    assert check_cell_preservation(lift, cell, cloud, dyadic_grid(1, 12)) is None


def test_trivial_lifts():
    graph = Graph(Interval(-1, 1), '0')
    lift = lift_through(graph, DiagonalPowerRetraction([1]))
    Q = np.array([[0.5, 0.0], [-0.25, 0.0]])
    assert np.allclose(lift(Q, 0.5), [[0.25, 0.0], [-0.125, 0.0]])
    band = Band(Interval(-1, 1), '0', '1')
    lift = lift_through(band, DiagonalPowerRetraction([1]))
    assert np.allclose(lift(np.array([[0.5, 0.3]]), 0.5), [[0.25, 0.3]])


def test_kink_lift_fiber_quotients_blow_up_along_the_witness():
    lift = lift_through(kink_band(), DiagonalPowerRetraction([1, 1]))
    quotients = [float(fiber_quotients(lift, WITNESS_CURVE([t]), t)[0]) for t in (0.5, 0.1, 0.02)]
    assert quotients[0] < quotients[1] < quotients[2]
    assert quotients[2] > 1e3


def test_graph_lift_is_lipschitz(rng):
    graph = Graph(Interval(-1, 1), 'abs(x0)/2', lipschitz=0.5)
    lift = lift_through(graph, DiagonalPowerRetraction([1]))
    X = Interval(-1, 1).sample(rng, 1000)
    Y = np.clip(X + rng.uniform(-0.1, 0.1, size=X.shape), -1, 1)
    P = np.hstack([X, graph.theta(X)[:, None]])
    Q = np.hstack([Y, graph.theta(Y)[:, None]])
    keep = np.linalg.norm(P - Q, axis=1) > 0
    for t in dyadic_grid(1, 8):
        assert np.max(difference_quotients(lift, P[keep], Q[keep], t)) <= 1.5 + 1e-9


def test_declared_lipschitz_constants_are_verified(rng):
    assert verify_declared_constants(kink_band(), rng, pairs=10_000)
    with pytest.raises(CheckFailed):
        verify_declared_constants(Graph(Interval(-1, 1), 'x0', lipschitz=0.5), rng, pairs=1000)


def test_factories_build_nested_towers():
    cell = get_cell({'type': 'band',
                     'base': {'type': 'band', 'base': {'type': 'interval', 'a': -1, 'b': 1},
                              'lower': '-1', 'upper': '1'},
                     'lower': '0', 'upper': KINK})
    assert cell.ambient_dim == 3
    assert get_retraction({'type': 'diagonal', 'weights': [1, 2]}).dim == 2
    with pytest.raises(ValueError):
        get_cell({'type': 'sphere'})
