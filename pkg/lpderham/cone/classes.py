"""A radially constant class that is L^p below the critical exponent and not exact.

On the cone over the unit circle the angular form dy has |dy|_M = 1 and is
radially constant; the cone minus its apex retracts onto an annulus, where
the zigzag integrates the winding form around the generating cycle.
"""
import logging
import math

from lpderham.cech import integrate_over_cycle
from lpderham.cone.divergence import detect_divergence
from lpderham.cone.metric import RadialForm, TruncationSchedule, critical_exponent
from lpderham.forms import winding_form
from lpderham.topology import homology, nerve, star_cover
from lpderham.topology.catalog import annulus

logger = logging.getLogger('logger')

PERIOD_TOL = 1e-6


def nontrivial_class_check(metric, p, rng, schedule=None):
    """Norm verdict and period of dy on the cone over S¹ (the period is 1 for the unit circle)."""
    if metric.m != 1:
        raise ValueError('The angular class is checked over the circle (m = 1).')
    schedule = schedule or TruncationSchedule()
    omega = RadialForm(1, 1.0, name='angular')
    report = detect_divergence(omega, metric, p, schedule)
    complex_ = annulus()
    _, cycles = homology(complex_, 1)
    period = integrate_over_cycle(winding_form(), cycles[0], nerve(star_cover(complex_)), rng=rng)
    unit_period = period / (2 * math.pi)
    nontrivial = abs(abs(unit_period) - 1.0) < PERIOD_TOL
    logger.info(f'Angular class at p={p}: norm {report.verdict}, period {unit_period:.12g}.')
    return {'p': float(p), 'p_star': float(critical_exponent(metric.alpha, 1, 1)),
            'verdict': report.verdict, 'period': unit_period,
            'in_lp_and_nonexact': report.verdict == 'converges' and nontrivial}
