from lpderham.lifts.analysis import (CriterionReport, Curve, GrowthFit, check_cell_preservation,
                                     check_endpoints, check_tau_preservation,
                                     difference_quotients, dyadic_grid, fiber_quotients,
                                     fit_growth_exponents, lipschitz_criterion, sample_cloud)
from lpderham.lifts.cells import (Band, Graph, Interval, Point, verify_declared_constants)
from lpderham.lifts.expressions import Expression
from lpderham.lifts.retractions import (CustomRetraction, DiagonalPowerRetraction, StandardLift,
                                        lift_through)


def get_cell(payload):
    """Build a cell tower from nested {type: interval|point|graph|band, ...} payloads."""
    kind = payload['type']
    if kind == 'interval':
        return Interval(payload['a'], payload['b'])
    elif kind == 'point':
        return Point(payload['c'])
    elif kind == 'graph':
        return Graph(get_cell(payload['base']), payload['theta'], lipschitz=payload.get('L'))
    elif kind == 'band':
        return Band(get_cell(payload['base']), payload['lower'], payload['upper'],
                    lipschitz_lower=payload.get('L_lower'), lipschitz_upper=payload.get('L_upper'))
    else:
        raise ValueError(f'Unknown cell type {kind!r}.')


def get_retraction(payload):
    kind = payload['type']
    if kind == 'diagonal':
        return DiagonalPowerRetraction(payload['weights'])
    elif kind == 'custom':
        return CustomRetraction(payload['components'])
    else:
        raise ValueError(f'Unknown retraction type {kind!r}.')
