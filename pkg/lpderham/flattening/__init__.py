from lpderham.flattening.catalog import CATALOG
from lpderham.flattening.cones import (Cone, ConeReport, cone_membership, graph_cone_bound,
                                       sample_cone, tilt_aperture, tilted_cone_bound)
from lpderham.flattening.family import RegularFamily, Stage, normal_basis
from lpderham.flattening.mapping import (BilipschitzEstimate, FlattenedCone, FlatteningMap,
                                         bilipschitz_estimate, build_flattening,
                                         continuity_test, eta_lipschitz, flatten_cone_check,
                                         graph_test, region_test, round_trip_error,
                                         surface_aperture)
from lpderham.lifts.expressions import Expression


def get_family(payload):
    """A catalog name or {name, stages: [{lambda, zeta, zeta_prime, L, L_prime}]}."""
    if isinstance(payload, str):
        if payload not in CATALOG:
            raise ValueError(f'Unknown family {payload!r}; known: {sorted(CATALOG)}.')
        return CATALOG[payload]()
    stages = []
    for entry in payload['stages']:
        n_vars = len(entry['lambda'])
        zeta_prime = entry.get('zeta_prime')
        stages.append(Stage(entry['lambda'],
                            Expression(entry['zeta'], n_vars, lipschitz=entry.get('L')),
                            None if zeta_prime is None else
                            Expression(zeta_prime, n_vars, lipschitz=entry.get('L_prime'))))
    return RegularFamily(stages, name=payload.get('name'))
