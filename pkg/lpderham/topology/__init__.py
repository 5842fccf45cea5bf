from lpderham.topology.catalog import CATALOG
from lpderham.topology.homology import (betti_numbers, boundary_matrix, cycle_space, homology,
                                        homology_report)
from lpderham.topology.simplicial import (Chain, Cover, NerveComplex, SimplicialComplex,
                                          barycentric_coordinates, boundary, nerve,
                                          star_cover)


def get_complex(payload):
    """A catalog name or a {vertices, simplices} payload."""
    if isinstance(payload, str):
        if payload not in CATALOG:
            raise ValueError(f'Unknown complex {payload!r}; known: {sorted(CATALOG)}.')
        return CATALOG[payload]()
    return SimplicialComplex.from_json(payload)


def get_cover(complex_, payload=None):
    """Star cover by default, else {pieces: [[vertices]], base_points: optional}."""
    if payload is None or payload == 'star':
        return star_cover(complex_)
    return Cover(complex_, payload['pieces'], base_points=payload.get('base_points'))
