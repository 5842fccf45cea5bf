"""Small triangulated spaces with rational vertex coordinates."""
from fractions import Fraction

from lpderham.topology.simplicial import SimplicialComplex

# inner and outer triangles of the annulus and cylinder, origin in the middle
_RING = [('1', '0'), ('-1/2', '1'), ('-1/2', '-1')]
_BAND_TRIANGLES = [(0, 1, 3), (1, 4, 3), (1, 2, 4), (2, 5, 4), (2, 0, 5), (0, 3, 5)]


def interval():
    return SimplicialComplex([('0',), ('1',)], [(0, 1)])


def circle():
    """Boundary of the square with corners on the axes."""
    vertices = [('1', '0'), ('0', '1'), ('-1', '0'), ('0', '-1')]
    return SimplicialComplex(vertices, [(0, 1), (1, 2), (2, 3), (0, 3)])


def triangle_boundary():
    return SimplicialComplex([('0', '0'), ('1', '0'), ('0', '1')], [(0, 1), (1, 2), (0, 2)])


def triangle():
    return SimplicialComplex([('0', '0'), ('1', '0'), ('0', '1')], [(0, 1, 2)])


def disk():
    """The square [−1, 1]² coned off from its center (vertex 4)."""
    vertices = [('-1', '-1'), ('1', '-1'), ('1', '1'), ('-1', '1'), ('0', '0')]
    return SimplicialComplex(vertices, [(0, 1, 4), (1, 2, 4), (2, 3, 4), (0, 3, 4)])


def tetrahedron_boundary():
    vertices = [('0', '0', '0'), ('1', '0', '0'), ('0', '1', '0'), ('0', '0', '1')]
    return SimplicialComplex(vertices, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def annulus():
    """Region between a triangle around the origin and its triple, six triangles."""
    outer = [tuple(str(3 * Fraction(c)) for c in v) for v in _RING]
    return SimplicialComplex(_RING + outer, _BAND_TRIANGLES)


def cylinder():
    """Triangular prism surface without caps, in ℝ³."""
    bottom = [v + ('0',) for v in _RING]
    top = [v + ('1',) for v in _RING]
    return SimplicialComplex(bottom + top, _BAND_TRIANGLES)


CATALOG = {
    'interval': interval,
    'circle': circle,
    'triangle_boundary': triangle_boundary,
    'triangle': triangle,
    'disk': disk,
    'tetrahedron_boundary': tetrahedron_boundary,
    'annulus': annulus,
    'cylinder': cylinder,
}
