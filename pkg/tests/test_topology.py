import pytest

from lpderham.topology import (Chain, SimplicialComplex, betti_numbers, boundary, get_complex,
                               get_cover, homology, nerve, star_cover)

EXPECTED_BETTI = {
    'interval': [1, 0],
    'circle': [1, 1],
    'triangle_boundary': [1, 1],
    'triangle': [1, 0, 0],
    'disk': [1, 0, 0],
    'tetrahedron_boundary': [1, 0, 1],
    'annulus': [1, 1, 0],
    'cylinder': [1, 1, 0],
}


@pytest.mark.parametrize('name', sorted(EXPECTED_BETTI))
def test_betti_numbers_of_catalog(name):
    assert betti_numbers(get_complex(name)) == EXPECTED_BETTI[name]


@pytest.mark.parametrize('name', ['interval', 'circle', 'disk', 'tetrahedron_boundary',
                                  'cylinder', 'annulus'])
def test_star_cover_nerve_has_the_same_homology(name):
    complex_ = get_complex(name)
    nerve_ = nerve(star_cover(complex_))
    assert betti_numbers(nerve_, complex_.dimension) == betti_numbers(complex_)


def test_boundary_squared_vanishes(rng):
    complex_ = get_complex('tetrahedron_boundary')
    for _ in range(100):
        d = int(rng.integers(1, 3))
        simplices = complex_.simplices_of_dim(d)
        chain = Chain({s: int(rng.integers(-3, 4)) for s in simplices})
        assert boundary(boundary(chain)).is_zero()


def test_orientation_sign_on_construction():
    assert Chain({(1, 0): 1}) == Chain({(0, 1): -1})
    assert Chain({(0, 0): 1}).is_zero()


def test_homology_representatives_are_cycles():
    betti, cycles = homology(get_complex('annulus'), 1)
    assert betti == 1
    assert boundary(cycles[0]).is_zero()


def test_complex_rejects_repeated_and_unknown_vertices():
    with pytest.raises(ValueError):
        SimplicialComplex([('0',), ('1',)], [(0, 0)])
    with pytest.raises(ValueError):
        SimplicialComplex([('0',), ('1',)], [(0, 2)])


def test_uncovered_vertex_is_rejected():
    with pytest.raises(ValueError):
        get_cover(get_complex('circle'), {'pieces': [[0, 1], [1, 2]]})
