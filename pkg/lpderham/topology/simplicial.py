"""Oriented simplicial complexes, chains, covers by open stars and nerves.

Simplices are sorted vertex tuples. Open stars are handled combinatorially:
an open simplex σ lies in the open star of v iff v ∈ σ, so a family of pieces
(unions of open stars) has a common point iff some simplex meets every piece.
"""
import logging
import math
from itertools import combinations

import numpy as np
from sympy import Matrix, Rational
from sympy.polys.domains import QQ

from lpderham.exceptions import DimensionMismatch
from lpderham.forms.exterior import permutation_sign
from lpderham.forms.polynomial import (polynomial_ring, qq_pair, qq_to_float, to_float_point,
                                       to_qq)

logger = logging.getLogger('logger')


def faces(simplex):
    return [simplex[:j] + simplex[j + 1:] for j in range(len(simplex))]


def normalize_simplex(vertices):
    """Sorted tuple and the sign of the sorting permutation (0 on repeats)."""
    return tuple(sorted(vertices)), permutation_sign(vertices)


class SimplicialComplex:
    def __init__(self, vertices, simplices, close=True):
        self.vertices = [tuple(to_qq(c) for c in v) for v in vertices]
        dims = {len(v) for v in self.vertices}
        if len(dims) > 1:
            raise DimensionMismatch('Vertices live in spaces of different dimension.')
        self.ambient_dim = dims.pop() if dims else 0
        top = set()
        for s in simplices:
            key, sign = normalize_simplex(tuple(int(i) for i in s))
            if not sign:
                raise ValueError(f'Simplex {tuple(s)} repeats a vertex.')
            if key and (key[0] < 0 or key[-1] >= len(self.vertices)):
                raise ValueError(f'Simplex {tuple(s)} uses an unknown vertex.')
            top.add(key)
        all_simplices = set(top)
        if close:
            for s in top:
                for size in range(1, len(s)):
                    all_simplices.update(combinations(s, size))
        elif any(f not in all_simplices for s in top for f in faces(s) if f):
            raise ValueError('Simplex list is not closed under taking faces.')
        all_simplices.update((i,) for i in range(len(self.vertices)))
        self.simplices = frozenset(all_simplices)

    @property
    def dimension(self):
        return max(len(s) for s in self.simplices) - 1 if self.simplices else -1

    def simplices_of_dim(self, d):
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def top_simplices(self):
        """Simplices that are not a face of another simplex."""
        facets = set()
        for s in self.simplices:
            facets.update(f for f in faces(s) if f)
        return sorted(s for s in self.simplices if s not in facets)

    def is_pure(self, d=None):
        d = self.dimension if d is None else d
        return all(len(s) == d + 1 for s in self.top_simplices())

    def contains(self, simplex):
        return tuple(sorted(simplex)) in self.simplices

    def points(self, simplex):
        return [self.vertices[i] for i in simplex]

    def barycenter(self, simplex):
        pts = self.points(simplex)
        m = QQ(len(pts))
        return tuple(sum((p[c] for p in pts), QQ(0)) / m for c in range(self.ambient_dim))

    def float_points(self, simplex):
        return np.array([to_float_point(p) for p in self.points(simplex)])

    def to_json(self):
        return {'vertices': [[qq_to_float(c) for c in v] for v in self.vertices],
                'simplices': [list(s) for s in self.top_simplices()]}

    @classmethod
    def from_json(cls, payload):
        return cls(payload['vertices'], payload['simplices'])


class Chain:
    """A formal QQ-combination of oriented simplices, stored on sorted tuples."""

    def __init__(self, terms=None):
        coeffs = {}
        for simplex, c in (terms or {}).items():
            key, sign = normalize_simplex(tuple(int(i) for i in simplex))
            if not sign:
                continue
            value = to_qq(c) * sign
            coeffs[key] = coeffs.get(key, QQ(0)) + value
        self.coeffs = {s: c for s, c in coeffs.items() if c}

    @classmethod
    def simplex(cls, vertices, coeff=1):
        return cls({tuple(vertices): coeff})

    @property
    def degree(self):
        sizes = {len(s) for s in self.coeffs}
        if len(sizes) > 1:
            raise ValueError('Chain mixes simplices of different dimension.')
        return sizes.pop() - 1 if sizes else None

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        terms = dict(self.coeffs)
        for s, c in other.coeffs.items():
            terms[s] = terms.get(s, QQ(0)) + c
        return Chain(terms)

    def __neg__(self):
        return Chain({s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = to_qq(factor)
        return Chain({s: factor * c for s, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, Chain) and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            return 'Chain(0)'
        return 'Chain(' + ' + '.join(f'{c}·{list(s)}' for s, c in sorted(self.coeffs.items())) + ')'

    def to_json(self):
        return [{'simplex': list(s), 'num': qq_pair(c)[0], 'den': qq_pair(c)[1]}
                for s, c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, items):
        return cls({tuple(item['simplex']): QQ(int(item.get('num', 1)), int(item.get('den', 1)))
                    for item in items})


def boundary(chain):
    """∂[i₀…i_l] = Σ_{j≥0} (−1)^j [i₀…î_j…i_l]."""
    terms = {}
    for simplex, c in chain.coeffs.items():
        if len(simplex) == 1:
            continue
        for j, face in enumerate(faces(simplex)):
            value = -c if j % 2 else c
            terms[face] = terms.get(face, QQ(0)) + value
    return Chain(terms)


class Cover:
    """Open cover of |K| by unions of open stars, with a base point per piece.

    ``pieces[i]`` is the vertex set whose open stars make up U_i.
    """

    def __init__(self, complex_, pieces, base_points=None, star=False):
        self.complex = complex_
        self.pieces = [frozenset(int(v) for v in p) for p in pieces]
        if any(not p for p in self.pieces):
            raise ValueError('Every cover piece must be nonempty.')
        covered = frozenset().union(*self.pieces)
        missing = set(range(len(complex_.vertices))) - covered
        if missing:
            raise ValueError(f'Vertices {sorted(missing)} are not covered by any piece.')
        self.star = star
        if base_points is None:
            base_points = [complex_.barycenter(self.witness((i,))) for i in range(len(self.pieces))]
        self.base_points = [tuple(to_qq(c) for c in b) for b in base_points]

    def __len__(self):
        return len(self.pieces)

    def witness(self, index_tuple):
        """The smallest simplex lying in every piece of ``index_tuple``, or None."""
        if self.star:
            simplex = tuple(sorted(index_tuple))
            return simplex if self.complex.contains(simplex) else None
        best = None
        for s in self.complex.simplices:
            if all(set(s) & self.pieces[i] for i in index_tuple):
                if best is None or (len(s), s) < (len(best), best):
                    best = s
        return best

    def intersects(self, index_tuple):
        return self.witness(index_tuple) is not None

    def base_point(self, index_tuple):
        """Base point from which U_I is taken to be star-shaped."""
        if len(index_tuple) == 1:
            return self.base_points[index_tuple[0]]
        return self.complex.barycenter(self.witness(index_tuple))

    def intersection_simplices(self, index_tuple):
        """Open simplices of K contained in U_I."""
        return sorted(s for s in self.complex.simplices
                      if all(set(s) & self.pieces[i] for i in index_tuple))


def star_cover(complex_):
    """One piece per vertex: the open star of the vertex, based at the vertex."""
    if not complex_.vertices:
        raise ValueError('The star cover of an empty complex is empty.')
    pieces = [{i} for i in range(len(complex_.vertices))]
    return Cover(complex_, pieces, base_points=complex_.vertices, star=True)


class NerveComplex(SimplicialComplex):
    """Nerve of a cover: one simplex per nonempty intersection U_I."""

    def __init__(self, cover, simplices):
        self.cover = cover
        self.vertices = [tuple() for _ in range(len(cover))]
        self.ambient_dim = 0
        self.simplices = frozenset(simplices)


def nerve(cover):
    simplices = set()
    frontier = [(i,) for i in range(len(cover))]
    simplices.update(frontier)
    while frontier:
        grown = set()
        for s in frontier:
            for j in range(s[-1] + 1, len(cover)):
                candidate = s + (j,)
                if all(f in simplices for f in faces(candidate)) and cover.intersects(candidate):
                    grown.add(candidate)
        simplices.update(grown)
        frontier = sorted(grown)
    return NerveComplex(cover, simplices)


def barycentric_coordinates(complex_, simplex):
    """Exact affine polynomials λ_j on ℝⁿ with λ_j(v_i) = δ_ij for a top simplex."""
    n = complex_.ambient_dim
    if len(simplex) != n + 1:
        raise DimensionMismatch(f'A {len(simplex) - 1}-simplex in R^{n} has no barycentric chart.')

    pts = complex_.points(simplex)
    rows = [[Rational(int(QQ.numer(c)), int(QQ.denom(c))) for c in p] + [1] for p in pts]
    A = Matrix(rows)
    if A.det() == 0:
        raise ValueError(f'Simplex {simplex} is degenerate.')
    inv = A.inv()
    R = polynomial_ring(n)
    coords = []
    for j in range(n + 1):
        col = inv[:, j]
        p = R.ground_new(to_qq(col[n]))
        for c in range(n):
            p += to_qq(col[c]) * R.gens[c]
        coords.append(p)
    return coords


def sample_points(complex_, simplex, rng, count, margin=0.0):
    """Uniform points of the open simplex, pulled towards its barycenter by ``margin``."""
    pts = complex_.float_points(simplex)
    weights = rng.dirichlet(np.ones(len(simplex)), size=count)
    weights = (1 - margin) * weights + margin / len(simplex)
    return weights @ pts


def simplex_volume(complex_, simplex):
    """d-dimensional volume of a d-simplex spanning ℝ^d."""
    pts = complex_.float_points(simplex)
    edges = pts[1:] - pts[0]
    if edges.shape[0] != edges.shape[1]:
        raise DimensionMismatch('Volumes are taken for full-dimensional simplices only.')
    return abs(np.linalg.det(edges)) / math.factorial(edges.shape[0])
