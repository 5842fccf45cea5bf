"""Rational homology of simplicial and nerve complexes by exact elimination."""
import logging

from sympy import Matrix, Rational, zeros

from lpderham.forms.polynomial import qq_pair, to_qq
from lpderham.topology.simplicial import Chain, faces

logger = logging.getLogger('logger')


def boundary_matrix(complex_, degree):
    """Matrix of ∂_degree: rows index (degree−1)-simplices, columns degree-simplices."""
    cols = complex_.simplices_of_dim(degree)
    rows = complex_.simplices_of_dim(degree - 1) if degree > 0 else []
    row_index = {s: i for i, s in enumerate(rows)}
    M = zeros(len(rows), len(cols))
    if degree == 0:
        return M, rows, cols
    for c, simplex in enumerate(cols):
        for j, face in enumerate(faces(simplex)):
            M[row_index[face], c] = -1 if j % 2 else 1
    return M, rows, cols


def _rank(M):
    return M.rank() if M.rows and M.cols else 0


def chain_vector(chain, simplices):
    index = {s: i for i, s in enumerate(simplices)}
    v = zeros(len(simplices), 1)
    for s, c in chain.coeffs.items():
        if s not in index:
            raise ValueError(f'Simplex {list(s)} is not in the complex.')
        num, den = qq_pair(c)
        v[index[s], 0] = Rational(num, den)
    return v


def vector_chain(vector, simplices):
    return Chain({s: to_qq(vector[i]) for i, s in enumerate(simplices) if vector[i] != 0})


def cycle_space(complex_, degree):
    """Basis of ker ∂_degree as chains."""
    M, _, cols = boundary_matrix(complex_, degree)
    if not cols:
        return []
    if degree == 0 or not M.rows:
        basis = [Matrix([1 if i == j else 0 for i in range(len(cols))]) for j in range(len(cols))]
    else:
        basis = M.nullspace()
    return [vector_chain(v, cols) for v in basis]


def homology(complex_, degree):
    """Betti number over QQ and representative cycles of a homology basis."""
    if degree < 0:
        raise ValueError('Homology degree must be nonnegative.')
    d_k, _, cols = boundary_matrix(complex_, degree)
    d_k1, _, _ = boundary_matrix(complex_, degree + 1)
    rank_k = _rank(d_k) if degree > 0 else 0
    rank_k1 = _rank(d_k1)
    betti = len(cols) - rank_k - rank_k1
    cycles = []
    if betti:
        image = d_k1 if d_k1.cols else zeros(len(cols), 0)
        current_rank = rank_k1
        kernel = [chain_vector(c, cols) for c in cycle_space(complex_, degree)]
        for z in kernel:
            candidate = image.row_join(z)
            r = candidate.rank()
            if r > current_rank:
                image, current_rank = candidate, r
                cycles.append(vector_chain(z, cols))
            if len(cycles) == betti:
                break
    assert len(cycles) == betti, 'Sanity check for homology representatives.'
    logger.debug(f'H_{degree}: betti={betti}')
    return betti, cycles


def betti_numbers(complex_, max_degree=None):
    top = complex_.dimension if max_degree is None else max_degree
    return [homology(complex_, d)[0] for d in range(top + 1)]


def homology_report(complex_, max_degree=None):
    """{betti: [...], cycles: [[chain, ...] per degree]} for every degree up to the top."""
    top = complex_.dimension if max_degree is None else max_degree
    betti, cycles = [], []
    for degree in range(top + 1):
        b, reps = homology(complex_, degree)
        betti.append(b)
        cycles.append([c.to_json() for c in reps])
    return {'betti': betti, 'cycles': cycles}
