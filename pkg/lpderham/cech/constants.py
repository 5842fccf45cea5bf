"""Solving δc = g for constant cochains, and pairing cochains with chains."""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sympy import Matrix, Rational
from sympy.polys.domains import QQ

from lpderham.cech.cochain import CechCochain, add_values, cech_delta, negate, value_is_zero
from lpderham.forms.polynomial import qq_pair, to_qq
from lpderham.topology.homology import boundary_matrix, cycle_space
from lpderham.topology.simplicial import Chain

logger = logging.getLogger('logger')

FLOAT_TOL = 1e-7


@dataclass
class ConstantSolution:
    cochain: Optional[CechCochain]
    cycle: Optional[Chain] = None
    period: Optional[object] = None

    @property
    def feasible(self):
        return self.cochain is not None


def _is_exact(values):
    return all(isinstance(v, QQ.dtype) or isinstance(v, int) for v in values)


def _rational(value):
    num, den = qq_pair(to_qq(value))
    return Rational(num, den)


def pairing(cochain, chain):
    """⟨g, c⟩ = Σ a_I g_I for a constant cochain g."""
    total = None
    for simplex, a in chain.coeffs.items():
        value = cochain.values.get(simplex)
        if value is None:
            continue
        term = a * value if isinstance(value, QQ.dtype) else float(value) * _as_float(a)
        total = add_values(total, term)
    return QQ(0) if total is None else total


def _as_float(c):
    num, den = qq_pair(c)
    return num / den


def _close_to_zero(value, scale):
    if isinstance(value, QQ.dtype):
        return value == 0
    return abs(float(value)) <= FLOAT_TOL * max(1.0, scale)


def solve_constants(g):
    """Find a constant cochain c with δc = g, or a nerve cycle pairing nonzero with g.

    Degree one is solved along a spanning forest of the nerve graph with
    c = 0 at the smallest vertex of every component; a non-tree edge that
    disagrees yields its fundamental cycle. Higher degrees use an exact
    linear solve with all free parameters set to 0.
    """
    if g.k != 0 or g.l < 1:
        raise ValueError('solve_constants takes a constant cochain of Čech degree at least 1.')
    scale = max([abs(_as_float(v) if isinstance(v, QQ.dtype) else float(v))
                 for v in g.values.values()] + [0.0])
    d_g = cech_delta(g)
    if any(not _close_to_zero(v, scale) for v in d_g.values.values()):
        raise ValueError('The constant cochain is not δ-closed.')
    if g.is_zero():
        return ConstantSolution(CechCochain(g.nerve, g.l - 1, 0, {}))
    if g.l == 1:
        return _solve_on_graph(g, scale)
    return _solve_linear(g, scale)


def _solve_on_graph(g, scale):
    nerve_ = g.nerve
    vertices = [s[0] for s in nerve_.simplices_of_dim(0)]
    edges = nerve_.simplices_of_dim(1)
    neighbours = {v: [] for v in vertices}
    for i, j in edges:
        neighbours[i].append(j)
        neighbours[j].append(i)
    exact = _is_exact(g.values.values())
    zero = QQ(0) if exact else 0.0

    def g_along(u, v):
        value = g[(u, v)]
        return zero if value is None else value

    c, parent = {}, {}
    for root in vertices:
        if root in c:
            continue
        c[root] = zero
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(neighbours[u]):
                if v not in c:
                    c[v] = add_values(c[u], g_along(u, v))
                    parent[v] = u
                    queue.append(v)

    for i, j in edges:
        if parent.get(j) == i or parent.get(i) == j:
            continue
        defect = add_values(add_values(c[j], negate(c[i])), negate(g_along(i, j)))
        if _close_to_zero(defect, scale):
            continue
        cycle = _fundamental_cycle(i, j, parent)
        period = pairing(g, cycle)
        logger.info(f'Constants are inconsistent on edge {[i, j]}; period {period}.')
        return ConstantSolution(None, cycle=cycle, period=period)

    cochain = CechCochain(nerve_, 0, 0, {(v,): value for v, value in c.items()
                                         if not value_is_zero(value)})
    return ConstantSolution(cochain)


def _path_to_root(v, parent):
    path = [v]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    return path


def _fundamental_cycle(i, j, parent):
    """Edge i→j closed up by the tree path from j back to i."""
    up_i, up_j = _path_to_root(i, parent), _path_to_root(j, parent)
    common = next(v for v in up_j if v in set(up_i))
    walk = up_j[:up_j.index(common) + 1] + list(reversed(up_i[:up_i.index(common)]))
    terms = {(i, j): 1}
    for a, b in zip(walk[:-1], walk[1:]):
        terms[(a, b)] = terms.get((a, b), 0) + 1
    chain = Chain()
    for (a, b), coeff in terms.items():
        chain = chain + Chain.simplex((a, b), coeff)
    return chain


def _solve_linear(g, scale):
    nerve_ = g.nerve
    # δ on C^{l-1} is the transpose of ∂_l
    boundary, rows, cols = boundary_matrix(nerve_, g.l)
    delta = boundary.T
    exact = _is_exact(g.values.values())
    if exact:
        b = Matrix([_rational(g.values.get(J, QQ(0))) for J in cols])
        try:
            solution, params = delta.gauss_jordan_solve(b)
        except ValueError:
            return _certificate(g)
        solution = solution.subs({p: 0 for p in params})
        values = {I: to_qq(solution[r]) for r, I in enumerate(rows) if solution[r] != 0}
    else:
        A = np.array(delta.tolist(), dtype=float)
        b = np.array([float(g.values.get(J, 0.0)) for J in cols])
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.max(np.abs(A @ x - b), initial=0.0) > FLOAT_TOL * max(1.0, scale):
            return _certificate(g)
        values = {I: float(x[r]) for r, I in enumerate(rows) if x[r] != 0.0}
    return ConstantSolution(CechCochain(nerve_, g.l - 1, 0, values))


def _certificate(g):
    scale = max([abs(_as_float(v) if isinstance(v, QQ.dtype) else float(v))
                 for v in g.values.values()] + [0.0])
    for cycle in cycle_space(g.nerve, g.l):
        period = pairing(g, cycle)
        if not _close_to_zero(period, scale):
            return ConstantSolution(None, cycle=cycle, period=period)
    raise AssertionError('Sanity check: an unsolvable system must pair nonzero with a cycle.')
