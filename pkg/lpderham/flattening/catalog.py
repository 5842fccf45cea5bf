"""Named regular families in ℝ³ used by scenes and tests."""
import math

import numpy as np

from lpderham.flattening.family import RegularFamily, Stage
from lpderham.lifts.expressions import Expression

N = 3
E_N = (0.0, 0.0, 1.0)


def _fn(text, lipschitz):
    return Expression(text, N, lipschitz=lipschitz)


def _tilted(angle, axis=0):
    lam = np.zeros(N)
    lam[axis] = math.sin(angle)
    lam[-1] = math.cos(angle)
    return lam


def _level(height, lam):
    """The plane {q_N = height} as a graph relative to λ: ζ(p) = (height − p_N)/λ_N."""
    c = float(lam[-1])
    lipschitz = math.sqrt(max(0.0, 1 - c * c)) / c
    return _fn(f'({height} - x2)/{c!r}', lipschitz)


def single_plane():
    return RegularFamily([Stage(E_N, _fn('0', 0.0))], name='single_plane')


def single_graph():
    nu = _tilted(0.1)
    return RegularFamily([Stage(nu, _fn('abs(x1)/4', 0.25))], name='single_graph')


def parallel_planes():
    return RegularFamily([Stage(E_N, _fn('0', 0.0), _fn('1', 0.0)),
                          Stage(E_N, _fn('1', 0.0))], name='parallel_planes')


def tilted_planes(angle=0.1):
    """{q_N = 0} relative to e_N, then {q_N = 1} relative to a direction tilted by ``angle``."""
    lam2 = _tilted(angle)
    return RegularFamily([Stage(E_N, _fn('0', 0.0), _fn('1', 0.0)),
                          Stage(lam2, _level(1, lam2))], name='tilted_planes')


def three_planes():
    lam2, lam3 = _tilted(0.1, axis=0), _tilted(0.15, axis=1)
    return RegularFamily([Stage(E_N, _fn('0', 0.0), _fn('1', 0.0)),
                          Stage(lam2, _level(1, lam2), _level(2, lam2)),
                          Stage(lam3, _level(2, lam3))], name='three_planes')


def kinked():
    """A downward cone and the plane N_ν through the origin, both relative to ν."""
    nu = _tilted(0.1)
    return RegularFamily([Stage(nu, _fn('-sqrt(x0**2 + x1**2 + x2**2)/5', 0.2), _fn('0', 0.0)),
                          Stage(nu, _fn('0', 0.0))], name='kinked')


CATALOG = {
    'single_plane': single_plane,
    'single_graph': single_graph,
    'parallel_planes': parallel_planes,
    'tilted_planes': tilted_planes,
    'three_planes': three_planes,
    'kinked': kinked,
}
