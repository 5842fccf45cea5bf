"""Cones C_n(λ, M) = {q : q·λ ≥ M|q|} and the aperture estimates for graphs and tilts."""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from lpderham.exceptions import DimensionMismatch

logger = logging.getLogger('logger')

MEMBERSHIP_TOL = 1e-12
BOUNDARY_FRACTION = 0.1


class Cone:
    def __init__(self, axis, aperture):
        axis = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(axis)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f'Cone axis must be a unit vector, got norm {norm}.')
        if not 0.0 <= aperture < 1.0:
            raise ValueError(f'Aperture must lie in [0, 1), got {aperture}.')
        self.axis = axis
        self.aperture = float(aperture)
        self.n = len(axis)

    def __repr__(self):
        return f'Cone(axis={self.axis.tolist()}, M={self.aperture:.6g})'

    def margin(self, Q):
        """q·λ − M|q|; nonnegative on the cone."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[1] != self.n:
            raise DimensionMismatch(f'Points in R^{Q.shape[1]} for a cone in R^{self.n}.')
        return Q @ self.axis - self.aperture * np.linalg.norm(Q, axis=1)

    def contains(self, Q, tol=MEMBERSHIP_TOL):
        """Membership with a relative tolerance; the apex is a member."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        return self.margin(Q) >= -tol * np.linalg.norm(Q, axis=1)


def cone_membership(q, cone):
    return bool(cone.contains(q)[0])


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def sample_cone(rng, cone, count, radius=1.0):
    """Points of the cone up to ``radius``: cos of the angle to the axis uniform in [M, 1].

    A fixed fraction of the samples sits exactly on the boundary.
    """
    n = cone.n
    radii = radius * rng.uniform(0.0, 1.0, size=count)
    if n == 1:
        return np.outer(radii, cone.axis)
    cosines = rng.uniform(cone.aperture, 1.0, size=count)
    on_boundary = rng.random(count) < BOUNDARY_FRACTION
    cosines[on_boundary] = cone.aperture
    W = rng.standard_normal((count, n))
    W -= np.outer(W @ cone.axis, cone.axis)
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    directions = cosines[:, None] * cone.axis + np.sqrt(1 - cosines ** 2)[:, None] * W
    return directions * radii[:, None]


def angle_between(u, v):
    return math.acos(min(1.0, max(-1.0, float(np.dot(unit(u), unit(v))))))


def tilt_aperture(M, angle):
    """Aperture around v of the smallest cone containing C(u, M) when ∠(u, v) = angle.

    Negative when the tilted cone no longer fits in a half-space.
    """
    return math.cos(math.acos(M) + angle)


@dataclass
class ConeReport:
    aperture: float
    samples: int
    violations: int
    vacuous: bool = False
    witness: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def summary(self):
        out = {'aperture': self.aperture, 'samples': self.samples, 'violations': self.violations,
               'vacuous': self.vacuous}
        out.update(self.extra)
        if self.witness:
            out['witness'] = self.witness
        return out


def _report(aperture, points, target, extra=None):
    inside = target.contains(points)
    violations = int(np.sum(~inside))
    witness = {}
    if violations:
        i = int(np.argmin(inside))
        witness = {'q': points[i].tolist(), 'margin': float(target.margin(points[i])[0])}
        logger.warning(f'{violations} samples outside {target}; first at {witness["q"]}.')
    return ConeReport(aperture, len(points), violations, False, witness, extra or {})


def graph_cone_bound(xi, lipschitz, aperture, rng, samples=100_000, radius=1.0):
    """Graph of ξ over C_n(e₁, M) lies in C_{n+1}(e₁, M/(1 + L)) when ξ(0) = 0."""
    n = xi.n_vars
    if abs(float(xi(np.zeros((1, n)))[0])) > 1e-12:
        raise ValueError('The graph estimate needs ξ(0) = 0.')
    bound = aperture / (1 + lipschitz)
    X = sample_cone(rng, Cone(np.eye(n)[0], aperture), samples, radius)
    graph = np.hstack([X, xi(X)[:, None]])
    return _report(bound, graph, Cone(np.eye(n + 1)[0], bound))


def tilted_cone_bound(lam, aperture, rng, samples=100_000, radius=1.0):
    """C(e₁, M) ⊂ C(v/|v|, M′) with v = e₁ + A e_N ∈ N_λ and M′ = (M − √(2ε)/(1−ε))/|v|."""
    lam = unit(lam)
    N = len(lam)
    if lam[-1] <= 0:
        raise ValueError('The tilt estimate needs λ·e_N > 0.')
    eps = max(0.0, 1.0 - float(lam[-1]))
    A = -lam[0] / lam[-1]
    v = np.eye(N)[0] + A * np.eye(N)[-1]
    bound = (aperture - math.sqrt(2 * eps) / (1 - eps)) / np.linalg.norm(v)
    extra = {'eps': eps, 'A': float(A), 'v_norm': float(np.linalg.norm(v))}
    if bound <= 0:
        logger.info(f'Tilt estimate is vacuous: M={aperture} is below √(2ε)/(1−ε).')
        return ConeReport(bound, 0, 0, True, {}, extra)
    Q = sample_cone(rng, Cone(np.eye(N)[0], aperture), samples, radius)
    return _report(bound, Q, Cone(unit(v), bound), extra)
