"""Regular families of hypersurfaces H_1, …, H_b in ℝ^N.

Stage k carries a unit direction λ_k, the function ζ_k with H_k the graph of
ζ_k relative to λ_k, and (for k < b) ζ′_k with H_{k+1} the graph of ζ′_k
relative to the same λ_k. A graph relative to λ is {p + ζ(p)λ : p ∈ N_λ},
N_λ = λ^⊥, and its region below is E(H; λ) = {q : q·λ ≤ ζ(π_λ q)}. The
functions are expressions in the ambient coordinates x0, …, x{N−1},
evaluated at the projected point π_λ q.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lpderham.exceptions import CheckFailed, DimensionMismatch
from lpderham.lifts.expressions import Expression, verify_lipschitz

logger = logging.getLogger('logger')

REGION_TOL = 1e-9
VALIDATION_SAMPLES = 2000
VALIDATION_RADIUS = 3.0


def normal_basis(lam):
    """Orthonormal basis (columns) of N_λ from Gram-Schmidt on e_{j,λ} = e_j − (λ_j/λ_N) e_N.

    e_{j,λ} is the vector of N_λ projecting to e_j, so the first column is
    e_{1,λ}/|e_{1,λ}|.
    """
    lam = np.asarray(lam, dtype=float)
    N = len(lam)
    if lam[-1] <= 0:
        raise ValueError(f'Directions need λ·e_N > 0, got {lam.tolist()}.')
    E = np.eye(N)[:, :N - 1] - np.outer(np.eye(N)[-1], lam[:N - 1] / lam[-1])
    Q, R = np.linalg.qr(E)
    return Q * np.sign(np.diag(R))


@dataclass
class Stage:
    lam: np.ndarray
    zeta: Expression
    zeta_prime: Optional[Expression] = None

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float)
        norm = np.linalg.norm(self.lam)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f'λ must be a unit vector, got norm {norm:.12g}.')
        self.lam = self.lam / norm
        self.basis = normal_basis(self.lam)

    @property
    def lipschitz(self):
        return self.zeta.lipschitz

    @property
    def tilt(self):
        """1 − λ·e_N."""
        return 1.0 - float(self.lam[-1])

    def project(self, Q):
        """π_λ q."""
        Q = np.atleast_2d(Q)
        return Q - np.outer(Q @ self.lam, self.lam)

    def height(self, Q):
        """q_λ − ζ(π_λ q); nonpositive exactly on E(H; λ)."""
        Q = np.atleast_2d(Q)
        return Q @ self.lam - self.zeta(self.project(Q))

    def onto_surface(self, Q):
        """π_H q = π_λ q + ζ(π_λ q) λ."""
        P = self.project(Q)
        return P + np.outer(self.zeta(P), self.lam)

    def surface_points(self, U):
        """Points of H for N_λ-coordinates U of shape (count, N − 1)."""
        P = np.atleast_2d(U) @ self.basis.T
        return P + np.outer(self.zeta(P), self.lam)


class RegularFamily:
    def __init__(self, stages, name=None):
        if not stages:
            raise ValueError('A regular family needs at least one hypersurface.')
        self.stages = list(stages)
        self.N = len(self.stages[0].lam)
        self.name = name or 'family'
        for k, stage in enumerate(self.stages, start=1):
            if len(stage.lam) != self.N or stage.zeta.n_vars != self.N:
                raise DimensionMismatch(f'Stage {k} does not live in R^{self.N}.')
            if k < len(self.stages) and stage.zeta_prime is None:
                raise ValueError(f'Stage {k} needs ζ′ describing H_{k + 1} relative to λ_{k}.')

    def __len__(self):
        return len(self.stages)

    def __repr__(self):
        return f'RegularFamily({self.name}, b={len(self)}, N={self.N})'

    @property
    def tilt(self):
        """Smallest ε with λ_k·e_N ≥ 1 − ε for every k."""
        return max(stage.tilt for stage in self.stages)

    def stage(self, k):
        """Stage data of H_k, 1-based."""
        return self.stages[k - 1]

    def _ambient_samples(self, rng, count, radius):
        return rng.uniform(-radius, radius, size=(count, self.N))

    def check_ordering(self, rng, samples=VALIDATION_SAMPLES, radius=VALIDATION_RADIUS):
        """ζ_k ≤ ζ′_k on sampled points of N_{λ_k}."""
        for k, stage in enumerate(self.stages[:-1], start=1):
            P = stage.project(self._ambient_samples(rng, samples, radius))
            gap = stage.zeta_prime(P) - stage.zeta(P)
            if np.any(gap < -REGION_TOL):
                i = int(np.argmin(gap))
                raise CheckFailed(f'ζ_{k} > ζ′_{k} at a sampled point.',
                                  witness={'stage': k, 'point': P[i].tolist(), 'gap': float(gap[i])})

    def check_regions(self, rng, samples=VALIDATION_SAMPLES, radius=VALIDATION_RADIUS):
        """E(H_{k+1}; λ_k) = E(H_{k+1}; λ_{k+1}) on samples, outside a tolerance band."""
        for k in range(1, len(self)):
            here, there = self.stage(k), self.stage(k + 1)
            Q = self._ambient_samples(rng, samples, radius)
            h_here = Q @ here.lam - here.zeta_prime(here.project(Q))
            h_there = there.height(Q)
            clear = (np.abs(h_here) > REGION_TOL) & (np.abs(h_there) > REGION_TOL)
            disagree = clear & ((h_here <= 0) != (h_there <= 0))
            if np.any(disagree):
                i = int(np.argmax(disagree))
                raise CheckFailed(f'The regions below H_{k + 1} relative to λ_{k} and λ_{k + 1} '
                                  f'differ at a sampled point.',
                                  witness={'stage': k, 'q': Q[i].tolist()})

    def check_lipschitz(self, rng, pairs=VALIDATION_SAMPLES, radius=VALIDATION_RADIUS):
        for k, stage in enumerate(self.stages, start=1):
            for fn in (stage.zeta, stage.zeta_prime):
                if fn is None or fn.lipschitz is None:
                    continue
                P = stage.project(self._ambient_samples(rng, pairs, radius))
                step = stage.project(rng.standard_normal((pairs, self.N)))
                step *= (10.0 ** rng.uniform(-4, 0, size=pairs))[:, None]
                verify_lipschitz(fn, P, P + step)

    def validate(self, rng, samples=VALIDATION_SAMPLES):
        self.check_ordering(rng, samples)
        self.check_regions(rng, samples)
        self.check_lipschitz(rng, samples)
        logger.info(f'{self}: ordering, regions and Lipschitz constants hold on {samples} samples; '
                    f'tilt ε = {self.tilt:.6g}.')
