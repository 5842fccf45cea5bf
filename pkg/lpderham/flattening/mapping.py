"""The flattening map h_H of a regular family, its inverse and its sampled properties.

Stages: stage 0 is E(H_1; λ_1), stage s (1 ≤ s < b) is the slab between H_s
and H_{s+1}, stage b lies beyond H_b. Then

    stage 0:  h(q) = (Bᵀ π_{λ_1} q ; q·λ_1)
    stage s:  h(q) = h(π_{H_s} q) + (q·λ_s − ζ_s(π_{λ_s} q)) e_N

with B an orthonormal basis of N_{λ_1}. h maps H_k onto the graph of η_k over
the first N − 1 coordinates, where η_1(w′) = ζ_1(B w′) and
η_{s+1}(w′) = η_s(w′) + (ζ′_s − ζ_s)(π_{λ_s} h⁻¹(w′, η_s(w′))).
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from lpderham.exceptions import DegenerateInputError
from lpderham.flattening.cones import Cone, ConeReport, angle_between, tilt_aperture
from lpderham.flattening.family import REGION_TOL

logger = logging.getLogger('logger')

ETA_LIPSCHITZ_SLACK = 1.05
DEGENERATE_DISTORTION = 1e-9


class FlatteningMap:
    def __init__(self, family, tol=REGION_TOL):
        self.family = family
        self.N = family.N
        self.b = len(family)
        self.tol = tol
        self.basis = family.stage(1).basis

    def __repr__(self):
        return f'FlatteningMap({self.family})'

    def stage_of(self, Q, max_stage=None):
        """First k with q ∈ E(H_k; λ_k) gives stage k − 1; ties go to the lower stage."""
        Q = np.atleast_2d(Q)
        stages = np.full(len(Q), self.b)
        for k in range(self.b, 0, -1):
            below = self.family.stage(k).height(Q) <= self.tol
            stages[below] = k - 1
        if max_stage is not None:
            stages = np.minimum(stages, max_stage)
        return stages

    def __call__(self, Q, max_stage=None):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        stages = self.stage_of(Q, max_stage)
        out = np.empty_like(Q)
        first = self.family.stage(1)
        base = stages == 0
        if np.any(base):
            X = Q[base]
            out[base] = np.hstack([first.project(X) @ self.basis, (X @ first.lam)[:, None]])
        for s in range(1, self.b + 1):
            mask = stages == s
            if not np.any(mask):
                continue
            stage = self.family.stage(s)
            X = Q[mask]
            lifted = self(stage.onto_surface(X), max_stage=s - 1)
            lifted[:, -1] += stage.height(X)
            out[mask] = lifted
        return out

    def ladder(self, W_prime):
        """η_1, …, η_b at w′ and the points P_s = h⁻¹(w′, η_s(w′)) on H_s."""
        W_prime = np.atleast_2d(W_prime)
        first = self.family.stage(1)
        P = W_prime @ self.basis.T
        eta = first.zeta(P)
        P = P + np.outer(eta, first.lam)
        etas, points = [eta], [P]
        for s in range(1, self.b):
            stage = self.family.stage(s)
            X = stage.project(P)
            step = stage.zeta_prime(X) - stage.zeta(X)
            eta = eta + step
            P = P + np.outer(step, stage.lam)
            etas.append(eta)
            points.append(P)
        return np.array(etas), points

    def eta(self, k, W_prime):
        """η_k, whose graph over e_N is h(H_k)."""
        if not 1 <= k <= self.b:
            raise ValueError(f'No hypersurface H_{k} in a family of {self.b}.')
        return self.ladder(W_prime)[0][k - 1]

    def inverse(self, W):
        """Stagewise inverse: the stage of w is the number of η_s strictly below w_N."""
        W = np.atleast_2d(np.asarray(W, dtype=float))
        W_prime, w_N = W[:, :-1], W[:, -1]
        etas, points = self.ladder(W_prime)
        stages = np.sum(w_N[None, :] > etas + self.tol, axis=0)
        first = self.family.stage(1)
        out = W_prime @ self.basis.T + np.outer(w_N, first.lam)
        for s in range(1, self.b + 1):
            mask = stages == s
            if np.any(mask):
                lam = self.family.stage(s).lam
                out[mask] = points[s - 1][mask] + np.outer(w_N[mask] - etas[s - 1][mask], lam)
        return out


def build_flattening(family, rng=None, validate=True):
    if validate:
        family.validate(rng if rng is not None else np.random.default_rng(0))
    return FlatteningMap(family)


@dataclass
class BilipschitzEstimate:
    lower: float
    upper: float
    pairs: int
    degenerate: bool

    def summary(self):
        return dict(self.__dict__)


def sample_box(rng, N, count, radius):
    return rng.uniform(-radius, radius, size=(count, N))


def bilipschitz_estimate(h, rng, pairs=10_000, radius=3.0):
    """min and max of |h(p) − h(q)| / |p − q| over near and far sampled pairs."""
    P = sample_box(rng, h.N, pairs, radius)
    scale = np.where(rng.random(pairs) < 0.5, 10.0 ** rng.uniform(-6, -1, size=pairs), radius)
    Q = P + rng.standard_normal((pairs, h.N)) * scale[:, None]
    distance = np.linalg.norm(P - Q, axis=1)
    keep = distance > 0
    quotients = np.linalg.norm(h(P[keep]) - h(Q[keep]), axis=1) / distance[keep]
    lower, upper = float(quotients.min()), float(quotients.max())
    degenerate = lower < DEGENERATE_DISTORTION
    if degenerate:
        logger.warning(f'{h} nearly collapses a sampled pair (quotient {lower:.3g}).')
    return BilipschitzEstimate(lower, upper, int(keep.sum()), degenerate)


def round_trip_error(h, rng, samples=10_000, radius=3.0):
    """max |h⁻¹(h(q)) − q|."""
    Q = sample_box(rng, h.N, samples, radius)
    return float(np.max(np.linalg.norm(h.inverse(h(Q)) - Q, axis=1)))


def surface_grid(h, k, points_per_axis=64, radius=2.0):
    """Points of H_k over a grid in N_{λ_k}-coordinates."""
    axis = np.linspace(-radius, radius, points_per_axis)
    U = np.stack(np.meshgrid(*([axis] * (h.N - 1)), indexing='ij'), axis=-1).reshape(-1, h.N - 1)
    return h.family.stage(k).surface_points(U)


def graph_test(h, points_per_axis=64, radius=2.0):
    """Per k, max |h(q)_N − η_k(h(q)′)| over a grid on H_k: the image is a graph over e_N."""
    errors = {}
    for k in range(1, h.b + 1):
        W = h(surface_grid(h, k, points_per_axis, radius))
        errors[k] = float(np.max(np.abs(W[:, -1] - h.eta(k, W[:, :-1]))))
    return errors


def region_test(h, rng, samples=10_000, radius=3.0):
    """Per k, the largest excess of h(q)_N over η_k(h(q)′) for sampled q ∈ E(H_k; λ_k)."""
    Q = sample_box(rng, h.N, samples, radius)
    W = h(Q)
    excess = {}
    for k in range(1, h.b + 1):
        inside = h.family.stage(k).height(Q) <= 0
        if not np.any(inside):
            excess[k] = None
            continue
        gap = W[inside, -1] - h.eta(k, W[inside, :-1])
        excess[k] = float(max(0.0, gap.max()))
    return excess


def continuity_test(h, rng, samples=2000, radius=2.0, delta=1e-7):
    """max |h(x + δλ_k) − h(x − δλ_k)| / 2δ for x on the stage boundaries H_k."""
    worst = 0.0
    for k in range(1, h.b + 1):
        stage = h.family.stage(k)
        X = stage.surface_points(rng.uniform(-radius, radius, size=(samples, h.N - 1)))
        jump = np.linalg.norm(h(X + delta * stage.lam) - h(X - delta * stage.lam), axis=1)
        worst = max(worst, float(jump.max() / (2 * delta)))
    return worst


def eta_lipschitz(h, k, rng, pairs=10_000, radius=2.0):
    """L of η_k: declared for k = 1, sampled with slack beyond."""
    if k == 1 and h.family.stage(1).lipschitz is not None:
        return h.family.stage(1).lipschitz
    P = rng.uniform(-radius, radius, size=(pairs, h.N - 1))
    Q = P + rng.standard_normal((pairs, h.N - 1)) * (10.0 ** rng.uniform(-4, 0, size=pairs))[:, None]
    quotients = np.abs(h.eta(k, P) - h.eta(k, Q)) / np.linalg.norm(P - Q, axis=1)
    return ETA_LIPSCHITZ_SLACK * float(quotients.max())


@dataclass
class FlattenedCone:
    aperture: float
    per_surface: dict
    report: ConeReport = None
    stages_used: dict = field(default_factory=dict)

    def summary(self):
        out = {'aperture': self.aperture,
               'per_surface': {str(k): v for k, v in self.per_surface.items()}}
        if self.report is not None:
            out.update({k: v for k, v in self.report.summary().items() if k != 'aperture'})
        return out


def surface_aperture(h, k, aperture, eta_lip):
    """Aperture for h(A ∩ H_k) with A ⊂ C(e₁, M), chaining tilts and graph projections.

    π_N ∘ h on H_k is π_{λ_1} ∘ π_{H_1} ∘ … ∘ π_{H_{k−1}}; each π_{H_j} tilts the
    axis onto e_{1,λ_j} and divides by 1 + L_j, π_{λ_1} keeps the aperture, and
    the graph of η_k divides by 1 + L_{η_k}.
    """
    axis = np.eye(h.N)[0]
    M = aperture
    for j in range(k - 1, 0, -1):
        stage = h.family.stage(j)
        target = stage.basis[:, 0]
        M = tilt_aperture(M, angle_between(axis, target))
        if M <= 0:
            return M
        M /= 1 + (stage.lipschitz or 0.0)
        axis = target
    M = tilt_aperture(M, angle_between(axis, h.basis[:, 0]))
    if M <= 0:
        return M
    return M / (1 + eta_lip)


def flatten_cone_check(h, aperture, rng, samples=100_000, radius=1.0):
    """Explicit M′ with h(A) ⊂ C(e₁, M′) for A = (∪ H_k) ∩ C(e₁, M), then sampled membership."""
    origin = np.zeros((1, h.N))
    if any(abs(float(s.zeta(origin)[0])) > 1e-12 for s in h.family.stages):
        raise ValueError('The cone estimate needs every ζ_k(0) = 0.')
    cone = Cone(np.eye(h.N)[0], aperture)
    per_surface, points, used = {}, [origin], {}
    per_piece = max(1, samples // h.b)
    for k in range(1, h.b + 1):
        lip = eta_lipschitz(h, k, rng)
        per_surface[k] = surface_aperture(h, k, aperture, lip)
        used[k] = {'eta_lipschitz': lip, 'tilts': k}
        points.append(_cone_points_on_surface(h, k, cone, rng, per_piece, radius))
    bound = min(per_surface.values())
    A = np.vstack(points)
    if bound <= 0:
        logger.info(f'Cone estimate for {h} is vacuous (M′ = {bound:.6g}).')
        return FlattenedCone(bound, per_surface, ConeReport(bound, len(A), 0, True), used)
    target = Cone(np.eye(h.N)[0], bound)
    images = h(A)
    inside = target.contains(images)
    violations = int(np.sum(~inside))
    witness = {}
    if violations:
        i = int(np.argmin(inside))
        witness = {'q': A[i].tolist(), 'image': images[i].tolist()}
        logger.warning(f'{violations} flattened samples leave C(e1, {bound:.6g}).')
    return FlattenedCone(bound, per_surface, ConeReport(bound, len(A), violations, False, witness),
                         used)


def _cone_points_on_surface(h, k, cone, rng, count, radius, max_rounds=200):
    stage = h.family.stage(k)
    kept, total = [], 0
    for _ in range(max_rounds):
        X = stage.surface_points(rng.uniform(-radius, radius, size=(count, h.N - 1)))
        X = X[cone.contains(X)]
        kept.append(X)
        total += len(X)
        if total >= count:
            break
    if total == 0:
        raise DegenerateInputError(f'H_{k} meets the cone only at the apex on the sample.')
    return np.vstack(kept)[:count]
