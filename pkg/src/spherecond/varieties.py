"""Variety distance oracles, Monte Carlo tube estimates, and exact checks.

Varieties are symmetric subsets of S^p with an attached projective
distance evaluator: great subspheres (exact), singular matrices via the
smallest singular value (exact), and plane curves on S^2 via a dense
mesh with Newton refinement (upper bound on the true distance).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.stats import beta as beta_dist

from .geometry import (
    Cap,
    SpherePoint,
    j_integral,
    kinematic_constant,
    sphere_volume,
    subsphere_tube_volume,
    _log_binom,
)
from .sampling import RngStream, sample_uniform_cap


# ---------------------------------------------------------------------------
# confidence intervals


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with a 99% confidence interval."""

    estimate: float
    ci_low: float
    ci_high: float
    samples: int
    seed: int

    def __post_init__(self):
        if not self.ci_low <= self.estimate <= self.ci_high:
            raise ValueError("confidence interval must contain the estimate")


def clopper_pearson(successes: float, trials: int, level: float = 0.99):
    """Clopper-Pearson interval; fractional successes extend it to bounded means."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    a = 1.0 - level
    if successes <= 0.0:
        lo = 0.0
    else:
        lo = float(beta_dist.ppf(a / 2, successes, trials - successes + 1))
    if successes >= trials:
        hi = 1.0
    else:
        hi = float(beta_dist.ppf(1 - a / 2, successes + 1, trials - successes))
    return lo, hi


# ---------------------------------------------------------------------------
# varieties


class Variety:
    """Base class: a symmetric subset of S^p with a distance evaluator."""

    p: int
    degree: int
    distance_kind: str

    def distances(self, points: np.ndarray) -> np.ndarray:
        """Projective distances from rows of `points` to the variety."""
        raise NotImplementedError

    def distance(self, x: SpherePoint) -> float:
        return float(self.distances(x.coords[None, :])[0])


class SubsphereVariety(Variety):
    """The great subsphere {x_{m+1} = ... = x_p = 0} of S^p; degree 1."""

    def __init__(self, p: int, m: int):
        if not 0 <= m <= p - 1:
            raise ValueError("need 0 <= m <= p - 1")
        self.p, self.m = p, m
        self.degree = 1
        self.distance_kind = "exact"

    def distances(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points[:, self.m + 1:], axis=1)


class DeterminantVariety(Variety):
    """Singular n x n matrices on S^{n^2-1}; distance is the smallest singular value."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.n = n
        self.p = n * n - 1
        self.degree = n
        self.distance_kind = "exact"

    def distances(self, points: np.ndarray) -> np.ndarray:
        mats = points.reshape(-1, self.n, self.n)
        return np.linalg.svd(mats, compute_uv=False)[:, -1]


class CurveVariety(Variety):
    """Zero set on S^2 of one homogeneous polynomial in three variables.

    Distance via a precomputed mesh of on-curve points plus two rounds of
    tangential sliding and Newton reprojection. The reported distance is
    an upper bound of the true distance.
    """

    def __init__(self, monomials, degree: int, mesh_size: int = 4096,
                 newton_steps: int = 2):
        self.p = 2
        self.degree = int(degree)
        self.distance_kind = "mesh-newton"
        self.mesh_size = mesh_size
        self.newton_steps = newton_steps
        self.monomials = []
        for alpha, c in monomials:
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != 3 or sum(alpha) != self.degree:
                raise ValueError(f"bad exponent triple {alpha}")
            self.monomials.append((alpha, float(c)))
        self._mesh = self._build_mesh()
        if self._mesh.size == 0:
            raise ValueError("curve has no real points on S^2 at mesh resolution")

    @classmethod
    def from_json(cls, doc: dict, **kw) -> "CurveVariety":
        if doc.get("p", 2) != 2:
            raise ValueError("curve varieties live on S^2")
        monos = [(m["alpha"], m["coeff"]) for m in doc["monomials"]]
        return cls(monos, degree=doc["degree"], **kw)

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        vals = np.zeros(pts.shape[0])
        for (a0, a1, a2), c in self.monomials:
            vals += c * pts[:, 0] ** a0 * pts[:, 1] ** a1 * pts[:, 2] ** a2
        return vals

    def _grad(self, pts: np.ndarray) -> np.ndarray:
        g = np.zeros_like(pts)
        for (a0, a1, a2), c in self.monomials:
            if a0:
                g[:, 0] += c * a0 * pts[:, 0] ** (a0 - 1) * pts[:, 1] ** a1 * pts[:, 2] ** a2
            if a1:
                g[:, 1] += c * a1 * pts[:, 0] ** a0 * pts[:, 1] ** (a1 - 1) * pts[:, 2] ** a2
            if a2:
                g[:, 2] += c * a2 * pts[:, 0] ** a0 * pts[:, 1] ** a1 * pts[:, 2] ** (a2 - 1)
        return g

    def _tangential_grad(self, pts: np.ndarray) -> np.ndarray:
        g = self._grad(pts)
        return g - pts * np.sum(g * pts, axis=1, keepdims=True)

    def _project(self, pts: np.ndarray, steps: int = 8) -> np.ndarray:
        """Newton steps moving points onto the curve along the surface gradient."""
        for _ in range(steps):
            f = self._eval(pts)
            g = self._tangential_grad(pts)
            gn = np.sum(g * g, axis=1)
            gn = np.where(gn < 1e-30, 1.0, gn)
            pts = pts - (f / gn)[:, None] * g
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        return pts

    def _build_mesh(self) -> np.ndarray:
        # scan meridians for sign changes of f, bisect, then Newton-polish
        n_phi = max(8, int(math.sqrt(self.mesh_size) * 4))
        n_theta = max(16, self.mesh_size // n_phi * 4)
        phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
        thetas = np.linspace(0.0, np.pi, n_theta)
        pts = []
        for phi in phis:
            ring = np.column_stack([
                np.sin(thetas) * np.cos(phi),
                np.sin(thetas) * np.sin(phi),
                np.cos(thetas),
            ])
            vals = self._eval(ring)
            sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
            for j in sign_change:
                lo, hi = thetas[j], thetas[j + 1]
                flo = vals[j]
                for _ in range(40):
                    mid = 0.5 * (lo + hi)
                    pm = np.array([[np.sin(mid) * np.cos(phi),
                                    np.sin(mid) * np.sin(phi), np.cos(mid)]])
                    fm = self._eval(pm)[0]
                    if flo * fm <= 0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                pts.append([np.sin(lo) * np.cos(phi), np.sin(lo) * np.sin(phi), np.cos(lo)])
            pts.extend(ring[np.abs(vals) < 1e-14].tolist())
        if not pts:
            return np.empty((0, 3))
        mesh = self._project(np.asarray(pts))
        keep = np.abs(self._eval(mesh)) < 1e-9
        return mesh[keep][: self.mesh_size]

    def distances(self, points: np.ndarray) -> np.ndarray:
        out = np.empty(points.shape[0])
        for start in range(0, points.shape[0], 4096):
            chunk = points[start:start + 4096]
            dots = np.abs(chunk @ self._mesh.T)
            best = self._mesh[np.argmax(dots, axis=1)].copy()
            # align hemispheres so the refinement target is the nearer antipode
            flip = np.sum(best * chunk, axis=1) < 0
            best[flip] *= -1.0
            for _ in range(self.newton_steps):
                # slide along the curve tangent toward the query point
                g = self._tangential_grad(best)
                gn = np.linalg.norm(g, axis=1, keepdims=True)
                gn = np.where(gn < 1e-30, 1.0, gn)
                t = np.cross(best, g / gn)
                step = np.sum((chunk - best) * t, axis=1)
                best = best + step[:, None] * t
                best /= np.linalg.norm(best, axis=1, keepdims=True)
                best = self._project(best, steps=3)
            cosang = np.clip(np.abs(np.sum(best * chunk, axis=1)), -1.0, 1.0)
            out[start:start + 4096] = np.sin(np.arccos(cosang))
        return out


class UnionVariety(Variety):
    """Union of varieties: distance is the member minimum."""

    def __init__(self, members):
        members = list(members)
        if not members:
            raise ValueError("empty union")
        self.members = members
        self.p = members[0].p
        if any(v.p != self.p for v in members):
            raise ValueError("members live on different spheres")
        # single-polynomial degree bound: product of one defining polynomial
        # per member, each bounded by the largest member degree
        self.degree = max(v.degree for v in members) * len(members)
        self.distance_kind = ("exact" if all(v.distance_kind == "exact" for v in members)
                              else "mesh-newton")

    def distances(self, points: np.ndarray) -> np.ndarray:
        return np.min(np.stack([v.distances(points) for v in self.members]), axis=0)


def distance_to_variety(x: SpherePoint, variety: Variety) -> float:
    if x.p != variety.p:
        raise ValueError("dimension mismatch")
    return variety.distance(x)


# ---------------------------------------------------------------------------
# Monte Carlo tube/cap ratio

_BLOCK = 8192  # fixed block size keeps results independent of worker count


def _tube_block(args):
    variety, cap, eps_grid, seed, index, count = args
    rng = RngStream(seed, index + 1)
    pts = sample_uniform_cap(cap, rng, size=count)
    d = variety.distances(pts)
    return np.array([(d < e).sum() for e in eps_grid], dtype=np.int64)


def tube_cap_counts(variety: Variety, cap: Cap, eps_grid, samples: int,
                    seed: int, workers: int = 1) -> np.ndarray:
    """Per-threshold membership counts, reproducible for any worker count."""
    blocks = []
    start = 0
    idx = 0
    while start < samples:
        count = min(_BLOCK, samples - start)
        blocks.append((variety, cap, tuple(eps_grid), seed, idx, count))
        start += count
        idx += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_tube_block, blocks))
    else:
        parts = [_tube_block(b) for b in blocks]
    return np.sum(parts, axis=0)


def estimate_tube_cap_ratio(variety: Variety, cap: Cap, eps: float,
                            samples: int, rng: RngStream,
                            workers: int = 1) -> McEstimate:
    """Fraction of uniform cap samples within projective distance eps of the variety."""
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    hits = int(tube_cap_counts(variety, cap, [eps], samples,
                               rng.master_seed, workers)[0])
    lo, hi = clopper_pearson(hits, samples)
    return McEstimate(estimate=hits / samples, ci_low=lo, ci_high=hi,
                      samples=samples, seed=rng.master_seed)


# ---------------------------------------------------------------------------
# geodesic spheres: curvature integrals, bands, and exact verifications


def geodesic_sphere_mu(p: int, alpha: float, i: int) -> float:
    """Integral of the i-th curvature of the radius-alpha geodesic sphere:

    C(p-1,i) O_{p-1} sin^{p-i-1}(alpha) cos^i(alpha).
    """
    if p < 2 or not 0.0 < alpha <= np.pi / 2 or not 0 <= i <= p - 1:
        raise ValueError("need p >= 2, alpha in (0, pi/2], 0 <= i <= p-1")
    return float(np.exp(_log_binom(p - 1, i)) * sphere_volume(p - 1)
                 * np.sin(alpha) ** (p - i - 1) * np.cos(alpha) ** i)


def geodesic_sphere_curvature(p: int, alpha: float, i: int) -> float:
    """Pointwise i-th curvature C(p-1,i) cot^i(alpha) of the geodesic sphere."""
    if p < 2 or not 0.0 < alpha <= np.pi / 2 or not 0 <= i <= p - 1:
        raise ValueError("need p >= 2, alpha in (0, pi/2], 0 <= i <= p-1")
    return float(np.exp(_log_binom(p - 1, i)) * (1.0 / np.tan(alpha)) ** i)


def _extended_ball_volume(p: int, theta: float) -> float:
    """Volume of B_R(q, theta) for theta in (0, pi], via complement symmetry."""
    if theta <= np.pi / 2:
        return sphere_volume(p - 1) * j_integral(p, p, theta)
    return sphere_volume(p) - sphere_volume(p - 1) * j_integral(p, p, np.pi - theta)


def band_volume(p: int, alpha: float, beta: float) -> float:
    """Exact volume of the radius-beta normal tube around the geodesic sphere:
    the band between angular radii alpha-beta and alpha+beta."""
    if p < 2 or not 0.0 < beta < alpha or alpha + beta > np.pi:
        raise ValueError("need p >= 2, 0 < beta < alpha, alpha + beta <= pi")
    return _extended_ball_volume(p, alpha + beta) - _extended_ball_volume(p, alpha - beta)


def verify_weyl_tube_bound(p: int, alpha: float, beta: float):
    """Exact band volume vs the curvature-sum tube bound; returns (lhs, rhs, pass)."""
    lhs = band_volume(p, alpha, beta)
    rhs = 2.0 * sum(
        j_integral(p, i + 1, beta) * geodesic_sphere_mu(p, alpha, i)
        for i in range(p)
    )
    return lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-12))


def kinematic_rhs_analytic(p: int, i: int, alpha: float) -> float:
    """Closed form of the slice-averaged curvature integral times the constant."""
    return (kinematic_constant(p, i)
            * sphere_volume(i) * sphere_volume(i + 1) * sphere_volume(p - i - 2)
            / sphere_volume(p)
            * np.cos(alpha) ** i * np.sin(alpha) ** (p - i - 1) / (p - i - 1))


def _kinematic_block(args):
    p, i, alpha, seed, index, count = args
    rng = RngStream(seed, index + 1)
    z = rng.generator.standard_normal((count, p + 1))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    # distance to S^{i+1} = {x_{i+2} = ... = x_p = 0}
    sin_rho = np.linalg.norm(z[:, i + 2:], axis=1)
    cos_rho = np.sqrt(np.clip(1.0 - sin_rho**2, 0.0, 1.0))
    inside = cos_rho > np.cos(alpha)
    cos_delta = np.zeros(count)
    cos_delta[inside] = np.cos(alpha) / cos_rho[inside]
    vals = np.where(inside, cos_delta**i, 0.0)
    return vals.sum()


def verify_kinematic(p: int, i: int, alpha: float, samples: int,
                     rng: RngStream, workers: int = 1):
    """Check the kinematic identity for geodesic spheres.

    Returns (lhs, analytic_rhs, mc_rhs) where lhs is the exact curvature
    integral, analytic_rhs its closed-form slice average (must agree to
    1e-10 relative), and mc_rhs a Monte Carlo estimate of the average.
    """
    if p < 2 or not 0 <= i < p - 1:
        raise ValueError("need p >= 2 and 0 <= i < p - 1")
    if not 0.0 < alpha <= np.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2]")
    lhs = geodesic_sphere_mu(p, alpha, i)
    analytic = kinematic_rhs_analytic(p, i, alpha)

    blocks = []
    start = 0
    idx = 0
    while start < samples:
        count = min(_BLOCK, samples - start)
        blocks.append((p, i, alpha, rng.master_seed, idx, count))
        start += count
        idx += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_kinematic_block, blocks))
    else:
        parts = [_kinematic_block(b) for b in blocks]
    total = float(np.sum(parts))
    scale = kinematic_constant(p, i) * sphere_volume(i)
    mean = total / samples
    # integrand scaled to [0, 1]; generalized Clopper-Pearson on the mean
    lo, hi = clopper_pearson(total, samples)
    est = McEstimate(estimate=scale * mean, ci_low=scale * lo, ci_high=scale * hi,
                     samples=samples, seed=rng.master_seed)
    return lhs, analytic, est


def subsphere_tube_cap_ratio_exact(p: int, eps: float) -> float:
    """Closed-form tube/cap ratio for the equator subsphere and the full cap."""
    return subsphere_tube_volume(p, 1, eps) / sphere_volume(p)


def load_curve(path: str, **kw) -> CurveVariety:
    with open(path) as fh:
        return CurveVariety.from_json(json.load(fh), **kw)
