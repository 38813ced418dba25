"""Exact spherical geometry on the unit sphere S^p.

Volumes of spheres, geodesic balls and tubes around great subspheres,
the trigonometric moment integrals that generate them, the constants of
the principal kinematic formula, and the two sphere distances (angular
and projective).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln


@dataclass(frozen=True)
class SpherePoint:
    """A unit vector in R^{p+1}, i.e. a point of S^p."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("need a vector of dimension >= 2 (p >= 1)")
        if abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise ValueError("coordinates must have unit norm (within 1e-12)")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        """Normalize an arbitrary nonzero vector onto the sphere."""
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0.0 or not np.isfinite(n):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / n)

    @property
    def p(self) -> int:
        return self.coords.size - 1


@dataclass(frozen=True)
class Cap:
    """Spherical cap of projective radius sigma (angular radius arcsin sigma)."""

    center: SpherePoint
    sigma: float

    def __post_init__(self):
        if not 0.0 < self.sigma <= 1.0:
            raise ValueError("sigma must lie in (0, 1]")

    @property
    def alpha(self) -> float:
        return float(np.arcsin(self.sigma))


def sphere_volume(p: int) -> float:
    """p-dimensional volume of S^p: 2 pi^{(p+1)/2} / Gamma((p+1)/2)."""
    if p < 0:
        raise ValueError("p must be >= 0")
    return float(2.0 * np.exp(0.5 * (p + 1) * np.log(np.pi) - gammaln(0.5 * (p + 1))))


def _check_jpk_args(p: int, k: int):
    if p < 1 or not 1 <= k <= p:
        raise ValueError("need p >= 1 and 1 <= k <= p")


def j_integral(p: int, k: int, alpha) -> float | np.ndarray:
    """J_{p,k}(alpha) = int_0^alpha sin^{k-1} cos^{p-k}, by closed-form recurrence.

    Accepts scalar or array alpha in [0, pi/2]; arrays are evaluated
    elementwise (used by the cap sampler's inverse CDF).
    """
    _check_jpk_args(p, k)
    a = np.asarray(alpha, dtype=float)
    if np.any(a < -1e-15) or np.any(a > np.pi / 2 + 1e-12):
        raise ValueError("alpha must lie in [0, pi/2]")
    out = _sin_cos_moment(k - 1, p - k, np.clip(a, 0.0, np.pi / 2))
    return float(out) if np.isscalar(alpha) else out


def _sin_cos_moment(m: int, n: int, a: np.ndarray) -> np.ndarray:
    """int_0^a sin^m cos^n via the integration-by-parts recurrence on m."""
    s, c = np.sin(a), np.cos(a)
    if m >= 2:
        return (-(s ** (m - 1)) * c ** (n + 1) + (m - 1) * _sin_cos_moment(m - 2, n, a)) / (m + n)
    if m == 1:
        return (1.0 - c ** (n + 1)) / (n + 1)
    # m == 0: recurse on the cosine power
    if n >= 2:
        return (s * c ** (n - 1) + (n - 1) * _sin_cos_moment(0, n - 2, a)) / n
    if n == 1:
        return s
    return a.copy()


def j_integral_quad(p: int, k: int, alpha: float) -> float:
    """J_{p,k}(alpha) by adaptive quadrature; cross-check for j_integral."""
    _check_jpk_args(p, k)
    if not 0.0 <= alpha <= np.pi / 2 + 1e-12:
        raise ValueError("alpha must lie in [0, pi/2]")
    val, _ = quad(
        lambda r: np.sin(r) ** (k - 1) * np.cos(r) ** (p - k),
        0.0, alpha, epsabs=1e-12, epsrel=1e-12, limit=200,
    )
    return val


def ball_volume(p: int, alpha: float) -> float:
    """Volume of the geodesic ball of angular radius alpha in S^p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not 0.0 < alpha <= np.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2]")
    return sphere_volume(p - 1) * j_integral(p, p, alpha)


def subsphere_tube_volume(p: int, k: int, eps: float) -> float:
    """Volume of the eps-neighborhood of the great subsphere S^{p-k} in S^p."""
    _check_jpk_args(p, k)
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    return sphere_volume(p - k) * sphere_volume(k - 1) * j_integral(p, k, float(np.arcsin(eps)))


def kinematic_constant(p: int, i: int) -> float:
    """Constant relating a curvature integral to its average over subsphere slices."""
    if p < 2 or not 0 <= i < p - 1:
        raise ValueError("need p >= 2 and 0 <= i < p - 1")
    num = np.log(p - i - 1) + _log_binom(p - 1, i) + _log_O(p - 1) + _log_O(p)
    den = _log_O(i) + _log_O(i + 1) + _log_O(p - i - 2)
    return float(np.exp(num - den))


def _log_O(p: int) -> float:
    return np.log(2.0) + 0.5 * (p + 1) * np.log(np.pi) - gammaln(0.5 * (p + 1))


def _log_binom(n: int, k: int) -> float:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def riemannian_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Angular distance in [0, pi]."""
    if x.p != y.p:
        raise ValueError("dimension mismatch")
    # clamp: dot products of unit vectors can exceed 1 by ~1e-16
    return float(np.arccos(np.clip(np.dot(x.coords, y.coords), -1.0, 1.0)))


def projective_distance(x: SpherePoint, y: SpherePoint) -> float:
    """sin of the angular distance; vanishes at both y and -y."""
    return float(np.sin(riemannian_distance(x, y)))


def distance_to_subsphere(x: SpherePoint, m: int) -> float:
    """Projective distance from x to the subsphere {x_{m+1} = ... = x_p = 0}."""
    if not 0 <= m <= x.p - 1:
        raise ValueError("need 0 <= m <= p - 1")
    return float(np.linalg.norm(x.coords[m + 1:]))
