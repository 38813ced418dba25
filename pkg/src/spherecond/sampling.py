"""Reproducible random sampling on spheres.

Counter-based (Philox) streams keyed by (master_seed, stream_index), so
that parallel workers can partition a sample budget deterministically.
"""

from __future__ import annotations

import numpy as np

from .geometry import Cap, SpherePoint, j_integral


class RngStream:
    """A deterministic random stream identified by (master_seed, stream_index).

    The output sequence is a pure function of the two identifiers and the
    call sequence. Streams are not shareable between concurrent callers;
    derive one stream per worker instead.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        if master_seed < 0 or stream_index < 0:
            raise ValueError("master_seed and stream_index must be nonnegative")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        """Independent stream derived from the same master seed."""
        # flat derivation: child k of stream s gets index s * 2**20 + k + 1
        return RngStream(self.master_seed, self.stream_index * (1 << 20) + index + 1)


class Rotation:
    """An orthogonal matrix acting on R^{p+1}."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if np.max(np.abs(m.T @ m - np.eye(m.shape[0]))) > 1e-10:
            raise ValueError("matrix is not orthogonal within 1e-10")
        self.matrix = m

    def apply(self, x: SpherePoint) -> SpherePoint:
        return SpherePoint.from_vector(self.matrix @ x.coords)


def sample_uniform_sphere(p: int, rng: RngStream, size: int | None = None):
    """Uniform point(s) on S^p: normalized standard Gaussian vectors.

    Returns a SpherePoint, or an array of shape (size, p+1) if size is given.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    n = 1 if size is None else size
    g = rng.generator.standard_normal((n, p + 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    if size is None:
        return SpherePoint(g[0])
    return g


def _cap_radii(p: int, alpha: float, u: np.ndarray) -> np.ndarray:
    """Invert the radial CDF J_{p,p}(rho)/J_{p,p}(alpha) by bisection."""
    target = u * j_integral(p, p, alpha)
    lo = np.zeros_like(u)
    hi = np.full_like(u, alpha)
    # 60 halvings push the bracket far below the 1e-12 residual tolerance
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = j_integral(p, p, mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_uniform_cap(cap: Cap, rng: RngStream, size: int | None = None):
    """Uniform point(s) on the cap around cap.center of projective radius sigma.

    Radius from the density proportional to sin^{p-1} on [0, arcsin sigma]
    (inverse CDF), direction uniform on the tangent sphere, combined via
    the spherical exponential map.
    """
    p = cap.center.p
    n = 1 if size is None else size
    gen = rng.generator
    rho = _cap_radii(p, cap.alpha, gen.random(n))
    a = cap.center.coords
    # tangent directions: Gaussian vectors with the component along a removed
    u = np.empty((n, p + 1))
    todo = np.arange(n)
    while todo.size:
        g = gen.standard_normal((todo.size, p + 1))
        g -= np.outer(g @ a, a)
        norms = np.linalg.norm(g, axis=1)
        ok = norms >= 1e-12
        u[todo[ok]] = g[ok] / norms[ok, None]
        todo = todo[~ok]
    z = np.cos(rho)[:, None] * a + np.sin(rho)[:, None] * u
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if size is None:
        return SpherePoint(z[0])
    return z


def sample_rotation(n: int, rng: RngStream) -> Rotation:
    """Haar-distributed orthogonal n x n matrix (Gaussian QR with sign fix)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = rng.generator.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q *= np.sign(np.diag(r))
    return Rotation(q)
