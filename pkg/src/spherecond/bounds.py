"""Closed-form probabilistic bounds for conic condition numbers.

Tail and log-expectation bounds driven by the ambient dimension p, the
degree d of the polynomials cutting out the ill-posed set, the cap
radius sigma, and the threshold t (or tube radius eps). All sums are
evaluated in log space so that large p and d stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .geometry import _log_O


@dataclass(frozen=True)
class BoundParams:
    """The four scalars every bound consumes: (p, d, sigma, t or eps)."""

    p: int
    d: int
    sigma: float
    t: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not 0.0 < self.sigma <= 1.0:
            raise ValueError("sigma must lie in (0, 1]")
        if self.t is not None and self.t < 1.0:
            raise ValueError("t must be >= 1 (the bound is vacuous below)")
        if self.eps is not None and not 0.0 < self.eps <= 1.0:
            raise ValueError("eps must lie in (0, 1]")


def _log_binom(n: int, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _tail_core(p: int, d: int, ratio: float) -> float:
    """4 sum_k C(p,k)(2d)^k (1+r)^{p-k} r^k + (2p O_p/O_{p-1}) (2d)^p r^p."""
    log_r = math.log(ratio)
    log_2d = math.log(2.0 * d)
    terms = []
    if p >= 2:
        k = np.arange(1, p)
        logs = (
            math.log(4.0)
            + _log_binom(p, k)
            + k * log_2d
            + (p - k) * np.log1p(ratio)
            + k * log_r
        )
        terms.append(logsumexp(logs))
    last = (
        math.log(2.0 * p) + _log_O(p) - _log_O(p - 1) + p * (log_2d + log_r)
    )
    terms.append(last)
    return float(np.exp(logsumexp(terms)))


def tail_bound(params: BoundParams) -> float:
    """Upper bound on Prob{C(z) >= t} for z uniform on a cap of radius sigma."""
    if params.t is None:
        raise ValueError("tail_bound requires t")
    return _tail_core(params.p, params.d, 1.0 / (params.t * params.sigma))


def tube_ratio_bound(params: BoundParams) -> float:
    """Upper bound on vol(T(W,eps) cap B(a,sigma)) / vol B(a,sigma)."""
    if params.eps is None:
        raise ValueError("tube_ratio_bound requires eps")
    return _tail_core(params.p, params.d, params.eps / params.sigma)


def expectation_bound(params: BoundParams) -> float:
    """Upper bound on E ln C over the cap: 2 ln p + 2 ln d + 2 ln(1/sigma) + 5.5."""
    if params.p < 2:
        raise ValueError("the expectation bound needs p >= 2")
    return 2.0 * math.log(params.p) + 2.0 * math.log(params.d) + 2.0 * math.log(1.0 / params.sigma) + 5.5


def smooth_tube_bound(p: int, d: int, sigma: float, eps: float) -> float:
    """Absolute-volume bound on the normal tube around a smooth hypersurface patch.

    (4 O_{p-1}/p) sum_{k<p} C(p,k) d^k eps^k sigma^{p-k} + 2 O_p d^p eps^p.
    Stated for even degree d; odd d is accepted for exploratory use.
    """
    if p < 2 or d < 1 or not 0.0 < eps <= 1.0 or not 0.0 < sigma <= 1.0:
        raise ValueError("need p >= 2, d >= 1, eps and sigma in (0, 1]")
    log_d, log_e, log_s = math.log(d), math.log(eps), math.log(sigma)
    k = np.arange(1, p)
    logs = (
        math.log(4.0) + _log_O(p - 1) - math.log(p)
        + _log_binom(p, k) + k * (log_d + log_e) + (p - k) * log_s
    )
    last = math.log(2.0) + _log_O(p) + p * (log_d + log_e)
    return float(np.exp(logsumexp(np.append(logs, last))))


def curvature_integral_bound(p: int, d: int, sigma: float, i: int) -> float:
    """Degree bound on the i-th absolute curvature integral over a cap patch:

    2 C(p-1,i) O_{p-1} d^{i+1} sigma^{p-i-1}.
    """
    if not 0 <= i <= p - 1 or d < 1 or not 0.0 < sigma <= 1.0:
        raise ValueError("need 0 <= i <= p-1, d >= 1, sigma in (0, 1]")
    return float(np.exp(
        math.log(2.0) + _log_binom(p - 1, i) + _log_O(p - 1)
        + (i + 1) * math.log(d) + (p - i - 1) * math.log(sigma)
    ))


def linear_tail_bound(p: int, d: int, sigma: float, eps: float) -> float | None:
    """Linearized tail bound (8e+4) d p eps/sigma, valid only for small eps.

    Returns None when eps exceeds sigma / ((1+2d)(p-1)), where the
    linearization does not apply.
    """
    if p < 2 or d < 1 or not 0.0 < sigma <= 1.0 or not 0.0 < eps <= 1.0:
        raise ValueError("need p >= 2, d >= 1, sigma and eps in (0, 1]")
    if eps > sigma / ((1 + 2 * d) * (p - 1)):
        return None
    return (8.0 * math.e + 4.0) * d * p * eps / sigma


@dataclass(frozen=True)
class ProblemDescriptor:
    """A named problem whose ill-posed set has known dimension and degree.

    kinds: matrix-inversion(n), moore-penrose(l, m), eigen-real(n),
    eigen-complex(n), polysys(degrees).
    """

    kind: str
    n: int | None = None
    l: int | None = None
    m: int | None = None
    degrees: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in {"matrix-inversion", "moore-penrose", "eigen-real",
                             "eigen-complex", "polysys"}:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "moore-penrose":
            if self.l is None or self.m is None or not self.l >= self.m >= 1:
                raise ValueError("moore-penrose needs l >= m >= 1")
        elif self.kind == "polysys":
            if not self.degrees or any(d < 1 for d in self.degrees):
                raise ValueError("polysys needs positive degrees")
        elif self.n is None or self.n < 2:
            raise ValueError(f"{self.kind} needs n >= 2")

    def ambient_dim_and_degree(self) -> tuple[int, int]:
        """(p, d) of the sphere and defining-polynomial degree for tail bounds."""
        if self.kind == "matrix-inversion":
            return self.n**2 - 1, self.n
        if self.kind == "moore-penrose":
            return self.l * self.m - 1, self.m
        if self.kind == "eigen-real":
            return self.n**2 - 1, self.n**2 - self.n
        if self.kind == "eigen-complex":
            return 2 * self.n**2 - 1, self.n**2 - self.n
        nvars = len(self.degrees)
        dim = sum(math.comb(nvars + di, nvars) for di in self.degrees)
        bezout = math.prod(self.degrees)
        return dim - 1, 2 * nvars * bezout**2


def application_bound(problem: ProblemDescriptor, sigma: float,
                      value: float | None = None, mode: str = "expectation") -> float:
    """Bound for a named problem.

    mode="tail" uses the generic tail bound at t=value with the problem's
    (p, d); mode="expectation" uses the per-problem closed forms with
    their sharper additive constants.
    """
    if mode == "tail":
        if value is None:
            raise ValueError("tail mode requires the threshold t")
        p, d = problem.ambient_dim_and_degree()
        return tail_bound(BoundParams(p=p, d=d, sigma=sigma, t=value))
    if mode != "expectation":
        raise ValueError("mode must be 'tail' or 'expectation'")
    ls = 2.0 * math.log(1.0 / sigma)
    if problem.kind == "matrix-inversion":
        return 6.0 * math.log(problem.n) + ls + 5.5
    if problem.kind == "moore-penrose":
        return 2.0 * math.log(problem.l) + 4.0 * math.log(problem.m) + ls + 5.5
    if problem.kind == "eigen-real":
        return 8.0 * math.log(problem.n) + ls + 6.0
    if problem.kind == "eigen-complex":
        return 8.0 * math.log(problem.n) + ls + 6.0 + 2.0 * math.log(2.0)
    nvars = len(problem.degrees)
    p, _ = problem.ambient_dim_and_degree()
    bezout = math.prod(problem.degrees)
    return (2.0 * math.log(p) + 4.0 * math.log(bezout)
            + 2.0 * math.log(nvars) + ls + 7.0)
