"""Constraint sets and the oracles built on them.

Domains expose a linear minimization oracle (``lmo``), Euclidean projection,
membership, and the set constants used by rate bounds: ``lam`` (strong
convexity of the set, Euclidean sense) and ``diameter_sq``.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .core import as_point

__all__ = [
    "Domain",
    "Unconstrained",
    "Box",
    "L2Ball",
    "LpBall",
    "Simplex",
    "GaugeSet",
    "GaugeArgmin",
    "gauge_reg_argmin",
    "lmo",
    "project",
    "DistanceGenerator",
    "SquaredL2",
    "Entropy",
    "SquaredGauge",
    "bregman",
    "ProxTerm",
    "ZeroTerm",
    "L1Term",
    "SquaredL2Term",
    "prox",
]


class Domain:
    """Base class for constraint sets."""

    bounded = True
    lam = 0.0
    diameter_sq: Optional[float] = None
    dim: Optional[int] = None

    def lmo(self, direction, prev=None) -> np.ndarray:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = 1e-10) -> bool:
        raise NotImplementedError

    def radius(self) -> float:
        """Upper bound on ||x||_2 over the set."""
        raise NotImplementedError

    def _zero_direction(self, d, prev):
        if prev is not None:
            return as_point(prev)
        return self.default_point(d.shape[0])

    def default_point(self, dim: int) -> np.ndarray:
        return np.zeros(dim)


class Unconstrained(Domain):
    bounded = False

    def __init__(self, dim: Optional[int] = None):
        self.dim = dim

    def __repr__(self):
        return "Unconstrained()"

    def lmo(self, direction, prev=None):
        raise ValueError("LMO undefined on unbounded set")

    def project(self, x):
        return as_point(x)

    def contains(self, x, tol=1e-10):
        return bool(np.all(np.isfinite(x)))

    def radius(self):
        return math.inf


class Box(Domain):
    """Axis-aligned box [lo, hi]; scalar bounds need ``dim``."""

    def __init__(self, lo, hi, dim: Optional[int] = None):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if dim is not None:
            lo = np.broadcast_to(lo, (dim,)).copy()
            hi = np.broadcast_to(hi, (dim,)).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("empty box")
        self.lo, self.hi = lo, hi
        self.dim = lo.shape[0]
        self.diameter_sq = float(np.sum((hi - lo) ** 2))

    def __repr__(self):
        return f"Box(dim={self.dim})"

    def lmo(self, direction, prev=None):
        d = as_point(direction, self.dim)
        if not np.any(d):
            return self._zero_direction(d, prev)
        return kernels.box_lmo(d, self.lo, self.hi)

    def default_point(self, dim):
        return self.lo.copy()

    def project(self, x):
        return np.clip(as_point(x, self.dim), self.lo, self.hi)

    def contains(self, x, tol=1e-10):
        x = np.asarray(x)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def radius(self):
        return float(np.linalg.norm(np.maximum(np.abs(self.lo), np.abs(self.hi))))


class L2Ball(Domain):
    """Origin-centered Euclidean ball of radius r (lam = 1/r)."""

    def __init__(self, r: float = 1.0, dim: Optional[int] = None):
        if not r > 0:
            raise ValueError("radius must be positive")
        self.r = float(r)
        self.dim = dim
        self.lam = 1.0 / self.r
        self.diameter_sq = 4.0 * self.r**2

    def __repr__(self):
        return f"L2Ball(r={self.r!r})"

    def lmo(self, direction, prev=None):
        d = as_point(direction, self.dim)
        n = np.linalg.norm(d)
        if n == 0.0:
            return self._zero_direction(d, prev)
        return -self.r * d / n

    def project(self, x):
        x = as_point(x, self.dim)
        n = np.linalg.norm(x)
        if n <= self.r:
            return x
        return x * (self.r / n)

    def contains(self, x, tol=1e-10):
        return bool(np.linalg.norm(x) <= self.r * (1.0 + tol) + tol)

    def radius(self):
        return self.r

    def norm(self, x) -> float:
        return float(np.linalg.norm(x))


class LpBall(Domain):
    """Origin-centered l_p ball, 1 < p <= 2, with lam = (p - 1) / r."""

    def __init__(self, p: float, r: float = 1.0, dim: Optional[int] = None):
        if not 1.0 < p <= 2.0:
            raise ValueError("p must lie in (1, 2]")
        if not r > 0:
            raise ValueError("radius must be positive")
        self.p, self.r = float(p), float(r)
        self.dim = dim
        self.lam = (self.p - 1.0) / self.r
        # ||x||_2 <= ||x||_p for p <= 2, attained on the axes
        self.diameter_sq = 4.0 * self.r**2

    def __repr__(self):
        return f"LpBall(p={self.p!r}, r={self.r!r})"

    def norm(self, x) -> float:
        return float(np.sum(np.abs(x) ** self.p) ** (1.0 / self.p))

    def lmo(self, direction, prev=None):
        d = as_point(direction, self.dim)
        if not np.any(d):
            return self._zero_direction(d, prev)
        return kernels.lp_lmo(d, self.p, self.r)

    def project(self, x):
        return kernels.lp_ball_project(as_point(x, self.dim), self.p, self.r)

    def contains(self, x, tol=1e-10):
        return bool(self.norm(x) <= self.r * (1.0 + tol) + tol)

    def radius(self):
        return self.r


class Simplex(Domain):
    """Probability simplex in R^dim."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.diameter_sq = 2.0

    def __repr__(self):
        return f"Simplex(dim={self.dim})"

    def lmo(self, direction, prev=None):
        d = as_point(direction, self.dim)
        if not np.any(d) and prev is not None:
            return as_point(prev)
        out = np.zeros(self.dim)
        out[int(np.argmin(d))] = 1.0  # argmin returns the lowest index on ties
        return out

    def default_point(self, dim):
        out = np.zeros(dim)
        out[0] = 1.0
        return out

    def project(self, x):
        return kernels.simplex_project(as_point(x, self.dim))

    def contains(self, x, tol=1e-10):
        x = np.asarray(x)
        return bool(np.all(x >= -tol) and abs(float(np.sum(x)) - 1.0) <= tol * self.dim)

    def radius(self):
        return 1.0


def lmo(domain: Domain, direction, prev=None) -> np.ndarray:
    """argmin over the domain of <x, direction>."""
    return domain.lmo(direction, prev)


def project(domain: Domain, point) -> np.ndarray:
    """Euclidean projection of ``point`` onto the domain."""
    return domain.project(point)


# ---------------------------------------------------------------------------
# gauge sets


class GaugeSet:
    """Centrally symmetric, strongly convex ball used through its gauge."""

    def __init__(self, base: Domain):
        if not isinstance(base, (L2Ball, LpBall)):
            raise ValueError("gauge sets are implemented for origin-centered l2 / lp balls")
        self.base = base
        self.lam = base.lam

    def __repr__(self):
        return f"GaugeSet({self.base!r})"

    def gauge(self, x) -> float:
        return self.base.norm(x) / self.base.r

    def gauge_sq(self, x) -> float:
        return self.gauge(x) ** 2

    def boundary_lmo(self, direction) -> np.ndarray:
        """argmin over the boundary of <z, direction> (direction nonzero)."""
        return self.base.lmo(direction)


class GaugeArgmin(NamedTuple):
    point: np.ndarray
    rho: float
    boundary_point: np.ndarray
    degenerate: bool


def gauge_reg_argmin(gset: GaugeSet, zeta, scale: float = 1.0) -> GaugeArgmin:
    """Minimize <zeta, x> + scale * gauge(x)^2 over the set.

    Writing x = rho z with z on the boundary reduces this to a linear step for
    z and a clamped scalar quadratic for rho.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    zeta = as_point(zeta)
    if not np.any(zeta):
        zero = np.zeros_like(zeta)
        return GaugeArgmin(zero, 0.0, zero, True)
    z_star = gset.boundary_lmo(zeta)
    rho = min(1.0, max(0.0, -float(zeta @ z_star) / (2.0 * scale)))
    return GaugeArgmin(rho * z_star, rho, z_star, False)


# ---------------------------------------------------------------------------
# distance generating functions


class DistanceGenerator:
    """phi with value/grad; ``beta`` = strong convexity, ``smoothness`` = L_phi."""

    beta = 1.0
    smoothness: Optional[float] = None
    isotropic_curvature: Optional[float] = None

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def check(self, x, strict=False):
        pass

    def bregman(self, center, x) -> float:
        """V_center(x) = phi(x) - <grad phi(center), x - center> - phi(center)."""
        center, x = as_point(center), as_point(x)
        self.check(center, strict=True)
        self.check(x)
        return self.value(x) - float(self.grad(center) @ (x - center)) - self.value(center)

    def leader_terms(self):
        raise NotImplementedError

    def minimizer(self, domain: Domain) -> np.ndarray:
        raise NotImplementedError


class SquaredL2(DistanceGenerator):
    """phi(x) = 1/2 ||x - center||^2."""

    def __init__(self, center=None):
        self.center = None if center is None else as_point(center)
        self.beta = 1.0
        self.smoothness = 1.0
        self.isotropic_curvature = 1.0 if self.center is None or not np.any(self.center) else None

    def __repr__(self):
        return "SquaredL2()"

    def check(self, x, strict=False):
        pass

    def _c(self, x):
        return 0.0 if self.center is None else self.center

    def value(self, x):
        d = np.asarray(x, dtype=np.float64) - self._c(x)
        return 0.5 * float(d @ d)

    def grad(self, x):
        return np.asarray(x, dtype=np.float64) - self._c(x)

    def bregman(self, center, x):
        # exact closed form; agrees with the generic definition
        d = as_point(x) - as_point(center)
        return 0.5 * float(d @ d)

    def leader_terms(self):
        from .learners import LeaderModel

        if self.center is None:
            return LeaderModel(quad=1.0)
        return LeaderModel(lin=-self.center, quad=1.0)

    def minimizer(self, domain):
        c = np.zeros(domain.dim) if self.center is None else self.center
        return domain.project(c)


class Entropy(DistanceGenerator):
    """phi(x) = sum x_i log x_i on the simplex (1-strongly convex in l1)."""

    beta = 1.0
    smoothness = None

    def __repr__(self):
        return "Entropy()"

    def check(self, x, strict=False):
        x = np.asarray(x)
        if strict and np.any(x <= 0):
            raise ValueError("entropy generator needs a strictly positive center")
        if np.any(x < 0):
            raise ValueError("entropy generator needs nonnegative coordinates")

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        self.check(x)
        pos = x > 0
        return float(np.sum(x[pos] * np.log(x[pos])))

    def grad(self, x):
        x = np.asarray(x, dtype=np.float64)
        self.check(x, strict=True)
        return np.log(x) + 1.0

    def bregman(self, center, x):
        z, x = as_point(center), as_point(x)
        self.check(z, strict=True)
        self.check(x)
        pos = x > 0
        return float(np.sum(x[pos] * np.log(x[pos] / z[pos])) - np.sum(x) + np.sum(z))

    def leader_terms(self):
        from .learners import LeaderModel

        return LeaderModel(ent=1.0)

    def minimizer(self, domain):
        return np.full(domain.dim, 1.0 / domain.dim)


class SquaredGauge(DistanceGenerator):
    """phi(x) = scale * gauge(x)^2 for a gauge set."""

    def __init__(self, gset: GaugeSet, scale: float = 1.0):
        self.gset = gset
        self.scale = float(scale)
        base = gset.base
        r2 = base.r**2
        if isinstance(base, L2Ball) or base.p == 2.0:
            self.smoothness = 2.0 * self.scale / r2
            self.beta = 2.0 * self.scale / r2
            self.isotropic_curvature = 2.0 * self.scale / r2
        else:
            # ||x||_p^2 has unbounded curvature near the axes when p < 2
            self.smoothness = None
            self.beta = 2.0 * (base.p - 1.0) * self.scale / r2
            self.isotropic_curvature = None

    def __repr__(self):
        return f"SquaredGauge({self.gset!r}, scale={self.scale!r})"

    def value(self, x):
        return self.scale * self.gset.gauge_sq(x)

    def grad(self, x):
        x = np.asarray(x, dtype=np.float64)
        base = self.gset.base
        if isinstance(base, L2Ball):
            return 2.0 * self.scale * x / base.r**2
        p = base.p
        n = base.norm(x)
        if n == 0.0:
            return np.zeros_like(x)
        return 2.0 * self.scale / base.r**2 * n ** (2.0 - p) * np.sign(x) * np.abs(x) ** (p - 1.0)

    def leader_terms(self):
        from .learners import LeaderModel

        return LeaderModel(gauge=self.scale, gauge_set=self.gset)

    def minimizer(self, domain):
        return np.zeros(domain.dim)


def bregman(gen: DistanceGenerator, center, x) -> float:
    """Bregman divergence V_center(x) of ``gen``."""
    return gen.bregman(center, x)


# ---------------------------------------------------------------------------
# proximal terms


class ProxTerm:
    coef = 0.0

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def prox(self, lam: float, v) -> np.ndarray:
        raise NotImplementedError


class ZeroTerm(ProxTerm):
    def __repr__(self):
        return "ZeroTerm()"

    def value(self, x):
        return 0.0

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    def prox(self, lam, v):
        return as_point(v)


class L1Term(ProxTerm):
    """psi(x) = c ||x||_1."""

    def __init__(self, c: float):
        if c < 0:
            raise ValueError("l1 coefficient must be nonnegative")
        self.coef = float(c)

    def __repr__(self):
        return f"L1Term({self.coef!r})"

    def value(self, x):
        return self.coef * float(np.sum(np.abs(x)))

    def grad(self, x):
        return self.coef * np.sign(np.asarray(x, dtype=np.float64))

    def prox(self, lam, v):
        return kernels.soft_threshold(as_point(v), lam * self.coef)


class SquaredL2Term(ProxTerm):
    """psi(x) = (c / 2) ||x||^2."""

    def __init__(self, c: float):
        if c < 0:
            raise ValueError("coefficient must be nonnegative")
        self.coef = float(c)

    def __repr__(self):
        return f"SquaredL2Term({self.coef!r})"

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * self.coef * float(x @ x)

    def grad(self, x):
        return self.coef * np.asarray(x, dtype=np.float64)

    def prox(self, lam, v):
        return as_point(v) / (1.0 + lam * self.coef)


def prox(psi, lam: float, v) -> np.ndarray:
    """prox_{lam psi}(v) = argmin_x psi(x) + ||x - v||^2 / (2 lam)."""
    if not lam > 0:
        raise ValueError("prox parameter must be positive")
    if psi is None:
        return as_point(v)
    if not isinstance(psi, (ZeroTerm, L1Term, SquaredL2Term)):
        raise ValueError("prox unavailable")
    return psi.prox(lam, v)
