"""Benchmark objectives with closed-form conjugates and known minimizers.

Each problem declares the oracles it supports. Asking for an absent one
(conjugate, minimizer, component gradients) raises immediately.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy import optimize

from .core import as_point
from .geometry import Box, Domain, L1Term, L2Ball, Unconstrained

__all__ = [
    "OracleUnavailable",
    "ProblemOracle",
    "CountedProblem",
    "counted",
    "Quadratic",
    "LeastSquares",
    "LogSumExp",
    "AbsSum",
    "Linear",
    "Lasso",
    "FiniteSumQuadratic",
    "ShiftedProblem",
    "shifted_problem",
    "conjugate_value",
    "random_orthogonal",
]


class OracleUnavailable(NotImplementedError):
    """Raised when a problem lacks the requested oracle."""


class ProblemOracle:
    """Objective f with value/gradient oracles and certificates.

    ``L`` smoothness (None when nonsmooth), ``mu`` strong convexity,
    ``G`` subgradient-norm bound (None when not declared).
    """

    name = "problem"
    smooth = True
    L: Optional[float] = None
    mu: float = 0.0
    G: Optional[float] = None
    n_components = 0
    dim: int = 0

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def subgrad(self, x) -> np.ndarray:
        return self.grad(x)

    def conjugate(self, y) -> float:
        raise OracleUnavailable(f"{self.name}: conjugate unavailable")

    def has_conjugate(self) -> bool:
        return type(self).conjugate is not ProblemOracle.conjugate

    def minimum(self, domain: Optional[Domain] = None):
        """(x*, f*) over ``domain`` (None means unconstrained)."""
        raise OracleUnavailable(f"{self.name}: no known minimizer")

    @property
    def known_min(self):
        try:
            return self.minimum(None)
        except (OracleUnavailable, ValueError):
            return None

    def component_grad(self, i: int, x) -> np.ndarray:
        raise OracleUnavailable(f"{self.name}: not a finite sum")

    def near_kink(self, x, h: float) -> bool:
        """True when x lies within h of a nondifferentiable point."""
        return False


class CountedProblem(ProblemOracle):
    """Transparent wrapper counting oracle calls."""

    def __init__(self, inner: ProblemOracle):
        self.inner = inner
        self.grad_calls = 0
        self.component_calls = 0
        self.value_calls = 0

    def __getattr__(self, name):
        return getattr(self.inner, name)

    @property
    def smooth(self):
        return self.inner.smooth

    @property
    def L(self):
        return self.inner.L

    @property
    def mu(self):
        return self.inner.mu

    @property
    def G(self):
        return self.inner.G

    @property
    def n_components(self):
        return self.inner.n_components

    @property
    def dim(self):
        return self.inner.dim

    @property
    def name(self):
        return self.inner.name

    def value(self, x):
        self.value_calls += 1
        return self.inner.value(x)

    def grad(self, x):
        self.grad_calls += 1
        return self.inner.grad(x)

    def subgrad(self, x):
        self.grad_calls += 1
        return self.inner.subgrad(x)

    def conjugate(self, y):
        return self.inner.conjugate(y)

    def has_conjugate(self):
        return self.inner.has_conjugate()

    def minimum(self, domain=None):
        return self.inner.minimum(domain)

    def component_grad(self, i, x):
        self.component_calls += 1
        return self.inner.component_grad(i, x)

    def near_kink(self, x, h):
        return self.inner.near_kink(x, h)


def counted(p: ProblemOracle) -> CountedProblem:
    return p if isinstance(p, CountedProblem) else CountedProblem(p)


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


class Quadratic(ProblemOracle):
    """f(x) = 1/2 x^T A x - b^T x + c with A symmetric PSD."""

    name = "quadratic"

    def __init__(self, A, b, c: float = 0.0):
        A = np.array(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        A = 0.5 * (A + A.T)
        self.A = A
        self.b = as_point(b, A.shape[0])
        self.c = float(c)
        self.dim = A.shape[0]
        evals, evecs = np.linalg.eigh(A)
        if evals[0] < -1e-10 * max(1.0, abs(evals[-1])):
            raise ValueError("A must be positive semidefinite")
        self._evals = np.maximum(evals, 0.0)
        self._evecs = evecs
        self.L = float(self._evals[-1])
        self.mu = float(self._evals[0])
        self.diagonal = bool(np.all(A == np.diag(np.diag(A))))

    @classmethod
    def random(cls, d: int, kappa: float, seed: int = 0, mu: float = 1.0, x_star=None, scale: float = 1.0):
        """Random quadratic with spectrum in [mu, kappa mu].

        The unconstrained minimizer is ``x_star`` if given, otherwise a random
        vector of norm ``scale``.
        """
        rng = np.random.default_rng(seed)
        Q = random_orthogonal(d, rng)
        evals = mu * np.geomspace(1.0, kappa, d) if d > 1 else np.array([mu * kappa])
        A = (Q * evals) @ Q.T
        if x_star is None:
            x_star = rng.standard_normal(d)
            x_star *= scale / np.linalg.norm(x_star)
        x_star = as_point(x_star, d)
        return cls(A, A @ x_star)

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * float(x @ (self.A @ x)) - float(self.b @ x) + self.c

    def grad(self, x):
        return self.A @ np.asarray(x, dtype=np.float64) - self.b

    def _pinv_apply(self, v):
        coef = self._evecs.T @ v
        tol = 1e-12 * max(1.0, self.L)
        inv = np.where(self._evals > tol, 1.0 / np.where(self._evals > tol, self._evals, 1.0), 0.0)
        resid = np.where(self._evals > tol, 0.0, coef)
        return self._evecs @ (inv * coef), float(np.linalg.norm(resid))

    def conjugate(self, y):
        v = as_point(y, self.dim) + self.b
        u, resid = self._pinv_apply(v)
        if resid > 1e-9 * (1.0 + float(np.linalg.norm(v))):
            return math.inf
        return 0.5 * float(v @ u) - self.c

    def minimum(self, domain=None):
        if domain is None or isinstance(domain, Unconstrained):
            u, resid = self._pinv_apply(self.b)
            if resid > 1e-9 * (1.0 + float(np.linalg.norm(self.b))):
                raise ValueError("quadratic is unbounded below")
            return u, self.value(u)
        if isinstance(domain, L2Ball):
            x = self._trust_region(domain.r)
            return x, self.value(x)
        if isinstance(domain, Box) and self.diagonal:
            diag = np.diag(self.A)
            if np.any(diag <= 0):
                raise OracleUnavailable("box minimum needs a positive diagonal")
            x = np.clip(self.b / diag, domain.lo, domain.hi)
            return x, self.value(x)
        raise OracleUnavailable(f"no closed-form minimizer over {domain!r}")

    def _trust_region(self, r: float) -> np.ndarray:
        lam, Q = self._evals, self._evecs
        bt = Q.T @ self.b
        if lam[0] > 0:
            x0 = Q @ (bt / lam)
            if np.linalg.norm(x0) <= r:
                return x0

        def norm_at(nu):
            return float(np.linalg.norm(bt / (lam + nu)))

        # secular equation 1/||x(nu)|| - 1/r = 0 is nearly linear in nu
        lo = max(0.0, -lam[0]) + 1e-300
        hi = max(1.0, float(np.linalg.norm(bt)) / r)
        while norm_at(hi) > r:
            hi *= 2.0
        if norm_at(lo) <= r:
            raise OracleUnavailable("degenerate trust-region instance")
        nu = optimize.brentq(lambda s: 1.0 / norm_at(s) - 1.0 / r, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        x = Q @ (bt / (lam + nu))
        return x * (r / np.linalg.norm(x))


class LeastSquares(Quadratic):
    """f(x) = 1/2 ||M x - y||^2."""

    name = "least_squares"

    def __init__(self, M, y):
        M = np.array(M, dtype=np.float64)
        y = as_point(y, M.shape[0])
        self.M, self.y = M, y
        super().__init__(M.T @ M, M.T @ y, 0.5 * float(y @ y))

    def value(self, x):
        r = self.M @ np.asarray(x, dtype=np.float64) - self.y
        return 0.5 * float(r @ r)

    def grad(self, x):
        return self.M.T @ (self.M @ np.asarray(x, dtype=np.float64) - self.y)


class LogSumExp(ProblemOracle):
    """f(x) = tau log sum_i exp(<a_i, x> / tau) with d + 1 rows a_i.

    The rows are affinely independent and their hull contains 0 in its
    interior, so f is bounded below with a unique minimizer, and
    f*(y) = tau sum p_i log p_i where p solves [A^T; 1^T] p = [y; 1].
    """

    name = "logsumexp"

    def __init__(self, rows, tau: float = 1.0):
        rows = np.array(rows, dtype=np.float64)
        m, d = rows.shape
        if m != d + 1:
            raise ValueError("need exactly d + 1 rows")
        self.rows, self.tau, self.dim = rows, float(tau), d
        self._K = np.vstack([rows.T, np.ones(m)])
        if abs(np.linalg.det(self._K)) < 1e-12:
            raise ValueError("rows must be affinely independent")
        p0 = np.linalg.solve(self._K, np.r_[np.zeros(d), 1.0])
        if np.any(p0 <= 0):
            raise ValueError("origin must lie inside the hull of the rows")
        self._p0 = p0
        self.L = float(np.max(np.sum(rows**2, axis=1))) / self.tau
        self.mu = 0.0

    @classmethod
    def random(cls, d: int, seed: int = 0, tau: float = 1.0):
        rng = np.random.default_rng(seed)
        V = rng.standard_normal((d + 1, d))
        p = rng.uniform(0.5, 1.5, d + 1)
        p /= p.sum()
        return cls(V - p @ V, tau)

    def _softmax(self, x):
        z = self.rows @ np.asarray(x, dtype=np.float64) / self.tau
        z -= z.max()
        e = np.exp(z)
        return e / e.sum()

    def value(self, x):
        z = self.rows @ np.asarray(x, dtype=np.float64) / self.tau
        m = z.max()
        return self.tau * (m + math.log(float(np.sum(np.exp(z - m)))))

    def grad(self, x):
        return self.rows.T @ self._softmax(x)

    def conjugate(self, y):
        p = np.linalg.solve(self._K, np.r_[as_point(y, self.dim), 1.0])
        if np.any(p < -1e-12):
            return math.inf
        p = np.maximum(p, 0.0)
        pos = p > 0
        return self.tau * float(np.sum(p[pos] * np.log(p[pos])))

    def minimum(self, domain=None):
        if domain is not None and not isinstance(domain, Unconstrained):
            raise OracleUnavailable("logsumexp minimum is known only without constraints")
        # softmax(Ax / tau) = p0  <=>  A x / tau - c 1 = log p0
        m = self.dim + 1
        K = np.hstack([self.rows / self.tau, -np.ones((m, 1))])
        sol = np.linalg.solve(K, np.log(self._p0))
        x = sol[: self.dim]
        return x, self.value(x)


class AbsSum(ProblemOracle):
    """f(x) = ||x||_1 (nonsmooth, G = sqrt(d))."""

    name = "abs_sum"
    smooth = False

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.L = None
        self.mu = 0.0
        self.G = math.sqrt(self.dim)

    def value(self, x):
        return float(np.sum(np.abs(x)))

    def grad(self, x):
        return np.sign(np.asarray(x, dtype=np.float64))

    def conjugate(self, y):
        return 0.0 if float(np.max(np.abs(y))) <= 1.0 + 1e-12 else math.inf

    def minimum(self, domain=None):
        if domain is None or isinstance(domain, (Unconstrained, Box)):
            x = np.zeros(self.dim) if domain is None or isinstance(domain, Unconstrained) else domain.project(np.zeros(self.dim))
            return x, self.value(x)
        if domain.contains(np.zeros(self.dim)):
            return np.zeros(self.dim), 0.0
        raise OracleUnavailable(f"no closed-form minimizer over {domain!r}")

    def near_kink(self, x, h):
        return bool(np.any(np.abs(x) < h))


class Linear(ProblemOracle):
    """f(x) = <c, x>; only meaningful over bounded domains."""

    name = "linear"

    def __init__(self, c):
        self.cvec = as_point(c)
        self.dim = self.cvec.shape[0]
        self.L = 0.0
        self.mu = 0.0
        self.G = float(np.linalg.norm(self.cvec))

    def value(self, x):
        return float(self.cvec @ np.asarray(x, dtype=np.float64))

    def grad(self, x):
        return self.cvec.copy()

    def conjugate(self, y):
        return 0.0 if float(np.max(np.abs(np.asarray(y) - self.cvec))) <= 1e-12 * (1.0 + self.G) else math.inf

    def minimum(self, domain=None):
        if domain is None or not domain.bounded:
            raise ValueError("linear objective is unbounded below")
        x = domain.lmo(self.cvec)
        return x, self.value(x)


class Lasso(ProblemOracle):
    """F(x) = 1/2 ||M x - y||^2 + c ||x||_1 with a planted minimizer.

    ``smooth`` is the least-squares part and ``psi`` the l1 term; ``value`` and
    ``minimum`` refer to the full composite objective while ``grad`` is the
    gradient of the smooth part.
    """

    name = "lasso"

    def __init__(self, M, y, c: float, x_star=None):
        self.smooth_part = LeastSquares(M, y)
        self.psi = L1Term(c)
        self.dim = self.smooth_part.dim
        self.L = self.smooth_part.L
        self.mu = self.smooth_part.mu
        self._x_star = None if x_star is None else as_point(x_star, self.dim)

    @classmethod
    def planted(cls, m: int, d: int, c: float = 0.1, sparsity: int = 3, seed: int = 0, scale: float = 1.0):
        """Random instance whose minimizer is sparse and known exactly.

        y is chosen so that M^T (M x* - y) = -c s with s_i = sign(x*_i) on the
        support and |s_i| <= 1/2 elsewhere.
        """
        if m < d:
            raise ValueError("planted instances need m >= d")
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((m, d)) / math.sqrt(m)
        x_star = np.zeros(d)
        support = rng.choice(d, size=min(sparsity, d), replace=False)
        x_star[support] = scale * rng.choice([-1.0, 1.0], size=support.size) * rng.uniform(0.5, 1.5, support.size)
        s = rng.uniform(-0.5, 0.5, d)
        s[support] = np.sign(x_star[support])
        y = M @ x_star + c * M @ np.linalg.solve(M.T @ M, s)
        return cls(M, y, c, x_star)

    def value(self, x):
        return self.smooth_part.value(x) + self.psi.value(x)

    def grad(self, x):
        return self.smooth_part.grad(x)

    def conjugate(self, y):
        return self.smooth_part.conjugate(y)

    def minimum(self, domain=None):
        if domain is not None and not isinstance(domain, Unconstrained):
            raise OracleUnavailable("lasso minimum is known only without constraints")
        if self._x_star is None:
            raise OracleUnavailable("lasso instance has no planted minimizer")
        return self._x_star.copy(), self.value(self._x_star)


class FiniteSumQuadratic(Quadratic):
    """f(x) = (1/n) sum_i (1/2 x^T A_i x - b_i^T x).

    ``component_grad(i, x)`` returns (A_i x - b_i) / n so the components sum
    to the full gradient.
    """

    name = "finite_sum_quadratic"

    def __init__(self, As, bs):
        As = np.array(As, dtype=np.float64)
        bs = np.array(bs, dtype=np.float64)
        if As.ndim != 3 or bs.ndim != 2 or As.shape[0] != bs.shape[0]:
            raise ValueError("need n matrices and n vectors")
        if As.shape[0] == 0:
            raise ValueError("finite sum needs at least one component")
        self.As, self.bs = As, bs
        self.n_components = As.shape[0]
        super().__init__(As.mean(axis=0), bs.mean(axis=0))

    @classmethod
    def random(cls, n: int, d: int, seed: int = 0, x_star=None, scale: float = 1.0):
        rng = np.random.default_rng(seed)
        As, bs = [], []
        for _ in range(n):
            B = rng.standard_normal((d, d)) / math.sqrt(d)
            As.append(B @ B.T + 0.1 * np.eye(d))
            bs.append(rng.standard_normal(d))
        As = np.array(As)
        bs = np.array(bs)
        if x_star is None:
            x_star = rng.standard_normal(d)
            x_star *= scale / np.linalg.norm(x_star)
        # shift the b_i so the full minimizer is x_star, keeping their spread
        bs = bs + (As.mean(axis=0) @ as_point(x_star, d) - bs.mean(axis=0))
        return cls(As, bs)

    def component_grad(self, i, x):
        x = np.asarray(x, dtype=np.float64)
        return (self.As[i] @ x - self.bs[i]) / self.n_components


class ShiftedProblem(ProblemOracle):
    """f_tilde(x) = f(x) - mu phi(x) for a generic generator (no conjugate)."""

    def __init__(self, base: ProblemOracle, gen, mu: float):
        self.base, self.gen, self.shift_mu = base, gen, float(mu)
        self.dim = base.dim
        self.name = f"shifted_{base.name}"
        L_phi = gen.smoothness if gen.smoothness is not None else math.inf
        self.L = None if base.L is None else base.L + self.shift_mu * L_phi
        self.mu = max(0.0, base.mu - self.shift_mu * L_phi) if math.isfinite(L_phi) else 0.0

    def value(self, x):
        return self.base.value(x) - self.shift_mu * self.gen.value(x)

    def grad(self, x):
        return self.base.grad(x) - self.shift_mu * self.gen.grad(x)


def shifted_problem(p: ProblemOracle, gen, mu: float) -> ProblemOracle:
    """Oracle for f_tilde = f - mu phi, with grad f_tilde = grad f - mu grad phi.

    Requires mu <= p.mu / L_phi so that f_tilde stays convex. For quadratics
    and an isotropic quadratic phi the result is again a ``Quadratic`` (so the
    conjugate stays available).
    """
    if mu == 0:
        return p
    if mu < 0:
        raise ValueError("shift must be nonnegative")
    L_phi = gen.smoothness
    if L_phi is None:
        raise ValueError("shift needs a smooth distance generator")
    if mu * L_phi > p.mu * (1.0 + 1e-12) + 1e-15:
        raise ValueError("insufficient strong convexity")
    inner = p.inner if isinstance(p, CountedProblem) else p
    h = gen.isotropic_curvature
    if isinstance(inner, Quadratic) and h is not None and type(inner) in (Quadratic, LeastSquares, FiniteSumQuadratic):
        A = inner.A - mu * h * np.eye(inner.dim)
        out = Quadratic(A, inner.b, inner.c)
        out.name = f"shifted_{inner.name}"
        return out
    return ShiftedProblem(p, gen, mu)


def conjugate_value(p: ProblemOracle, y) -> float:
    """Closed-form f*(y); raises ``OracleUnavailable`` when not declared."""
    return p.conjugate(y)
