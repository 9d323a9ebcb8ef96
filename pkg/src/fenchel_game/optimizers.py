"""First-order methods in their classical iterative form.

Each function runs its recursion directly, without the game driver, so the
equivalence with a game dynamic can be checked rather than assumed. Every
run records ``iterates``, the sequence that should coincide with the
x-player's running average in the matching game, plus method-specific
auxiliary sequences in ``aux``.

Step-size defaults follow the convergence proofs; every default can be
overridden by keyword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import TRACE_COLUMNS, as_point, format_float
from .geometry import Domain, Entropy, GaugeSet, Simplex, SquaredGauge, SquaredL2, Unconstrained, gauge_reg_argmin
from .problems import shifted_problem

__all__ = [
    "OptimizerRun",
    "frank_wolfe",
    "adaptive_frank_wolfe",
    "incremental_frank_wolfe",
    "gd_averaging",
    "single_call_extragradient",
    "cumulative_gd",
    "nesterov_unconstrained",
    "heavy_ball",
    "nesterov_1mem",
    "nesterov_infmem",
    "accelerated_proximal",
    "accelerated_linear",
    "boundary_fw",
    "gauge_fw_smooth",
    "gauge_fw_strongly_convex",
    "optimistic_md_averaging",
    "ALGORITHMS",
    "run_optimizer",
]


@dataclass
class OptimizerRun:
    """Iterates and metadata of one optimizer run."""

    algorithm: str
    params: dict
    w0: np.ndarray
    iterates: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    aux: dict = field(default_factory=dict)
    status: str = "running"

    @property
    def output(self) -> np.ndarray:
        if not self.iterates:
            raise ValueError("no iterates")
        return self.iterates[-1]

    @property
    def T(self) -> int:
        return len(self.iterates)

    def as_array(self) -> np.ndarray:
        return np.array(self.iterates)

    def rows(self, objective, f_star: Optional[float] = None):
        """CSV rows in the trace schema (regret columns are NaN)."""
        out = []
        prev = self.w0
        for t, (w, a) in enumerate(zip(self.iterates, self.weights), start=1):
            fv = objective(w)
            gap = fv - f_star if f_star is not None else math.nan
            out.append((t, a, fv, gap, math.nan, math.nan, float(np.linalg.norm(w - prev)), math.nan))
            prev = w
        return out

    def to_csv(self, objective, f_star: Optional[float] = None) -> str:
        lines = [",".join(TRACE_COLUMNS)]
        for row in self.rows(objective, f_star):
            lines.append(",".join([str(row[0])] + [format_float(v) for v in row[1:]]))
        return "\n".join(lines) + "\n"


def _run(name, w0, **params):
    return OptimizerRun(name, params, as_point(w0))


def _push(run, w, weight=1.0):
    w = np.asarray(w, dtype=np.float64)
    if not np.all(np.isfinite(w)):
        raise FloatingPointError(f"{run.algorithm}: non-finite iterate at t={len(run.iterates) + 1}")
    run.iterates.append(w.copy())
    run.weights.append(float(weight))


def _finish(run):
    if run.status == "running":
        run.status = "completed"
    return run


def _converged(p, w, f_star, stop_gap) -> bool:
    return f_star is not None and stop_gap is not None and p.value(w) - f_star < stop_gap


def _need_L(p, name):
    if p.L is None or not p.L > 0:
        raise ValueError(f"{name} needs a smoothness constant L > 0")
    return float(p.L)


# ---------------------------------------------------------------------------
# mirror steps written out per generator


def _mirror_step(gen, domain: Domain, center, v, scale: float):
    """argmin_x scale <v, x> + V_center(x) over ``domain``."""
    if isinstance(gen, SquaredL2):
        return domain.project(center - scale * v)
    if isinstance(gen, Entropy):
        if not isinstance(domain, Simplex):
            raise ValueError("entropy steps are defined on the simplex")
        z = np.log(center) - scale * v
        z -= z.max()
        e = np.exp(z)
        return e / e.sum()
    if isinstance(gen, SquaredGauge):
        if domain is not gen.gset.base:
            raise ValueError("gauge steps need the gauge set's own domain")
        return gauge_reg_argmin(gen.gset, scale * v - gen.grad(center), gen.scale).point
    raise ValueError(f"no closed-form mirror step for {gen!r}")


def _reg_argmin(gen, domain: Domain, G, center=None, weight: float = 1.0):
    """argmin_x <G, x> + weight * R(x), R = phi or the Bregman V_center."""
    if center is not None:
        return _mirror_step(gen, domain, center, G, 1.0 / weight)
    if isinstance(gen, SquaredL2):
        c = np.zeros_like(G) if gen.center is None else gen.center
        return domain.project(c - G / weight)
    if isinstance(gen, Entropy):
        return _mirror_step(gen, domain, np.full(G.shape[0], 1.0 / G.shape[0]), G, 1.0 / weight)
    if isinstance(gen, SquaredGauge):
        if domain is not gen.gset.base:
            raise ValueError("gauge steps need the gauge set's own domain")
        return gauge_reg_argmin(gen.gset, G, weight * gen.scale).point
    raise ValueError(f"no closed-form regularized argmin for {gen!r}")


# ---------------------------------------------------------------------------
# projection-free methods


def frank_wolfe(p, domain: Domain, w0, T: int, f_star=None, stop_gap=1e-14) -> OptimizerRun:
    """v_t = lmo(grad f(w_{t-1})), w_t = (1 - g_t) w_{t-1} + g_t v_t, g_t = 2/(t+1)."""
    run = _run("frank_wolfe", w0)
    w = run.w0.copy()
    v = None
    vs = []
    for t in range(1, T + 1):
        v = domain.lmo(p.grad(w), v)
        g = 2.0 / (t + 1)
        w = (1.0 - g) * w + g * v
        vs.append(v)
        _push(run, w, t)
        if _converged(p, w, f_star, stop_gap):
            run.status = "converged"
            break
    run.aux["v"] = vs
    return _finish(run)


def adaptive_frank_wolfe(p, domain: Domain, w0, T: int, exponent: float = 2.0, tol: float = 1e-12) -> OptimizerRun:
    """FW with weights 1 / ||x_t - w_{t-1}||^exponent and matching mixing."""
    run = _run("adaptive_frank_wolfe", w0, exponent=exponent, tol=tol)
    w = run.w0.copy()
    x = None
    A = 0.0
    for t in range(1, T + 1):
        x = domain.lmo(p.grad(w), x)
        d = float(np.linalg.norm(x - w))
        if d < tol:
            run.status = "converged"
            break
        a = 1.0 / d**exponent
        A += a
        w = w + (a / A) * (x - w)
        _push(run, w, a)
    return _finish(run)


def incremental_frank_wolfe(p, domain: Domain, w0, T: int) -> OptimizerRun:
    """FW on a finite sum refreshing one cached component gradient per round."""
    n = p.n_components
    if n <= 0:
        raise ValueError("incremental FW needs a finite-sum problem")
    run = _run("incremental_frank_wolfe", w0)
    w = run.w0.copy()
    cache = np.array([p.component_grad(i, w) for i in range(n)])
    v = None
    order = []
    for t in range(1, T + 1):
        i = (t - 1) % n
        cache[i] = p.component_grad(i, w)
        order.append(i)
        v = domain.lmo(cache.sum(axis=0), v)
        w = (1.0 - 1.0 / t) * w + v / t
        _push(run, w, 1.0)
    run.aux["order"] = order
    return _finish(run)


def boundary_fw(p, domain: Domain, z0, T: int) -> OptimizerRun:
    """z_{t+1} = lmo(sum of past subgradients); output the running mean.

    ``aux["L_T"]`` is min_t ||Theta_t|| with Theta_t the mean subgradient.
    """
    run = _run("boundary_fw", z0)
    z = run.w0.copy()
    S = np.zeros_like(z)
    w = None
    theta_norms = []
    zs = []
    for t in range(1, T + 1):
        zs.append(z)
        w = z.copy() if w is None else w + (z - w) / t
        _push(run, w, 1.0)
        delta = p.subgrad(z)
        S = S + delta
        theta_norms.append(float(np.linalg.norm(S / t)))
        z = domain.lmo(S, z)
    run.aux["z"] = zs
    run.aux["theta_norms"] = theta_norms
    run.aux["L_T"] = min(theta_norms)
    return _finish(run)


# ---------------------------------------------------------------------------
# gradient-descent family


def _default_eta(p, domain, T, mode, R):
    if mode == "smooth":
        return 1.0 / (2.0 * _need_L(p, "smooth mode"))
    if mode != "nonsmooth":
        raise ValueError("mode must be 'smooth' or 'nonsmooth'")
    if p.G is None:
        raise ValueError("nonsmooth mode needs a subgradient bound G")
    if R is None:
        if not domain.bounded:
            raise ValueError("nonsmooth mode needs R on unbounded domains")
        R = math.sqrt(domain.diameter_sq)
    return R / (p.G * math.sqrt(T))


def gd_averaging(p, domain: Domain, w0, T: int, mode: str = "smooth", eta=None, R=None) -> OptimizerRun:
    """w_t = Proj(w_{t-1} - eta grad f(w_{t-1})); iterates are running means."""
    eta = _default_eta(p, domain, T, mode, R) if eta is None else float(eta)
    run = _run("gd_averaging", w0, eta=eta, mode=mode)
    w = run.w0.copy()
    avg = None
    last = []
    for t in range(1, T + 1):
        w = domain.project(w - eta * p.subgrad(w))
        last.append(w)
        avg = w.copy() if avg is None else avg + (w - avg) / t
        _push(run, avg, 1.0)
    run.aux["last"] = last
    return _finish(run)


def cumulative_gd(p, domain: Domain, w0, T: int, eta=None, R=None, mode: str = "nonsmooth") -> OptimizerRun:
    """x_t = Proj(x_{t-1} - eta delta_{t-1}), w_t = (1 - 1/t) w_{t-1} + x_t / t.

    delta_0 is a subgradient at w_0 and delta_t one at w_t; the last
    iterate w_T is the output.
    """
    eta = _default_eta(p, domain, T, mode, R) if eta is None else float(eta)
    run = _run("cumulative_gd", w0, eta=eta)
    x = run.w0.copy()
    delta = p.subgrad(x)
    w = None
    xs = []
    for t in range(1, T + 1):
        x = domain.project(x - eta * delta)
        xs.append(x)
        w = x.copy() if w is None else (1.0 - 1.0 / t) * w + x / t
        _push(run, w, 1.0)
        delta = p.subgrad(w)
    run.aux["x"] = xs
    return _finish(run)


def single_call_extragradient(p, domain: Domain, gen, w0, T: int, gamma=None) -> OptimizerRun:
    """Extra-gradient with one gradient per round (plus one at w_0).

    w_t uses the gradient at w_{t-1} from the half step; the half step then
    uses the gradient at w_t. Default gamma = 1/(8L).
    """
    gamma = 1.0 / (8.0 * _need_L(p, "extragradient")) if gamma is None else float(gamma)
    run = _run("single_call_extragradient", w0, gamma=gamma)
    half = run.w0.copy()
    g = p.grad(half)
    avg = None
    last = []
    for t in range(1, T + 1):
        w = _mirror_step(gen, domain, half, g, gamma)
        g = p.grad(w)
        half = _mirror_step(gen, domain, half, g, gamma)
        last.append(w)
        avg = w.copy() if avg is None else avg + (w - avg) / t
        _push(run, avg, 1.0)
    run.aux["last"] = last
    return _finish(run)


def optimistic_md_averaging(p, domain: Domain, gen, w0, T: int, gamma=None) -> OptimizerRun:
    """Optimistic mirror descent with weights t; gradients at the running average.

    Default gamma = 1/(2L).
    """
    gamma = 1.0 / (2.0 * _need_L(p, "optimistic MD")) if gamma is None else float(gamma)
    run = _run("optimistic_md_averaging", w0, gamma=gamma)
    half = run.w0.copy()
    avg = run.w0.copy()
    hint = p.grad(avg)
    A = 0.0
    anchors = []
    for t in range(1, T + 1):
        x = _mirror_step(gen, domain, half, hint, t * gamma)
        A += t
        avg = avg + (t / A) * (x - avg)
        anchors.append(avg.copy())
        g = p.grad(avg)
        half = _mirror_step(gen, domain, half, g, t * gamma)
        hint = g
        _push(run, avg, t)
    run.aux["anchors"] = anchors
    return _finish(run)


# ---------------------------------------------------------------------------
# momentum methods


def heavy_ball(p, w0, T: int, domain: Optional[Domain] = None) -> OptimizerRun:
    """Heavy Ball with eta_t = t / (4(t+1)L), beta_t = (t-2)/(t+1).

    On a constrained domain the projected form is used:
    x_t = Proj(x_{t-1} - (t / 8L) grad f(w_{t-1})),
    w_t = (1 - 2/(t+1)) w_{t-1} + (2/(t+1)) x_t.
    """
    L = _need_L(p, "heavy ball")
    run = _run("heavy_ball", w0)
    w = run.w0.copy()
    if domain is None or isinstance(domain, Unconstrained):
        w_prev = w.copy()
        for t in range(1, T + 1):
            eta = t / (4.0 * (t + 1) * L)
            beta = (t - 2.0) / (t + 1.0)
            w_new = w - eta * p.grad(w) + beta * (w - w_prev)
            w_prev, w = w, w_new
            _push(run, w, t)
        return _finish(run)
    x = w.copy()
    for t in range(1, T + 1):
        x = domain.project(x - (t / (8.0 * L)) * p.grad(w))
        b = 2.0 / (t + 1)
        w = (1.0 - b) * w + b * x
        _push(run, w, t)
    return _finish(run)


def nesterov_unconstrained(p, w0, T: int, z0=None, momentum_shift: int = 0) -> OptimizerRun:
    """w_t = z_{t-1} - theta_t grad f(z_{t-1}), z_t = w_t + beta_t (w_t - w_{t-1}).

    theta_t = t / (2(t+1)L) and beta_t = (t-2+s)/(t+1+s) with s =
    ``momentum_shift`` (0 by default, so beta_1 = -1/2; 1 gives the momentum
    of the one-memory method).
    """
    L = _need_L(p, "nesterov")
    run = _run("nesterov_unconstrained", w0, momentum_shift=momentum_shift)
    w = run.w0.copy()
    z = w.copy() if z0 is None else as_point(z0)
    zs = []
    s = momentum_shift
    for t in range(1, T + 1):
        theta = t / (2.0 * (t + 1) * L)
        beta = (t - 2.0 + s) / (t + 1.0 + s)
        w_new = z - theta * p.grad(z)
        z = w_new + beta * (w_new - w)
        w = w_new
        zs.append(z)
        _push(run, w, t)
    run.aux["z"] = zs
    return _finish(run)


def nesterov_1mem(p, domain: Domain, gen, x0, T: int, gamma=None) -> OptimizerRun:
    """Nesterov's one-memory method with a Bregman step.

    beta_t = 2/(t+1), step t * gamma with gamma = 1/(4L) by default.
    """
    gamma = 1.0 / (4.0 * _need_L(p, "nesterov")) if gamma is None else float(gamma)
    run = _run("nesterov_1mem", x0, gamma=gamma)
    w = run.w0.copy()
    v = w.copy()
    zs, vs = [], []
    for t in range(1, T + 1):
        b = 2.0 / (t + 1)
        z = (1.0 - b) * w + b * v
        v = _mirror_step(gen, domain, v, p.grad(z), t * gamma)
        w = (1.0 - b) * w + b * v
        zs.append(z)
        vs.append(v)
        _push(run, w, t)
    run.aux["z"], run.aux["v"] = zs, vs
    return _finish(run)


def nesterov_infmem(p, domain: Domain, gen, x0, T: int, center="x0", gamma=None) -> OptimizerRun:
    """Nesterov's infinite-memory method: v_t = argmin <sum gamma_s grad f(z_s), x> + R(x).

    R is the Bregman divergence of ``gen`` from ``center`` (x0 by default)
    or ``gen`` itself when ``center`` is None. gamma_s = s * gamma.
    """
    gamma = 1.0 / (4.0 * _need_L(p, "nesterov")) if gamma is None else float(gamma)
    run = _run("nesterov_infmem", x0, gamma=gamma)
    w = run.w0.copy()
    c = w.copy() if isinstance(center, str) and center == "x0" else (None if center is None else as_point(center))
    v = w.copy()
    G = np.zeros_like(w)
    zs, vs = [], []
    for t in range(1, T + 1):
        b = 2.0 / (t + 1)
        z = (1.0 - b) * w + b * v
        G = G + t * gamma * p.grad(z)
        v = _reg_argmin(gen, domain, G, c)
        w = (1.0 - b) * w + b * v
        zs.append(z)
        vs.append(v)
        _push(run, w, t)
    run.aux["z"], run.aux["v"] = zs, vs
    return _finish(run)


def accelerated_proximal(p, x0, T: int, psi=None, gamma=None) -> OptimizerRun:
    """v_t = prox_{t gamma psi}(v_{t-1} - t gamma grad f(z_t)), gamma = 1/(4L).

    ``p`` is the smooth part (a ``Lasso`` supplies both parts).
    """
    gamma = 1.0 / (4.0 * _need_L(p, "accelerated proximal")) if gamma is None else float(gamma)
    if psi is None:
        psi = getattr(p, "psi", None)
    if psi is None:
        raise ValueError("accelerated proximal needs a prox term psi")
    run = _run("accelerated_proximal", x0, gamma=gamma)
    w = run.w0.copy()
    v = w.copy()
    for t in range(1, T + 1):
        b = 2.0 / (t + 1)
        z = (1.0 - b) * w + b * v
        v = psi.prox(t * gamma, v - t * gamma * p.grad(z))
        w = (1.0 - b) * w + b * v
        _push(run, w, t)
    return _finish(run)


def _linear_rate_weights(beta, first, T):
    alphas, A = [], 0.0
    for t in range(1, T + 1):
        a = first if t == 1 else beta / (1.0 - beta) * A
        A += a
        alphas.append((a, A))
    return alphas


def accelerated_linear(p, domain: Domain, gen, T: int, mu=None) -> OptimizerRun:
    """Accelerated method for mu-strongly convex f using the shifted f - mu phi.

    Weights: alpha_1 = 1/(2L(1+L_phi)), alpha_t / A_t = beta with
    beta = sqrt(mu / (L(1+L_phi))) / 2. Mixing uses b_t = alpha_t / A_t, so
    b_1 = 1 and z_1 = x_0 = argmin phi. ``aux["exponent"]`` is beta.
    """
    L = _need_L(p, "accelerated linear")
    L_phi = gen.smoothness
    if L_phi is None:
        raise ValueError("accelerated linear needs a smooth phi")
    mu = p.mu / L_phi if mu is None else float(mu)
    if not mu > 0:
        raise ValueError("accelerated linear needs mu > 0")
    pt = shifted_problem(p, gen, mu)
    beta = 0.5 * math.sqrt(mu / (L * (1.0 + L_phi)))
    first = 1.0 / (2.0 * L * (1.0 + L_phi))
    x0 = _reg_argmin(gen, domain, np.zeros(p.dim))
    run = _run("accelerated_linear", x0, mu=mu, beta=beta, first=first)
    w = x0.copy()
    v = x0.copy()
    G = np.zeros_like(w)
    for a, A in _linear_rate_weights(beta, first, T):
        b = a / A
        z = (1.0 - b) * w + b * v
        G = G + a * pt.grad(z)
        v = _reg_argmin(gen, domain, G, weight=1.0 + mu * A)
        w = (1.0 - b) * w + b * v
        _push(run, w, a)
    run.aux["exponent"] = beta
    return _finish(run)


# ---------------------------------------------------------------------------
# gauge methods


def gauge_fw_smooth(p, gset: GaugeSet, T: int, x0=None, eta=None) -> OptimizerRun:
    """Accelerated projection-free method on a gauge set, smooth f.

    zeta_t = eta * sum_s s grad f(z_s); v_t = rho z* with z* the boundary
    LMO point of zeta_t and rho = clamp(-<zeta_t, z*> / 2, 0, 1).
    """
    eta = 1.0 / (4.0 * _need_L(p, "gauge FW")) if eta is None else float(eta)
    dom = gset.base
    x0 = np.zeros(p.dim) if x0 is None else as_point(x0)
    run = _run("gauge_fw_smooth", x0, eta=eta)
    w = x0.copy()
    v = x0.copy()
    zeta = np.zeros_like(w)
    rhos = []
    for t in range(1, T + 1):
        b = 2.0 / (t + 1)
        z = (1.0 - b) * w + b * v
        zeta = zeta + eta * t * p.grad(z)
        if np.any(zeta):
            zs = dom.lmo(zeta)
            rho = min(1.0, max(0.0, -0.5 * float(zeta @ zs)))
            v = rho * zs
        else:
            rho, v = 0.0, np.zeros_like(w)
        rhos.append(rho)
        w = (1.0 - b) * w + b * v
        _push(run, w, t)
    run.aux["rho"] = rhos
    return _finish(run)


def gauge_fw_strongly_convex(p, gset: GaugeSet, T: int, mu=None, lam=None) -> OptimizerRun:
    """Linear-rate projection-free method on a gauge set.

    f_tilde = f - (mu/lam) gauge^2; rho = clamp(-<zeta_t, z*> / (2 c_t), 0, 1)
    with c_t = (1/mu + A_t)(mu/lam). Only ball gauges with a smooth squared
    gauge are supported.
    """
    L = _need_L(p, "gauge FW")
    lam = gset.lam if lam is None else float(lam)
    gen = SquaredGauge(gset, 1.0 / lam)
    if gen.smoothness is None:
        raise ValueError("squared gauge must be smooth (use an L2 ball)")
    L_phi_lam = gen.smoothness
    mu = p.mu / L_phi_lam if mu is None else float(mu)
    if not mu > 0:
        raise ValueError("needs mu > 0")
    pt = shifted_problem(p, gen, mu)
    beta = 0.5 * math.sqrt(mu / (L * (1.0 + L_phi_lam)))
    first = 1.0 / (2.0 * L * (1.0 + L_phi_lam))
    dom = gset.base
    x0 = np.zeros(p.dim)
    run = _run("gauge_fw_strongly_convex", x0, mu=mu, lam=lam, beta=beta, first=first)
    w = x0.copy()
    v = x0.copy()
    zeta = np.zeros_like(w)
    for a, A in _linear_rate_weights(beta, first, T):
        b = a / A
        z = (1.0 - b) * w + b * v
        zeta = zeta + a * pt.grad(z)
        c = (1.0 / mu + A) * (mu / lam)
        if np.any(zeta):
            zs = dom.lmo(zeta)
            v = min(1.0, max(0.0, -float(zeta @ zs) / (2.0 * c))) * zs
        else:
            v = np.zeros_like(w)
        w = (1.0 - b) * w + b * v
        _push(run, w, a)
    run.aux["exponent"] = beta
    return _finish(run)


ALGORITHMS = {
    "frank_wolfe": frank_wolfe,
    "adaptive_frank_wolfe": adaptive_frank_wolfe,
    "incremental_frank_wolfe": incremental_frank_wolfe,
    "gd_averaging": gd_averaging,
    "single_call_extragradient": single_call_extragradient,
    "cumulative_gd": cumulative_gd,
    "nesterov_unconstrained": nesterov_unconstrained,
    "heavy_ball": heavy_ball,
    "nesterov_1mem": nesterov_1mem,
    "nesterov_infmem": nesterov_infmem,
    "accelerated_proximal": accelerated_proximal,
    "accelerated_linear": accelerated_linear,
    "boundary_fw": boundary_fw,
    "gauge_fw_smooth": gauge_fw_smooth,
    "gauge_fw_strongly_convex": gauge_fw_strongly_convex,
    "optimistic_md_averaging": optimistic_md_averaging,
}


def run_optimizer(name: str, p, domain: Domain, w0, T: int, gen=None, **kw) -> OptimizerRun:
    """Call any method with one argument order.

    ``gen`` defaults to the squared Euclidean generator; gauge methods use
    ``GaugeSet(domain)``. Methods that fix their own start point ignore
    ``w0``. Extra keywords go to the method.
    """
    if name not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {name!r}")
    gen = SquaredL2() if gen is None else gen
    if name in ("frank_wolfe", "adaptive_frank_wolfe", "incremental_frank_wolfe", "gd_averaging", "cumulative_gd", "boundary_fw"):
        return ALGORITHMS[name](p, domain, w0, T, **kw)
    if name in ("single_call_extragradient", "nesterov_1mem", "nesterov_infmem", "optimistic_md_averaging"):
        return ALGORITHMS[name](p, domain, gen, w0, T, **kw)
    if name == "nesterov_unconstrained":
        return nesterov_unconstrained(p, w0, T, **kw)
    if name == "heavy_ball":
        return heavy_ball(p, w0, T, domain=domain, **kw)
    if name == "accelerated_proximal":
        return accelerated_proximal(p, w0, T, **kw)
    if name == "accelerated_linear":
        return accelerated_linear(p, domain, gen, T, **kw)
    gset = kw.pop("gset", None) or GaugeSet(domain)
    if name == "gauge_fw_smooth":
        return gauge_fw_smooth(p, gset, T, x0=kw.pop("x0", None), **kw)
    return gauge_fw_strongly_convex(p, gset, T, **kw)
