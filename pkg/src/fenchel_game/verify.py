"""Verification harness: iterate equivalence, regret certificates, rate fits
and oracle checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from .core import FenchelLoss, QuadraticLoss, Side, as_point
from .dynamics import Order
from .learners import (
    DualSpace,
    HintRule,
    LeaderError,
    LeaderModel,
    Regularizer,
    br_act,
    btl_act,
    btrl_act,
    ftl_act,
    ftrl_act,
    md_act,
    omd_act,
    oftl_act,
    oftrl_act,
    optmd_act,
    solve_leader,
)
from .problems import OracleUnavailable

__all__ = [
    "EquivalenceReport",
    "check_equivalence",
    "RegretReport",
    "certify_regret_bounds",
    "certify_trace",
    "learner_constants",
    "RateFit",
    "fit_rate",
    "FDResult",
    "finite_diff_check",
    "fenchel_young_check",
    "gradient_gap_check",
    "reports_json",
]


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class EquivalenceReport:
    max_deviation: float
    deviations: np.ndarray
    aux_deviation: dict
    tol: float
    passed: bool

    def as_dict(self):
        return {
            "max_deviation": self.max_deviation,
            "aux_deviation": self.aux_deviation,
            "tol": self.tol,
            "passed": self.passed,
            "T": int(self.deviations.shape[0]),
        }


def _seq(obj) -> np.ndarray:
    if hasattr(obj, "x_bar_seq"):
        return obj.x_bar_seq
    if hasattr(obj, "iterates"):
        return obj.as_array()
    return np.asarray(obj, dtype=np.float64)


def check_equivalence(run, trace, tol: float = 1e-10, aux: Optional[dict] = None) -> EquivalenceReport:
    """Max over t of ||w_t - x_bar_t|| between an optimizer run and a trace.

    ``aux`` maps a name to a pair of sequences compared the same way (for
    example the optimizer's gradient points against the y-player's anchors).
    """
    a, b = _seq(run), _seq(trace)
    if a.shape != b.shape:
        raise ValueError(f"mismatched shapes {a.shape} vs {b.shape}")
    dev = np.linalg.norm(a - b, axis=1) if a.size else np.zeros(0)
    aux_dev = {}
    for name, (s1, s2) in (aux or {}).items():
        s1, s2 = np.asarray(s1, dtype=np.float64), np.asarray(s2, dtype=np.float64)
        if s1.shape != s2.shape:
            raise ValueError(f"mismatched shapes in {name}")
        aux_dev[name] = float(np.max(np.linalg.norm(s1 - s2, axis=1))) if s1.size else 0.0
    worst = float(np.max(dev)) if dev.size else 0.0
    passed = worst <= tol and all(v <= tol for v in aux_dev.values())
    return EquivalenceReport(worst, dev, aux_dev, tol, bool(passed))


# ---------------------------------------------------------------------------
# regret certificates


@dataclass
class RegretReport:
    learner: str
    player: str
    regret: float
    bound: float
    consistent: bool
    replay_deviation: float
    within_bound: bool
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "learner": self.learner,
            "player": self.player,
            "regret": self.regret,
            "bound": self.bound,
            "consistent": self.consistent,
            "replay_deviation": self.replay_deviation,
            "within_bound": self.within_bound,
            "passed": self.passed,
        }


def _player(trace, learner_id, player):
    if player is not None:
        return player
    spec = trace.spec
    if spec.x_learner.name == learner_id:
        return "x"
    if spec.y_learner.name == learner_id:
        return "y"
    raise ValueError(f"no player uses {learner_id}; pass player='x' or 'y'")


def _initial_loss(trace, player, gp):
    spec = trace.spec
    if spec.x0 is None:
        return None
    first = "y" if spec.order is Order.Y_FIRST else "x"
    if player != first:
        return None
    if player == "y":
        return FenchelLoss(Side.Y, 1.0, spec.x0, gp)
    pay = spec.payoff
    return FenchelLoss(Side.X, 1.0, gp.grad(spec.x0), gp, pay.composite, pay.shift)


def _replay(learner_id, history, zs, space, c, l0):
    """Recompute every z_t from the losses alone; returns (points, hints)."""
    out, hints = [], []
    z_prev = None if c.get("z0") is None else as_point(c["z0"])
    half = z_prev
    grad_prev = None
    if learner_id == "OPTMD" and l0 is not None:
        grad_prev = as_point(l0.grad(z_prev))
    for t, (alpha, loss) in enumerate(history, start=1):
        past = history[: t - 1]
        if learner_id == "BR":
            z = br_act(loss, space, prev=zs[t - 2] if t > 1 else None)
        elif learner_id == "FTL":
            init = c.get("init")
            if init is None and not past:
                init = br_act(l0, space) if l0 is not None else None
            if not past and init is None and not isinstance(space, DualSpace):
                z = solve_leader(LeaderModel.zero(), space)
            else:
                z = ftl_act(past, space, init)
        elif learner_id == "BTL":
            z = btl_act(past, (alpha, loss), space)
        elif learner_id == "FTRL":
            z = ftrl_act(past, c["reg"], c["eta"], space)
        elif learner_id == "BTRL":
            z = btrl_act(past, (alpha, loss), c["reg"], c["eta"], space)
        elif learner_id in ("OFTL", "OFTRL"):
            rule = c.get("hint", HintRule.PREVIOUS_LOSS)
            if rule is HintRule.ZERO:
                m = None
            else:
                m = past[-1][1] if past else l0
            hints.append(m)
            if learner_id == "OFTL":
                if m is None and not past:
                    z = br_act(l0, space) if l0 is not None else as_point(c["init"])
                else:
                    z = oftl_act(past, m, alpha, space)
            else:
                z = oftrl_act(past, m, alpha, c["reg"], c["eta"], space)
        elif learner_id == "OMD":
            if not past:
                if c.get("seeded", False) and l0 is not None:
                    z = omd_act(z_prev, l0, alpha, c["gen"], c["gamma"], space)
                else:
                    z = omd_act(z_prev, None, None, c["gen"], c["gamma"], space)
            else:
                a_prev, l_prev = past[-1]
                z = omd_act(z_prev, l_prev, a_prev, c["gen"], c["gamma"], space)
        elif learner_id == "MD":
            z = md_act(z_prev, loss, alpha, c["gen"], c["gamma"], space)
        elif learner_id == "OPTMD":
            m = np.zeros_like(half) if grad_prev is None or c.get("hint") is HintRule.ZERO else grad_prev
            hints.append(m)
            z, half = optmd_act(half, m, loss.grad, alpha, c["gen"], c["gamma"], space)
            grad_prev = as_point(loss.grad(z))
        else:
            raise ValueError(f"unknown learner {learner_id!r}")
        out.append(as_point(z))
        z_prev = out[-1]
    return out, hints


def certify_regret_bounds(trace, learner_id: str, constants: Optional[dict] = None, player: Optional[str] = None) -> RegretReport:
    """Check the realized weighted regret of one player against its bound.

    The player's actions are first replayed from the recorded losses; a
    trace whose actions do not match the learner (within ``replay_tol``,
    default 1e-9) is not certified. The bound is then evaluated from the
    trace's own quantities and must dominate the regret up to 1e-9.

    ``constants``: ``L`` (y-side strong convexity 1/L of f*), ``mu`` (x-side
    loss strong convexity), ``gen``/``gamma``/``z0`` (mirror learners),
    ``reg``/``eta`` (regularized leaders), ``hint`` (optimistic), ``seeded``.
    """
    c = dict(constants or {})
    spec = trace.spec
    player = _player(trace, learner_id, player)
    gp = spec.payoff.game_problem(spec.problem)
    space = DualSpace(gp) if player == "y" else spec.domain
    rounds = trace.rounds
    if player == "y":
        history = [(r.alpha, r.y_loss) for r in rounds]
        zs = [np.asarray(r.y) for r in rounds]
    else:
        history = [(r.alpha, r.x_loss) for r in rounds]
        zs = [np.asarray(r.x) for r in rounds]
    l0 = _initial_loss(trace, player, gp)
    if learner_id in ("OMD", "MD", "OPTMD") and c.get("z0") is None:
        c["z0"] = spec.x0
    alphas = np.array([a for a, _ in history])
    A = np.cumsum(alphas)
    T = len(history)

    feasible = True
    if player == "x":
        feasible = all(spec.domain.contains(z, tol=1e-9 * max(1.0, float(np.max(np.abs(z))))) for z in zs)
    replay, hints = _replay(learner_id, history, zs, space, c, l0)
    dev = max(float(np.max(np.abs(a - b))) for a, b in zip(replay, zs))
    consistent = feasible and dev <= c.get("replay_tol", 1e-9) * max(1.0, max(float(np.max(np.abs(z))) for z in zs))

    # comparator and per-round values
    if player == "y":
        x_bar = trace.x_bar
        z_star = gp.grad(x_bar)

        def val(loss, z):
            return gp.conjugate(z) - float(loss.anchor @ z)

        regret = sum(a * val(l, z) for (a, l), z in zip(history, zs)) + float(A[-1]) * gp.value(x_bar)
    else:
        model = LeaderModel.zero()
        for a, l in history:
            model = model + l.leader_terms().scaled(a)
        try:
            z_star = solve_leader(model, spec.domain)
        except LeaderError:
            z_star = as_point(spec.problem.minimum(spec.domain)[0])

        def val(loss, z):
            return loss.leader_terms().value(z)

        regret = sum(a * (val(l, z) - val(l, z_star)) for (a, l), z in zip(history, zs))

    def grad(loss, z, s):
        if player == "x":
            return as_point(loss.grad(z))
        # y side: grad f*(y_s) - x_s, where y_s = grad f(anchor_s) for leaders
        return c["dual_grad"](s) - loss.anchor if "dual_grad" in c else None

    details = {"T": T, "z_star": z_star}
    if learner_id == "BR":
        bound = 0.0
    elif learner_id == "FTL":
        mu = c.get("mu", 1.0 / c["L"] if player == "y" else 0.0)
        if player == "y":
            anchors = [np.asarray(spec.x0 if s == 0 else trace.rounds[s - 1].x_bar) for s in range(T)]
            deltas = [anchors[s] - history[s][1].anchor for s in range(T)]
        else:
            deltas = [grad(l, z, s) for s, ((a, l), z) in enumerate(zip(history, zs))]
        if mu > 0:
            bound = sum(2 * alphas[s] ** 2 * float(deltas[s] @ deltas[s]) / (A[s] * mu) for s in range(T))
        else:
            lam = getattr(spec.domain, "lam", 0.0)
            thetas = [alphas[s] * np.asarray(history[s][1].anchor) for s in range(T)]
            G = max(float(np.linalg.norm(th)) for th in thetas)
            nu = min(float(np.linalg.norm(v)) for v in np.cumsum(thetas, axis=0))
            bound = math.inf if lam <= 0 or nu == 0 else 2 * G**2 / (lam * nu) * (1 + math.log(T))
            details["nu_T"] = nu
    elif learner_id == "BTL":
        mu = c.get("mu", 1.0 / c["L"] if player == "y" else 0.0)
        bound = -sum(mu * A[s - 1] / 2 * float(np.sum((zs[s - 1] - zs[s]) ** 2)) for s in range(1, T))
    elif learner_id in ("FTRL", "BTRL"):
        reg, eta = c["reg"], c["eta"]
        mu = c.get("mu", 0.0)
        beta = reg.beta
        if learner_id == "FTRL":
            deltas = [grad(l, z, s) for s, ((a, l), z) in enumerate(zip(history, zs))]
            bound = sum(2 * alphas[s] ** 2 * float(deltas[s] @ deltas[s]) / (A[s] * mu + beta / eta) for s in range(T))
            bound += (reg.value(z_star) - reg.value(zs[0])) / eta
        else:
            z0 = solve_leader(reg.terms(), space)
            pts = [z0] + zs
            bound = (reg.value(z_star) - reg.value(z0)) / eta
            Aprev = np.r_[0.0, A[:-1]]
            bound -= sum((mu * Aprev[s] / 2 + beta / (2 * eta)) * float(np.sum((pts[s] - pts[s + 1]) ** 2)) for s in range(T))
    elif learner_id == "OFTL":
        # w_{t+1}: leader of l_1..l_t
        bound = 0.0
        for s in range(T):
            a, l = history[s]
            w_next = btl_act(history[:s], history[s], space)
            m = hints[s]
            bound += a * (val(l, zs[s]) - val(l, w_next))
            if m is not None:
                bound -= a * (val(m, zs[s]) - val(m, w_next))
    elif learner_id == "OFTRL":
        reg, eta = c["reg"], c["eta"]
        beta = reg.beta
        mu = c.get("mu", 0.0)
        mu_hat = c.get("mu_hint", mu)
        ws = [ftrl_act(history[:s], reg, eta, space) for s in range(T + 1)]
        bound = (reg.value(z_star) - reg.value(ws[0])) / eta
        for s in range(T):
            a, l = history[s]
            m = hints[s]
            bound += a * (val(l, zs[s]) - val(l, ws[s + 1]))
            if m is not None:
                bound -= a * (val(m, zs[s]) - val(m, ws[s + 1]))
            base = beta / eta + mu * (A[s - 1] if s > 0 else 0.0)
            bound -= 0.5 * base * float(np.sum((zs[s] - ws[s]) ** 2))
            bound -= 0.5 * (base + a * (mu_hat if m is not None else 0.0)) * float(np.sum((zs[s] - ws[s + 1]) ** 2))
    elif learner_id in ("OMD", "MD", "OPTMD"):
        gen, gamma = c["gen"], c["gamma"]
        beta = gen.beta
        z0 = as_point(c["z0"])
        if learner_id == "OMD":
            deltas = [grad(l, z, s) for s, ((a, l), z) in enumerate(zip(history, zs))]
            bound = gen.bregman(zs[0], z_star) / gamma
            bound += gamma / (2 * beta) * sum(float(np.sum((alphas[s] * deltas[s]) ** 2)) for s in range(T))
        elif learner_id == "MD":
            pts = [z0] + zs
            bound = gen.bregman(z0, z_star) / gamma
            bound -= beta / (2 * gamma) * sum(float(np.sum((pts[s] - pts[s + 1]) ** 2)) for s in range(T))
        else:
            deltas = [grad(l, z, s) for s, ((a, l), z) in enumerate(zip(history, zs))]
            bound = gen.bregman(z0, z_star) / gamma
            bound += gamma / (2 * beta) * sum(alphas[s] ** 2 * float(np.sum((deltas[s] - hints[s]) ** 2)) for s in range(T))
    else:
        raise ValueError(f"unknown learner {learner_id!r}")

    regret, bound = float(regret), float(bound)
    within = regret <= bound + c.get("abs_tol", 1e-9)
    return RegretReport(learner_id, player, regret, bound, bool(consistent), dev, bool(within), bool(consistent and within), details)


def learner_constants(learner, problem=None) -> dict:
    """Constants for ``certify_regret_bounds`` read off a learner instance."""
    c = {}
    for attr in ("gen", "gamma", "reg", "eta", "seeded", "init"):
        if getattr(learner, attr, None) is not None:
            c[attr] = getattr(learner, attr)
    if hasattr(learner, "z0"):
        c["z0"] = learner.z0
    if hasattr(learner, "hint_rule"):
        c["hint"] = learner.hint_rule
    if problem is not None and getattr(problem, "L", None):
        c["L"] = problem.L
    return c


def certify_trace(trace, **constants) -> dict:
    """Certify both players of a trace; returns {"x": report, "y": report}.

    Learner constants are read from the learners of the trace's GameSpec; keyword arguments
    override them for both players.
    """
    spec = trace.spec
    gp = spec.payoff.game_problem(spec.problem)
    out = {}
    for player, learner in (("x", spec.x_learner), ("y", spec.y_learner)):
        c = learner_constants(learner, gp)
        c.update(constants)
        out[player] = certify_regret_bounds(trace, learner.name, c, player)
    return out


# ---------------------------------------------------------------------------
# rates


class RateFit(NamedTuple):
    slope: float
    r2: float
    n: int
    intercept: float


def fit_rate(samples: Sequence, model: str = "power") -> RateFit:
    """Least-squares fit of log(gap) against log(T) (``power``) or T (``exponential``).

    Needs at least 8 usable samples spanning a 16x range of T. The first 10%
    of the samples (by T) are dropped as burn-in. Power fits require every
    gap above 1e-13; exponential fits keep only gaps above 100 machine eps.
    """
    pts = sorted((float(T), float(g)) for T, g in samples)
    if model == "exponential":
        pts = [(T, g) for T, g in pts if g > 100 * np.finfo(float).eps]
    elif model == "power":
        if any(not g > 1e-13 for _, g in pts):
            raise ValueError("power fits need every gap above 1e-13")
    else:
        raise ValueError("model must be 'power' or 'exponential'")
    if len(pts) < 8:
        raise ValueError("need at least 8 gap samples")
    Ts = np.array([p[0] for p in pts])
    if Ts[0] <= 0 or Ts[-1] / Ts[0] < 16:
        raise ValueError("samples must span a 16x range of T")
    drop = int(math.floor(0.1 * len(pts)))
    Ts = Ts[drop:]
    gaps = np.array([p[1] for p in pts])[drop:]
    xs = np.log(Ts) if model == "power" else Ts
    res = stats.linregress(xs, np.log(gaps))
    return RateFit(float(res.slope), float(res.rvalue**2), int(len(Ts)), float(res.intercept))


# ---------------------------------------------------------------------------
# oracle checks


class FDResult(NamedTuple):
    error: float
    kink: bool


def finite_diff_check(p, point, h: float = 1e-5) -> FDResult:
    """Max relative error between ``p.grad`` and central differences.

    Points within ``h`` of a kink are flagged and skipped (error NaN).
    """
    x = as_point(point)
    if p.near_kink(x, h):
        return FDResult(math.nan, True)
    g = as_point(p.grad(x))
    fd = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        fd[i] = (p.value(x + e) - p.value(x - e)) / (2 * h)
    scale = max(1.0, float(np.max(np.abs(g))) if g.size else 1.0)
    err = float(np.max(np.abs(g - fd))) / scale if g.size else 0.0
    return FDResult(err, False)


def fenchel_young_check(p, x, ys: Sequence = ()) -> tuple:
    """(equality residual at y = grad f(x), worst inequality violation over ``ys``).

    f(x) + f*(grad f(x)) = <x, grad f(x)>, and f(x) + f*(y) >= <x, y> for all y.
    """
    x = as_point(x)
    g = p.grad(x)
    fx = p.value(x)
    eq = abs(fx + p.conjugate(g) - float(x @ g)) / max(1.0, abs(fx), abs(float(x @ g)))
    worst = 0.0
    for y in ys:
        y = as_point(y)
        worst = max(worst, float(x @ y) - fx - p.conjugate(y))
    return eq, worst


def gradient_gap_check(p, x) -> float:
    """||grad f(x)||^2 - 2L (f(x) - f*) (nonpositive for L-smooth f)."""
    _, f_star = p.minimum(None)
    g = p.grad(x)
    return float(g @ g) - 2.0 * p.L * (p.value(x) - f_star)


def reports_json(reports: dict) -> str:
    """Serialize {(algorithm, problem, T, seed): report} to JSON."""
    from .core import _jsonable

    out = {}
    for key, rep in reports.items():
        k = "|".join(str(v) for v in key) if isinstance(key, tuple) else str(key)
        out[k] = rep.as_dict() if hasattr(rep, "as_dict") else rep
    return json.dumps(_jsonable(out), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# optimizer <-> game pairs


def matching_game(run, problem, domain, gen=None, **kw):
    """Game spec whose x-average should reproduce ``run``'s iterates.

    Hyperparameters are read back from ``run.params`` so both sides use the
    same constants. ``nesterov_unconstrained`` is paired with the
    one-memory game, which it matches when ``momentum_shift=1``.
    """
    from .core import WeightSchedule
    from .dynamics import Composite, GameSpec, GaugeShift, StronglyConvexShift
    from .geometry import GaugeSet, SquaredGauge, SquaredL2, Unconstrained
    from .learners import AFTL, BR, BTL, BTRL, FTL, MD, OFTL, OMD, LazyFTL, OptimisticMD

    name, prm = run.algorithm, run.params
    gen = SquaredL2() if gen is None else gen
    w0 = run.w0
    T = run.T
    L = problem.L
    lin, uni = WeightSchedule.linear(), WeightSchedule.uniform()
    Y, X = Order.Y_FIRST, Order.X_FIRST

    def spec(y, x, weights, order=Y, payoff=None, dom=domain, x0=w0):
        return GameSpec(problem, dom, y, x, T, weights, order, payoff, x0)

    if name == "frank_wolfe":
        return spec(FTL(DualSpace()), BR(domain), lin)
    if name == "adaptive_frank_wolfe":
        return spec(AFTL(DualSpace(), exponent=prm["exponent"], tol=prm["tol"]), BR(domain), WeightSchedule.adaptive())
    if name == "incremental_frank_wolfe":
        return spec(LazyFTL(DualSpace(problem)), BR(domain), uni)
    if name == "gd_averaging":
        return spec(BR(DualSpace()), OMD(domain, SquaredL2(), prm["eta"], w0, seeded=True), uni, X)
    if name == "cumulative_gd":
        return spec(BTL(DualSpace()), OMD(domain, SquaredL2(), prm["eta"], w0, seeded=True), uni, X)
    if name == "single_call_extragradient":
        return spec(BR(DualSpace()), OptimisticMD(domain, gen, prm["gamma"], w0), uni, X)
    if name == "optimistic_md_averaging":
        return spec(BTL(DualSpace()), OptimisticMD(domain, gen, prm["gamma"], w0), lin, X)
    if name == "boundary_fw":
        return spec(BR(DualSpace()), FTL(domain, init=w0), uni, X)
    if name == "heavy_ball":
        dom = Unconstrained(problem.dim) if domain is None else domain
        return spec(FTL(DualSpace()), MD(dom, SquaredL2(), 1.0 / (8.0 * L), w0), lin, dom=dom)
    if name == "nesterov_1mem":
        return spec(OFTL(DualSpace()), MD(domain, gen, prm["gamma"], w0), lin)
    if name == "nesterov_unconstrained":
        dom = Unconstrained(problem.dim)
        return spec(OFTL(DualSpace()), MD(dom, SquaredL2(), 1.0 / (4.0 * L), w0), lin, dom=dom)
    if name == "nesterov_infmem":
        center = kw.get("center", "x0")
        c = w0 if isinstance(center, str) else center
        return spec(OFTL(DualSpace()), BTRL(domain, Regularizer(gen, c), prm["gamma"]), lin)
    if name == "accelerated_proximal":
        psi = kw.get("psi") or getattr(problem, "psi", None)
        dom = Unconstrained(problem.dim)
        return spec(OFTL(DualSpace()), MD(dom, SquaredL2(), prm["gamma"], w0), lin, payoff=Composite(psi), dom=dom)
    if name == "accelerated_linear":
        w = WeightSchedule.exp_ratio(prm["beta"], prm["first"])
        return spec(OFTL(DualSpace()), BTRL(domain, Regularizer(gen), 1.0), w, payoff=StronglyConvexShift(prm["mu"], gen))
    if name in ("gauge_fw_smooth", "gauge_fw_strongly_convex"):
        gset = kw.get("gset") or GaugeSet(domain)
        dom = gset.base
        if name == "gauge_fw_smooth":
            reg = Regularizer(SquaredGauge(gset, 1.0))
            return spec(OFTL(DualSpace()), BTRL(dom, reg, prm["eta"]), lin, dom=dom)
        lam = prm["lam"]
        reg = Regularizer(SquaredGauge(gset, 1.0 / lam))
        w = WeightSchedule.exp_ratio(prm["beta"], prm["first"])
        return spec(OFTL(DualSpace()), BTRL(dom, reg, 1.0), w, payoff=GaugeShift(prm["mu"], gset, lam), dom=dom)
    raise KeyError(f"no matching game for {name!r}")


def equivalence_pair(name, problem, domain, w0, T, gen=None, tol: float = 1e-10, **kw):
    """Run an optimizer and its game; return (run, trace, report)."""
    from .dynamics import run_dynamic
    from .optimizers import run_optimizer

    if name == "nesterov_unconstrained":
        kw.setdefault("momentum_shift", 1)
    run = run_optimizer(name, problem, domain, w0, T, gen=gen, **kw)
    spec = matching_game(run, problem, domain, gen=gen, **kw)
    spec.track_regret = False
    trace = run_dynamic(spec)
    if "converged" in (run.status, trace.status):
        # early stops may fall on different rounds; compare the common prefix
        n = min(run.T, len(trace))
        return run, trace, check_equivalence(run.as_array()[:n], trace.x_bar_seq[:n], tol)
    return run, trace, check_equivalence(run, trace, tol)
