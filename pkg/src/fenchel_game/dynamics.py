"""Two-player no-regret dynamics on the Fenchel game.

The payoff is g(x, y) = <x, y> - f*(y) (+ extras on the x side). One player
moves first without seeing the round's loss; the other sees it and responds.
Both losses are charged with the same weight alpha_t, and the weighted
average of the x-player's actions is the optimizer output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .core import DynamicTrace, FenchelLoss, Round, Side, WeightSchedule, as_point, frozen
from .geometry import Domain, GaugeSet, SquaredGauge
from .learners import AFTL, BR, Converged, DualSpace, LeaderError, LeaderModel, Learner, Mode, solve_leader
from .problems import OracleUnavailable, shifted_problem

__all__ = [
    "Order",
    "Plain",
    "Composite",
    "StronglyConvexShift",
    "GaugeShift",
    "GameSpec",
    "DynamicError",
    "run_dynamic",
    "EquilibriumGap",
    "equilibrium_gap",
]


class Order(enum.Enum):
    Y_FIRST = "y_first"
    X_FIRST = "x_first"


class DynamicError(RuntimeError):
    """A learner produced an invalid point; the message names the round."""


# ---------------------------------------------------------------------------
# payoffs


class Plain:
    """g(x, y) = <x, y> - f*(y)."""

    composite = None
    shift = None

    def __repr__(self):
        return "Plain()"

    def game_problem(self, problem):
        return problem

    def objective(self, problem, x) -> float:
        return problem.value(x)


class Composite(Plain):
    """g(x, y) = <x, y> - f*(y) + psi(x).

    ``problem`` is the smooth part. A problem that carries its own ``psi``
    (``Lasso``) already reports the composite value.
    """

    def __init__(self, psi):
        self.composite = psi

    def __repr__(self):
        return f"Composite({self.composite!r})"

    def objective(self, problem, x):
        inner = getattr(problem, "inner", problem)
        if getattr(inner, "psi", None) is not None:
            return problem.value(x)
        return problem.value(x) + self.composite.value(x)


class StronglyConvexShift(Plain):
    """g(x, y) = <x, y> - f_tilde*(y) + mu phi(x) with f_tilde = f - mu phi."""

    def __init__(self, mu: float, gen):
        if mu < 0:
            raise ValueError("shift must be nonnegative")
        self.mu, self.gen = float(mu), gen
        self.shift = (self.mu, gen)

    def __repr__(self):
        return f"StronglyConvexShift({self.mu!r}, {self.gen!r})"

    def game_problem(self, problem):
        return shifted_problem(problem, self.gen, self.mu)


class GaugeShift(StronglyConvexShift):
    """Shift by (mu / lam) gauge^2, i.e. mu times the generator gauge^2 / lam."""

    def __init__(self, mu: float, gset: GaugeSet, lam: Optional[float] = None):
        lam = gset.lam if lam is None else float(lam)
        super().__init__(mu, SquaredGauge(gset, 1.0 / lam))
        self.gset, self.lam = gset, lam

    def __repr__(self):
        return f"GaugeShift({self.mu!r}, {self.gset!r}, lam={self.lam!r})"


# ---------------------------------------------------------------------------
# spec


@dataclass
class GameSpec:
    """Everything needed to run one dynamic.

    ``x0`` seeds the round-0 loss of the first mover (the y-side loss
    anchored at x0 when y moves first, the x-side loss at y0 = grad f(x0)
    otherwise).
    """

    problem: object
    domain: Domain
    y_learner: Learner
    x_learner: Learner
    T: int
    weights: WeightSchedule = None
    order: Order = Order.Y_FIRST
    payoff: Plain = None
    x0: Optional[np.ndarray] = None
    track_regret: bool = True

    def __post_init__(self):
        if self.weights is None:
            self.weights = WeightSchedule.uniform()
        if self.payoff is None:
            self.payoff = Plain()
        if self.x0 is not None:
            self.x0 = as_point(self.x0)

    @property
    def first(self) -> Learner:
        return self.y_learner if self.order is Order.Y_FIRST else self.x_learner

    @property
    def second(self) -> Learner:
        return self.x_learner if self.order is Order.Y_FIRST else self.y_learner

    def validate(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValueError("T must be a positive integer")
        if self.first.mode is Mode.PRESCIENT:
            raise ValueError(f"{self.first.name} is prescient and cannot move first")
        if self.second.mode is not Mode.PRESCIENT:
            raise ValueError(f"{self.second.name} must be prescient to move second")
        if not isinstance(self.y_learner.space, DualSpace):
            raise ValueError("the y-player must act on a DualSpace")
        if isinstance(self.x_learner.space, DualSpace):
            raise ValueError("the x-player must act on a primal domain")
        if self.weights.is_adaptive:
            if not (self.order is Order.Y_FIRST and isinstance(self.y_learner, AFTL)):
                raise ValueError("adaptive weights need AFTL as the first (y) player")
            if not self.x_learner.weight_independent:
                raise ValueError("adaptive weights need a weight-independent second player")
        elif isinstance(self.y_learner, AFTL):
            raise ValueError("AFTL needs adaptive weights")
        return self


# ---------------------------------------------------------------------------
# driver


def _scale(x) -> float:
    return max(1.0, float(np.max(np.abs(x))))


def _check_x(t, x, domain):
    if not np.all(np.isfinite(x)):
        raise DynamicError(f"round {t}: x-player produced a non-finite point")
    if not domain.contains(x, tol=1e-9 * _scale(x)):
        raise DynamicError(f"round {t}: x-player left the domain")


def _check_y(t, y):
    if not np.all(np.isfinite(y)):
        raise DynamicError(f"round {t}: y-player produced a non-finite point")


class _RegretTracker:
    """Running Reg_x, Reg_y and primal gap for the CSV rows."""

    def __init__(self, spec: GameSpec, gp):
        self.spec, self.gp = spec, gp
        self.sum_y = 0.0
        self.sum_x = 0.0
        self.model = LeaderModel.zero()
        self.has_conj = spec.track_regret and gp.has_conjugate()
        self.enabled = spec.track_regret
        self._fallback = None
        self._f_star = None
        self._f_star_known = None
        self.x_star = None

    def f_star(self):
        if self._f_star_known is None:
            try:
                x, _ = self.spec.problem.minimum(self.spec.domain)
                self._fallback = as_point(x)
                self._f_star = self.spec.payoff.objective(self.spec.problem, x)
                self._f_star_known = True
            except (OracleUnavailable, ValueError):
                self._f_star_known = False
        return self._f_star if self._f_star_known else None

    def comparator(self):
        try:
            return solve_leader(self.model, self.spec.domain, self.x_star)
        except LeaderError:
            self.f_star()
            return self._fallback

    def update(self, alpha, x, y, x_loss, A, x_bar):
        if not self.enabled:
            return math.nan, math.nan
        terms = x_loss.leader_terms().scaled(alpha)
        self.model = self.model + terms
        self.sum_x += terms.value(x)
        x_star = self.comparator()
        reg_x = math.nan
        if x_star is not None:
            self.x_star = x_star
            reg_x = self.sum_x - self.model.value(x_star)
        reg_y = math.nan
        if self.has_conj:
            try:
                self.sum_y += alpha * (self.gp.conjugate(y) - float(x @ y))
                reg_y = self.sum_y + A * self.gp.value(x_bar)
            except OracleUnavailable:
                self.has_conj = False
        return reg_x, reg_y


def run_dynamic(spec: GameSpec) -> DynamicTrace:
    """Play ``spec.T`` rounds and return the full trace.

    Raises ``DynamicError`` (with the round index) when a learner emits a
    non-finite point or an x outside the domain. AFTL's degenerate-step
    signal ends the run early with status ``"converged"``.
    """
    spec.validate()
    payoff = spec.payoff
    gp = payoff.game_problem(spec.problem)
    ys = spec.y_learner.space
    if ys.problem is None:
        ys.problem = gp
    ylearn, xlearn = spec.y_learner, spec.x_learner
    domain = spec.domain

    def y_loss(alpha, x):
        return FenchelLoss(Side.Y, alpha, x, ys.problem)

    def x_loss(alpha, y):
        return FenchelLoss(Side.X, alpha, y, gp, payoff.composite, payoff.shift)

    if spec.x0 is not None:
        if spec.order is Order.Y_FIRST:
            ylearn.start(y_loss(1.0, spec.x0))
            xlearn.start(None)
        else:
            xlearn.start(x_loss(1.0, ys.problem.grad(spec.x0)))
            ylearn.start(None)
    else:
        ylearn.start(None)
        xlearn.start(None)

    trace = DynamicTrace(T=spec.T, order=spec.order.value, spec=spec)
    tracker = _RegretTracker(spec, gp)
    A = 0.0
    x_bar = y_bar = None
    x_prev = y_prev = None
    adaptive = spec.weights.is_adaptive
    for t in range(1, spec.T + 1):
        alpha = None if adaptive else spec.weights.alpha(t, A)
        if spec.order is Order.Y_FIRST:
            y = _checked_y(t, ylearn.act(t, alpha))
            lx = x_loss(alpha if alpha is not None else 1.0, y)
            x = np.asarray(xlearn.act(t, lx.weight, lx), dtype=np.float64).reshape(-1)
            _check_x(t, x, domain)
            ly = y_loss(alpha if alpha is not None else 1.0, x)
            if adaptive:
                try:
                    alpha = ylearn.adaptive_weight(ly)
                except Converged:
                    trace.status = "converged"
                    break
                lx = x_loss(alpha, y)
                ly = y_loss(alpha, x)
        else:
            x = np.asarray(xlearn.act(t, alpha), dtype=np.float64).reshape(-1)
            _check_x(t, x, domain)
            ly = y_loss(alpha, x)
            y = _checked_y(t, ylearn.act(t, alpha, ly))
            lx = x_loss(alpha, y)
        ylearn.observe(t, alpha, ly)
        xlearn.observe(t, alpha, lx)
        if x_bar is None:
            x_bar, y_bar = x.copy(), y.copy()
        else:
            x_bar = kernels.average_update(x_bar, A, x, alpha)
            y_bar = kernels.average_update(y_bar, A, y, alpha)
        A += alpha
        trace.rounds.append(Round(t, alpha, frozen(x), frozen(y), frozen(x_bar), frozen(y_bar), lx, ly))
        f_bar = payoff.objective(spec.problem, x_bar)
        f_star = tracker.f_star() if spec.track_regret else None
        gap = f_bar - f_star if f_star is not None else math.nan
        reg_x, reg_y = tracker.update(alpha, x, y, lx, A, x_bar)
        step_x = 0.0 if x_prev is None else float(np.linalg.norm(x - x_prev))
        step_y = 0.0 if y_prev is None else float(np.linalg.norm(y - y_prev))
        trace.rows.append((t, alpha, f_bar, gap, reg_x, reg_y, step_x, step_y))
        x_prev, y_prev = x, y
    else:
        trace.status = "completed"
    if not trace.rounds:
        raise DynamicError("round 1: no rounds were played")
    last = trace.rows[-1]
    trace.summary = {
        "T": spec.T,
        "rounds": len(trace.rounds),
        "status": trace.status,
        "order": spec.order.value,
        "payoff": repr(payoff),
        "y_learner": ylearn.name,
        "x_learner": xlearn.name,
        "A_T": A,
        "x_bar": trace.x_bar,
        "f_xbar": last[2],
        "primal_gap": last[3],
        "reg_x": last[4],
        "reg_y": last[5],
        "regret_sum": (last[4] + last[5]) / A,
    }
    return trace


def _checked_y(t, y):
    y = np.array(y, dtype=np.float64).reshape(-1)
    _check_y(t, y)
    return y


# ---------------------------------------------------------------------------
# certificates


class EquilibriumGap(NamedTuple):
    primal_gap: float
    regret_sum: float
    reg_x: float
    reg_y: float


def equilibrium_gap(trace: DynamicTrace, problem=None, domain=None) -> EquilibriumGap:
    """Primal gap of x_bar_T and the averaged regret sum that bounds it.

    Regrets use the hindsight comparators y* = grad f(x_bar_T) and the
    closed-form x-side leader (or the problem's minimizer when the leader is
    unbounded). Without a known minimum the primal gap falls back to the
    duality gap at y_bar_T, which needs the conjugate.
    """
    spec = trace.spec
    if spec is None:
        raise ValueError("trace carries no game spec")
    problem = spec.problem if problem is None else problem
    domain = spec.domain if domain is None else domain
    payoff = spec.payoff
    gp = payoff.game_problem(problem)
    if len(trace) == 0:
        raise ValueError("no iterates")
    x_bar, y_bar = trace.x_bar, trace.y_bar
    F_bar = payoff.objective(problem, x_bar)
    A = float(np.sum(trace.alphas))

    x_min = None
    try:
        x_min, _ = problem.minimum(domain)
        primal_gap = F_bar - payoff.objective(problem, x_min)
    except (OracleUnavailable, ValueError):
        if not gp.has_conjugate():
            raise ValueError("gap unavailable")
        # weak duality: F* >= min_x g(x, y_bar)
        model = LeaderModel(lin=y_bar)
        if payoff.composite is not None:
            model = model + LeaderModel.from_prox_term(payoff.composite)
        if payoff.shift is not None:
            model = model + payoff.shift[1].leader_terms().scaled(payoff.shift[0])
        try:
            xd = solve_leader(model, domain)
        except LeaderError as exc:
            raise ValueError("gap unavailable") from exc
        dual = float(xd @ y_bar) - gp.conjugate(y_bar)
        if payoff.composite is not None:
            dual += payoff.composite.value(xd)
        if payoff.shift is not None:
            dual += payoff.shift[0] * payoff.shift[1].value(xd)
        primal_gap = F_bar - dual

    model = LeaderModel.zero()
    sum_x = 0.0
    for r in trace.rounds:
        terms = r.x_loss.leader_terms().scaled(r.alpha)
        model = model + terms
        sum_x += terms.value(r.x)
    try:
        x_star = solve_leader(model, domain)
    except LeaderError:
        x_star = x_min
    reg_x = math.nan if x_star is None else sum_x - model.value(x_star)

    reg_y = math.nan
    if gp.has_conjugate():
        s = 0.0
        for r in trace.rounds:
            s += r.alpha * (gp.conjugate(r.y) - float(r.x @ r.y))
        reg_y = s + A * gp.value(x_bar)
    return EquilibriumGap(float(primal_gap), (reg_x + reg_y) / A, reg_x, reg_y)
