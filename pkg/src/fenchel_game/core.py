"""Shared value types: points, weight schedules, loss descriptors and traces.

Everything here is plain numpy. Points are 1-D float64 arrays; the helpers in
this module validate them and freeze the copies that end up inside traces.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import kernels

__all__ = [
    "as_point",
    "frozen",
    "WeightKind",
    "WeightSchedule",
    "weighted_average",
    "running_averages",
    "weighted_regret",
    "Side",
    "QuadraticLoss",
    "FenchelLoss",
    "Round",
    "DynamicTrace",
    "hindsight_comparators",
    "TRACE_COLUMNS",
    "format_float",
]


def as_point(x, dim: Optional[int] = None) -> np.ndarray:
    """Return ``x`` as a fresh finite 1-D float64 array.

    Raises ``ValueError`` on NaN/Inf entries or on a dimension mismatch.
    """
    arr = np.array(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite point")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.shape[0]}")
    return arr


def frozen(x) -> np.ndarray:
    """Read-only float64 copy of ``x`` (used for values stored in traces)."""
    arr = np.array(x, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def format_float(v: float) -> str:
    """17-significant-digit text form used by every CSV/JSON writer."""
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# weights


class WeightKind(enum.Enum):
    UNIFORM = "uniform"
    LINEAR = "linear"
    EXP_RATIO = "exp_ratio"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class WeightSchedule:
    """Positive round weights alpha_t and their partial sums A_t.

    ``EXP_RATIO`` keeps alpha_t / A_t = beta for t >= 2 with alpha_1 = ``first``,
    which unrolls to alpha_t = beta / (1 - beta) * A_{t-1}. ``ADAPTIVE`` weights
    are produced at run time by a learner (see ``AFTL``); ``callback`` may be
    used by callers that want to compute them from a state object instead.
    """

    kind: WeightKind
    beta: float = 0.0
    first: float = 1.0
    callback: Optional[Callable] = None

    def __post_init__(self):
        if self.kind is WeightKind.EXP_RATIO:
            if not 0.0 < self.beta < 1.0:
                raise ValueError("beta must lie in (0, 1)")
            if not self.first > 0.0:
                raise ValueError("first weight must be positive")

    @classmethod
    def uniform(cls) -> "WeightSchedule":
        return cls(WeightKind.UNIFORM)

    @classmethod
    def linear(cls) -> "WeightSchedule":
        return cls(WeightKind.LINEAR)

    @classmethod
    def exp_ratio(cls, beta: float, first: float = 1.0) -> "WeightSchedule":
        return cls(WeightKind.EXP_RATIO, beta=float(beta), first=float(first))

    @classmethod
    def adaptive(cls, callback: Optional[Callable] = None) -> "WeightSchedule":
        return cls(WeightKind.ADAPTIVE, callback=callback)

    @property
    def is_adaptive(self) -> bool:
        return self.kind is WeightKind.ADAPTIVE

    def alpha(self, t: int, a_prev: Optional[float] = None) -> float:
        """Weight of round ``t`` (1-based). ``a_prev`` is A_{t-1} if known."""
        if t < 1:
            raise ValueError("rounds are 1-based")
        if self.kind is WeightKind.UNIFORM:
            return 1.0
        if self.kind is WeightKind.LINEAR:
            return float(t)
        if self.kind is WeightKind.EXP_RATIO:
            if t == 1:
                return self.first
            if a_prev is None:
                a_prev = self.cumulative(t - 1)
            return self.beta / (1.0 - self.beta) * a_prev
        raise ValueError("adaptive weights are produced by the learner")

    def alphas(self, T: int) -> np.ndarray:
        """Array (alpha_1, ..., alpha_T)."""
        if self.kind is WeightKind.UNIFORM:
            return np.ones(T)
        if self.kind is WeightKind.LINEAR:
            return np.arange(1, T + 1, dtype=np.float64)
        out = np.empty(T)
        a = 0.0
        for t in range(1, T + 1):
            out[t - 1] = self.alpha(t, a)
            a += out[t - 1]
        return out

    def cumulative(self, t: int) -> float:
        """A_t = alpha_1 + ... + alpha_t (A_0 = 0)."""
        if t <= 0:
            return 0.0
        if self.kind is WeightKind.UNIFORM:
            return float(t)
        if self.kind is WeightKind.LINEAR:
            return float(t * (t + 1) // 2)
        if self.kind is WeightKind.EXP_RATIO:
            # A_t = A_{t-1} / (1 - beta) for t >= 2
            return self.first / (1.0 - self.beta) ** (t - 1)
        raise ValueError("adaptive weights are produced by the learner")


def _weights_array(weights, n: int) -> np.ndarray:
    if isinstance(weights, WeightSchedule):
        return weights.alphas(n)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] < n:
        raise ValueError("fewer weights than points")
    return w[:n]


def weighted_average(points: Sequence, weights, t: Optional[int] = None) -> np.ndarray:
    """Weighted average of the first ``t`` points.

    ``weights`` is a ``WeightSchedule`` or an explicit sequence of alphas.
    The average is built incrementally as (A_{s-1} avg + alpha_s x_s) / A_s.
    """
    if len(points) == 0:
        raise ValueError("no iterates")
    if t is None:
        t = len(points)
    if t < 1 or t > len(points):
        raise ValueError(f"round index {t} outside 1..{len(points)}")
    w = _weights_array(weights, t)
    avg = as_point(points[0])
    a = w[0]
    for s in range(1, t):
        avg = kernels.average_update(avg, a, as_point(points[s], avg.shape[0]), w[s])
        a += w[s]
    return avg


def running_averages(points: Sequence, weights) -> np.ndarray:
    """All prefix averages (x_bar_1, ..., x_bar_T) stacked as rows."""
    if len(points) == 0:
        raise ValueError("no iterates")
    w = _weights_array(weights, len(points))
    out = np.empty((len(points), np.asarray(points[0]).shape[0]))
    avg = as_point(points[0])
    out[0] = avg
    a = w[0]
    for s in range(1, len(points)):
        avg = kernels.average_update(avg, a, as_point(points[s]), w[s])
        a += w[s]
        out[s] = avg
    return out


def weighted_regret(
    losses: Sequence,
    actions: Sequence,
    comparator,
    weights=None,
    domain=None,
    average: bool = False,
) -> float:
    """sum_t alpha_t [l_t(z_t) - l_t(z*)], optionally divided by A_T.

    Each loss needs a ``value`` method. Weights default to the losses' own
    ``weight`` attribute and to 1 when that is absent.
    """
    if len(losses) != len(actions):
        raise ValueError("losses and actions differ in length")
    comp = as_point(comparator)
    if domain is not None and not domain.contains(comp, tol=1e-9):
        raise ValueError("comparator outside the decision set")
    if weights is None:
        w = np.array([getattr(l, "weight", 1.0) for l in losses], dtype=np.float64)
    else:
        w = _weights_array(weights, len(losses))
    total = 0.0
    for a, loss, z in zip(w, losses, actions):
        total += a * (loss.value(z) - loss.value(comp))
    if average:
        return total / float(np.sum(w))
    return float(total)


# ---------------------------------------------------------------------------
# loss descriptors


class Side(enum.Enum):
    Y = "y"
    X = "x"


class QuadraticLoss:
    """Separable quadratic l(z) = <lin, z> + 1/2 sum_i quad_i z_i^2 + const.

    ``quad`` may be a scalar or a vector; zero gives a linear loss. Used for
    regret experiments outside the game.
    """

    def __init__(self, lin, quad=0.0, const: float = 0.0, weight: float = 1.0):
        self.lin = as_point(lin)
        q = np.asarray(quad, dtype=np.float64)
        if np.any(q < 0):
            raise ValueError("quadratic coefficients must be nonnegative")
        self.quad = q
        self.const = float(const)
        self.weight = float(weight)

    @classmethod
    def centered(cls, center, curvature=1.0, weight: float = 1.0) -> "QuadraticLoss":
        """(curvature / 2) ||z - center||^2."""
        c = as_point(center)
        q = np.asarray(curvature, dtype=np.float64)
        return cls(-q * c, q, 0.5 * float(np.sum(q * c * c)), weight)

    @property
    def strong_convexity(self) -> float:
        return float(np.min(self.quad))

    def value(self, z) -> float:
        z = np.asarray(z, dtype=np.float64)
        return float(self.lin @ z + 0.5 * np.sum(self.quad * z * z) + self.const)

    def grad(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        return self.lin + self.quad * z

    def leader_terms(self):
        from .learners import LeaderModel

        return LeaderModel(lin=self.lin, quad=self.quad)

    def with_weight(self, weight: float) -> "QuadraticLoss":
        return QuadraticLoss(self.lin, self.quad, self.const, weight)


class FenchelLoss:
    """Per-round loss of one player in the Fenchel game.

    Y side: l(y) = f*(y) - <anchor, y> (anchor = x_t); minimized at grad f(x_t).
    X side: h(x) = <x, anchor> - f*(anchor) + psi(x) + mu * phi(x) (anchor = y_t).

    ``problem`` is the (possibly shifted) objective whose conjugate appears in
    the payoff. ``composite`` is a prox term psi, ``shift`` a pair
    (mu, generator) for the strongly convex reformulation.
    """

    def __init__(self, side: Side, weight: float, anchor, problem, composite=None, shift=None):
        self.side = side
        self.weight = float(weight)
        self.anchor = frozen(as_point(anchor))
        self.problem = problem
        self.composite = composite
        self.shift = shift

    def __repr__(self):
        return f"FenchelLoss({self.side.value}, weight={self.weight!r})"

    def value(self, z) -> float:
        z = np.asarray(z, dtype=np.float64)
        if self.side is Side.Y:
            return self.problem.conjugate(z) - float(self.anchor @ z)
        v = float(z @ self.anchor) - self.problem.conjugate(self.anchor)
        return v + self.extra_value(z)

    def extra_value(self, x) -> float:
        """psi(x) + mu * phi(x) part of an X-side loss."""
        v = 0.0
        if self.composite is not None:
            v += self.composite.value(x)
        if self.shift is not None:
            mu, gen = self.shift
            v += mu * gen.value(x)
        return v

    def linear_value(self, x) -> float:
        """X-side loss without the constant -f*(y_t); differences are exact."""
        return float(np.asarray(x) @ self.anchor) + self.extra_value(x)

    def grad(self, z) -> np.ndarray:
        """Gradient of the loss (X side: y_t + grad psi + mu grad phi)."""
        if self.side is Side.Y:
            raise ValueError("y-side loss gradients need grad f*, which is never formed")
        g = self.anchor.copy()
        if self.composite is not None:
            g = g + self.composite.grad(z)
        if self.shift is not None:
            mu, gen = self.shift
            g = g + mu * gen.grad(z)
        return g

    def linear_part(self) -> np.ndarray:
        return self.anchor

    def leader_terms(self):
        """X-side loss as a ``LeaderModel`` (up to an additive constant)."""
        from .learners import LeaderModel

        if self.side is not Side.X:
            raise ValueError("leader terms exist only for x-side losses")
        model = LeaderModel(lin=self.anchor)
        if self.composite is not None:
            model = model + LeaderModel.from_prox_term(self.composite)
        if self.shift is not None:
            mu, gen = self.shift
            model = model + gen.leader_terms().scaled(mu)
        return model


# ---------------------------------------------------------------------------
# traces

TRACE_COLUMNS = ("t", "alpha", "f_xbar", "primal_gap", "reg_x", "reg_y", "step_x", "step_y")


class Round(NamedTuple):
    t: int
    alpha: float
    x: np.ndarray
    y: np.ndarray
    x_bar: np.ndarray
    y_bar: np.ndarray
    x_loss: FenchelLoss
    y_loss: FenchelLoss


@dataclass
class DynamicTrace:
    """Per-round record of a two-player run plus summary statistics.

    ``rows`` holds the CSV quantities per round (see ``TRACE_COLUMNS``).
    """

    rounds: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    status: str = "running"
    T: int = 0
    order: str = ""
    summary: dict = field(default_factory=dict)
    spec: object = None

    def __len__(self):
        return len(self.rounds)

    @property
    def x_seq(self) -> np.ndarray:
        return np.array([r.x for r in self.rounds])

    @property
    def y_seq(self) -> np.ndarray:
        return np.array([r.y for r in self.rounds])

    @property
    def x_bar_seq(self) -> np.ndarray:
        return np.array([r.x_bar for r in self.rounds])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([r.alpha for r in self.rounds])

    @property
    def x_bar(self) -> np.ndarray:
        return self.rounds[-1].x_bar

    @property
    def y_bar(self) -> np.ndarray:
        return self.rounds[-1].y_bar

    def x_losses(self):
        return [r.x_loss for r in self.rounds]

    def y_losses(self):
        return [r.y_loss for r in self.rounds]

    def check_averages(self, rtol: float = 1e-12) -> float:
        """Max relative gap between stored and from-scratch prefix averages."""
        xs = self.x_seq
        w = self.alphas
        worst = 0.0
        num = np.cumsum(w[:, None] * xs, axis=0)
        den = np.cumsum(w)
        scratch = num / den[:, None]
        for s, r in enumerate(self.rounds):
            scale = max(1.0, float(np.max(np.abs(scratch[s]))))
            worst = max(worst, float(np.max(np.abs(scratch[s] - r.x_bar))) / scale)
        return worst

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in self.rows:
            writer.writerow([row[0]] + [format_float(v) for v in row[1:]])
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(_jsonable(self.summary), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if np.isfinite(v):
            return float(format_float(v))
        return str(v)
    return obj


def hindsight_comparators(trace: DynamicTrace, problem, domain):
    """Best fixed actions in hindsight for both players' cumulative losses.

    y*: the y-side cumulative loss is minimized at grad f(x_bar_T).
    x*: the x-side cumulative loss is sum_t alpha_t <x, y_t> plus any composite
    or shift terms; it is minimized by the closed-form leader when one exists
    (LMO for plain bounded domains). Otherwise the problem's own minimizer
    over the domain is the exact comparator for unconstrained or composite
    runs where the leader is unbounded or unavailable.
    """
    from .learners import LeaderModel, LeaderError, solve_leader

    if len(trace) == 0:
        raise ValueError("no iterates")
    y_star = problem.grad(trace.x_bar)
    model = LeaderModel.zero()
    for r in trace.rounds:
        model = model + r.x_loss.leader_terms().scaled(r.alpha)
    try:
        x_star = solve_leader(model, domain)
    except LeaderError:
        try:
            x_star = problem.minimum(domain)[0]
        except (NotImplementedError, ValueError) as exc:
            raise ValueError("comparator unavailable") from exc
    return as_point(x_star), as_point(y_star)
