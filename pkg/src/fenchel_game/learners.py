"""Weighted online learners with closed-form leaders.

Two kinds of decision space are supported:

* ``DualSpace(problem)``: the y-player of the Fenchel game. Losses are y-side
  ``FenchelLoss`` objects, and every leader has the form grad f(weighted
  average of anchors), so f* is never evaluated inside an update.
* a ``Domain``: the x-player, or any learner on generic separable quadratic
  losses. Cumulative losses are summarized by a ``LeaderModel`` whose
  minimizer is computed in closed form by ``solve_leader``.

The learner classes update their state incrementally. The ``*_act``
functions at the bottom recompute the same decisions from a full history
and serve as an independent route in tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .core import FenchelLoss, QuadraticLoss, Side, as_point
from .geometry import (
    Box,
    Domain,
    GaugeSet,
    L1Term,
    Simplex,
    SquaredL2Term,
    Unconstrained,
    ZeroTerm,
    gauge_reg_argmin,
)

__all__ = [
    "Mode",
    "HintRule",
    "LeaderError",
    "Converged",
    "LeaderModel",
    "solve_leader",
    "bregman_terms",
    "Regularizer",
    "DualSpace",
    "Learner",
    "BR",
    "FTL",
    "BTL",
    "FTRL",
    "BTRL",
    "OFTL",
    "OFTRL",
    "OMD",
    "MD",
    "OptimisticMD",
    "AFTL",
    "LazyFTL",
    "br_act",
    "ftl_act",
    "btl_act",
    "ftrl_act",
    "btrl_act",
    "oftl_act",
    "oftrl_act",
    "omd_act",
    "md_act",
    "optmd_act",
    "aftl_weight",
    "lazyftl_act",
]


class Mode(enum.Enum):
    STANDARD = "standard"  # acts before seeing the round's loss
    PRESCIENT = "prescient"  # sees alpha_t and l_t first
    OPTIMISTIC = "optimistic"  # acts on a hint of l_t


class HintRule(enum.Enum):
    PREVIOUS_LOSS = "previous_loss"
    PREVIOUS_GRADIENT = "previous_gradient"
    ZERO = "zero"


class LeaderError(ValueError):
    """The requested argmin has no closed form (or is unbounded)."""


class Converged(Exception):
    """Raised by an adaptive learner whose next step would be degenerate."""


# ---------------------------------------------------------------------------
# cumulative loss models


@dataclass(frozen=True)
class LeaderModel:
    """<lin, x> + 1/2 sum quad_i x_i^2 + l1 ||x||_1 + gauge g_K(x)^2 + ent sum x log x."""

    lin: Optional[np.ndarray] = None
    quad: object = 0.0
    l1: float = 0.0
    gauge: float = 0.0
    gauge_set: Optional[GaugeSet] = None
    ent: float = 0.0

    @classmethod
    def zero(cls) -> "LeaderModel":
        return cls()

    @classmethod
    def from_prox_term(cls, term) -> "LeaderModel":
        if term is None or isinstance(term, ZeroTerm):
            return cls()
        if isinstance(term, L1Term):
            return cls(l1=term.coef)
        if isinstance(term, SquaredL2Term):
            return cls(quad=term.coef)
        raise LeaderError("no closed-form leader")

    def __add__(self, other: "LeaderModel") -> "LeaderModel":
        if self.gauge_set is not None and other.gauge_set is not None and self.gauge_set is not other.gauge_set:
            raise LeaderError("cannot mix gauge terms of different sets")
        if self.lin is None:
            lin = other.lin
        elif other.lin is None:
            lin = self.lin
        else:
            lin = self.lin + other.lin
        return LeaderModel(
            lin=lin,
            quad=_add_quad(self.quad, other.quad),
            l1=self.l1 + other.l1,
            gauge=self.gauge + other.gauge,
            gauge_set=self.gauge_set if self.gauge_set is not None else other.gauge_set,
            ent=self.ent + other.ent,
        )

    def scaled(self, a: float) -> "LeaderModel":
        a = float(a)
        q = self.quad * a if isinstance(self.quad, np.ndarray) else float(self.quad) * a
        return LeaderModel(
            lin=None if self.lin is None else a * self.lin,
            quad=q,
            l1=a * self.l1,
            gauge=a * self.gauge,
            gauge_set=self.gauge_set,
            ent=a * self.ent,
        )

    def value(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        v = 0.0 if self.lin is None else float(self.lin @ x)
        v += 0.5 * float(np.sum(np.asarray(self.quad) * x * x))
        v += self.l1 * float(np.sum(np.abs(x)))
        if self.gauge:
            v += self.gauge * self.gauge_set.gauge_sq(x)
        if self.ent:
            pos = x > 0
            v += self.ent * float(np.sum(x[pos] * np.log(x[pos])))
        return v


def _add_quad(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.asarray(a, dtype=np.float64) + np.asarray(b, dtype=np.float64)
    return float(a) + float(b)


def _separable_box(lin, q, l1, lo, hi):
    # coordinatewise argmin of lin x + q/2 x^2 + l1 |x| over [lo, hi]
    q = np.broadcast_to(np.asarray(q, dtype=np.float64), lin.shape)
    out = np.empty_like(lin)
    pos = q > 0
    if np.any(pos):
        u = kernels.soft_threshold(np.ascontiguousarray(-lin[pos]), l1) / q[pos]
        out[pos] = np.clip(u, lo[pos], hi[pos])
    for i in np.flatnonzero(~pos):
        cands = [lo[i], hi[i]] + ([0.0] if lo[i] <= 0.0 <= hi[i] else [])
        vals = [lin[i] * c + l1 * abs(c) for c in cands]
        if not np.all(np.isfinite(vals)):
            raise LeaderError("leader is unbounded")
        best = min(vals)
        # lowest candidate among ties keeps the choice deterministic
        out[i] = min(c for c, v in zip(cands, vals) if v == best)
    return out


def solve_leader(model: LeaderModel, domain: Domain, prev=None) -> np.ndarray:
    """Exact minimizer of ``model`` over ``domain``.

    Supported shapes: linear (LMO), quadratic (projection, or a separable
    solve on boxes), quadratic plus l1 (prox, unconstrained or box),
    linear plus squared gauge (gauge closed form), linear plus entropy on
    the simplex (softmax). Anything else raises ``LeaderError``.
    """
    lin = model.lin
    dim = domain.dim if lin is None else lin.shape[0]
    if dim is None:
        if prev is None:
            raise LeaderError("dimension unknown for an empty model")
        dim = np.asarray(prev).shape[0]
    if lin is None:
        lin = np.zeros(dim)
    q = model.quad
    has_quad = bool(np.any(np.asarray(q) > 0))
    if model.ent > 0:
        if not isinstance(domain, Simplex) or has_quad or model.gauge or model.l1:
            raise LeaderError("no closed-form leader")
        z = -lin / model.ent
        z = z - z.max()
        e = np.exp(z)
        return e / e.sum()
    if model.gauge > 0:
        gset = model.gauge_set
        if has_quad or model.l1 or domain is not gset.base:
            raise LeaderError("no closed-form leader")
        return gauge_reg_argmin(gset, lin, model.gauge).point
    if has_quad:
        qa = np.asarray(q, dtype=np.float64)
        isotropic = qa.ndim == 0 or bool(np.all(qa == qa.flat[0]))
        if model.l1 == 0 and isotropic:
            return domain.project(-lin / float(qa.flat[0]))
        if isinstance(domain, Unconstrained):
            if np.any(qa <= 0):
                raise LeaderError("leader is unbounded")
            return kernels.soft_threshold(np.ascontiguousarray(-lin), model.l1) / qa
        if isinstance(domain, Box):
            return _separable_box(lin, qa, model.l1, domain.lo, domain.hi)
        raise LeaderError("no closed-form leader")
    if model.l1 > 0:
        if isinstance(domain, Box):
            return _separable_box(lin, 0.0, model.l1, domain.lo, domain.hi)
        raise LeaderError("no closed-form leader")
    if not domain.bounded:
        if np.any(lin):
            raise LeaderError("leader is unbounded")
        return as_point(prev) if prev is not None else np.zeros(dim)
    return domain.lmo(lin, prev)


def bregman_terms(gen, center) -> LeaderModel:
    """V_center(x) as a leader model (up to a constant)."""
    return gen.leader_terms() + LeaderModel(lin=-gen.grad(as_point(center)))


class Regularizer:
    """R(x) = phi(x) when ``center`` is None, else the Bregman V_center(x)."""

    def __init__(self, gen, center=None):
        self.gen = gen
        self.center = None if center is None else as_point(center)

    def __repr__(self):
        return f"Regularizer({self.gen!r})"

    def terms(self) -> LeaderModel:
        if self.center is None:
            return self.gen.leader_terms()
        return bregman_terms(self.gen, self.center)

    def value(self, x) -> float:
        if self.center is None:
            return self.gen.value(x)
        return self.gen.bregman(self.center, x)

    @property
    def beta(self) -> float:
        return self.gen.beta


# ---------------------------------------------------------------------------
# spaces


class DualSpace:
    """Decision space of the gradient player for objective ``problem``.

    A space built without a problem is bound to the game objective by the
    driver when the run starts.
    """

    def __init__(self, problem=None):
        self.problem = problem

    def __repr__(self):
        return f"DualSpace({getattr(self.problem, 'name', self.problem)!r})"

    def leader(self, anchor) -> np.ndarray:
        return self.problem.grad(anchor)


def _is_dual(space) -> bool:
    return isinstance(space, DualSpace)


class _DualAccumulator:
    """Running weighted average of y-side loss anchors."""

    def __init__(self):
        self.avg = None
        self.A = 0.0

    def add(self, alpha, anchor):
        anchor = np.asarray(anchor, dtype=np.float64)
        if self.avg is None:
            self.avg = anchor.copy()
        else:
            self.avg = kernels.average_update(self.avg, self.A, anchor, alpha)
        self.A += alpha

    def with_extra(self, alpha, anchor):
        anchor = np.asarray(anchor, dtype=np.float64)
        if self.avg is None:
            return anchor.copy()
        return kernels.average_update(self.avg, self.A, anchor, alpha)


def _loss_terms(loss) -> LeaderModel:
    return loss.leader_terms()


def _linear(vec) -> LeaderModel:
    return LeaderModel(lin=as_point(vec))


# ---------------------------------------------------------------------------
# learners


class Learner:
    """Common interface: ``start`` / ``act`` / ``observe``.

    ``start`` receives the optional round-0 loss used to seed initial
    points and hints. ``act(t, alpha, loss)`` returns z_t; prescient learners
    use ``loss``, the others must not. ``observe`` records (alpha_t, l_t).
    """

    name = "learner"
    mode = Mode.STANDARD
    weight_independent = False

    def __init__(self, space):
        self.space = space
        self.t = 0
        self.last = None
        self.initial_loss = None
        self.history = []

    def __repr__(self):
        return f"{type(self).__name__}({self.space!r})"

    def start(self, initial_loss=None):
        self.initial_loss = initial_loss

    def act(self, t: int, alpha: float, loss=None):
        raise NotImplementedError

    def observe(self, t: int, alpha: float, loss):
        self.history.append((float(alpha), loss))
        self.t = t

    def _emit(self, z):
        self.last = as_point(z)
        return self.last


class BR(Learner):
    """Best response to the current loss."""

    name = "BR"
    mode = Mode.PRESCIENT
    weight_independent = True

    def act(self, t, alpha, loss=None):
        if loss is None:
            raise ValueError("best response needs the current loss")
        return self._emit(br_act(loss, self.space, prev=self.last))


class _LeaderBase(Learner):
    """Shared state for the leader-following family."""

    def __init__(self, space, init=None):
        super().__init__(space)
        self.init = None if init is None else as_point(init)
        self.dual = _DualAccumulator() if _is_dual(space) else None
        self.model = LeaderModel.zero()
        self.degenerate_rounds = []

    def observe(self, t, alpha, loss):
        super().observe(t, alpha, loss)
        if self.dual is not None:
            self.dual.add(alpha, loss.anchor)
        else:
            self.model = self.model + _loss_terms(loss).scaled(alpha)

    def _initial(self):
        if self.init is not None:
            return self.init
        if self.initial_loss is not None:
            return br_act(self.initial_loss, self.space)
        if self.dual is not None:
            raise ValueError("no initial point for an empty history")
        return solve_leader(self.model, self.space, self.last)

    def _primal_leader(self, model, t):
        if model.lin is not None and not model.quad and not model.gauge and not model.ent and not model.l1:
            if self.space.bounded and float(np.linalg.norm(model.lin)) <= 1e-12:
                self.degenerate_rounds.append(t)
        return solve_leader(model, self.space, self.last)


class FTL(_LeaderBase):
    """Follow the leader of the past losses; ``init`` at t = 1."""

    name = "FTL"

    def act(self, t, alpha, loss=None):
        if self.dual is not None:
            if self.dual.avg is None:
                return self._emit(self._initial())
            return self._emit(self.space.leader(self.dual.avg))
        if not self.history:
            return self._emit(self._initial())
        return self._emit(self._primal_leader(self.model, t))


class BTL(_LeaderBase):
    """Be the leader: include the current loss."""

    name = "BTL"
    mode = Mode.PRESCIENT

    def act(self, t, alpha, loss=None):
        if loss is None:
            raise ValueError("BTL needs the current loss")
        if self.dual is not None:
            return self._emit(self.space.leader(self.dual.with_extra(alpha, loss.anchor)))
        return self._emit(self._primal_leader(self.model + _loss_terms(loss).scaled(alpha), t))


class FTRL(_LeaderBase):
    name = "FTRL"

    def __init__(self, space: Domain, reg: Regularizer, eta: float):
        if _is_dual(space):
            raise ValueError("regularized leaders are implemented on primal domains")
        if not eta > 0:
            raise ValueError("eta must be positive")
        super().__init__(space)
        self.reg, self.eta = reg, float(eta)

    def _reg(self):
        return self.reg.terms().scaled(1.0 / self.eta)

    def act(self, t, alpha, loss=None):
        return self._emit(solve_leader(self.model + self._reg(), self.space, self.last))


class BTRL(FTRL):
    name = "BTRL"
    mode = Mode.PRESCIENT

    def act(self, t, alpha, loss=None):
        if loss is None:
            raise ValueError("BTRL needs the current loss")
        model = self.model + _loss_terms(loss).scaled(alpha) + self._reg()
        return self._emit(solve_leader(model, self.space, self.last))


class _HintMixin:
    def _hint_loss(self, explicit):
        if explicit is not None:
            return explicit
        if self.hint_rule is HintRule.ZERO:
            return None
        if self.hint_rule is HintRule.PREVIOUS_LOSS:
            if self.history:
                return self.history[-1][1]
            return self.initial_loss
        # previous gradient as a linear loss
        prev = self.history[-1][1] if self.history else self.initial_loss
        if prev is None:
            return None
        z = self.last if self.last is not None else self.init
        if _is_dual(self.space):
            raise ValueError("gradient hints are not available on the dual space")
        return QuadraticLoss(prev.grad(z))


class OFTL(_HintMixin, _LeaderBase):
    """Optimistic FTL: leader of alpha_t m_t + past losses."""

    name = "OFTL"
    mode = Mode.OPTIMISTIC

    def __init__(self, space, hint: HintRule = HintRule.PREVIOUS_LOSS, init=None):
        super().__init__(space, init)
        self.hint_rule = hint

    def act(self, t, alpha, loss=None, hint=None):
        m = self._hint_loss(hint)
        if self.dual is not None:
            if m is None:
                if self.dual.avg is None:
                    return self._emit(self._initial())
                return self._emit(self.space.leader(self.dual.avg))
            return self._emit(self.space.leader(self.dual.with_extra(alpha, m.anchor)))
        model = self.model if m is None else self.model + _loss_terms(m).scaled(alpha)
        if m is None and not self.history:
            return self._emit(self._initial())
        return self._emit(self._primal_leader(model, t))


class OFTRL(_HintMixin, FTRL):
    name = "OFTRL"
    mode = Mode.OPTIMISTIC

    def __init__(self, space, reg, eta, hint: HintRule = HintRule.PREVIOUS_LOSS):
        super().__init__(space, reg, eta)
        self.hint_rule = hint

    def act(self, t, alpha, loss=None, hint=None):
        m = self._hint_loss(hint)
        model = self.model + self._reg()
        if m is not None:
            model = model + _loss_terms(m).scaled(alpha)
        return self._emit(solve_leader(model, self.space, self.last))


class _MirrorBase(Learner):
    def __init__(self, space: Domain, gen, gamma: float, z0):
        if _is_dual(space):
            raise ValueError("mirror steps are implemented on primal domains")
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        super().__init__(space)
        self.gen, self.gamma = gen, float(gamma)
        self.z0 = as_point(z0)
        self.z = self.z0.copy()
        self.init = self.z0

    def _step(self, terms: LeaderModel, center):
        model = terms + bregman_terms(self.gen, center).scaled(1.0 / self.gamma)
        return solve_leader(model, self.space, center)


class OMD(_MirrorBase):
    """z_t = argmin alpha_{t-1} l_{t-1} + V_{z_{t-1}} / gamma.

    With ``seeded=True`` the round-0 loss from ``start`` is used at t = 1
    with weight alpha_1; otherwise l_0 = 0 and z_1 = z_0.
    """

    name = "OMD"

    def __init__(self, space, gen, gamma, z0, seeded: bool = False):
        super().__init__(space, gen, gamma, z0)
        self.seeded = seeded

    def act(self, t, alpha, loss=None):
        if not self.history:
            if self.seeded and self.initial_loss is not None:
                self.z = self._step(_loss_terms(self.initial_loss).scaled(alpha), self.z)
            return self._emit(self.z)
        a_prev, l_prev = self.history[-1]
        self.z = self._step(_loss_terms(l_prev).scaled(a_prev), self.z)
        return self._emit(self.z)


class MD(_MirrorBase):
    """Prescient mirror descent: z_t = argmin alpha_t l_t + V_{z_{t-1}} / gamma."""

    name = "MD"
    mode = Mode.PRESCIENT

    def act(self, t, alpha, loss=None):
        if loss is None:
            raise ValueError("MD needs the current loss")
        self.z = self._step(_loss_terms(loss).scaled(alpha), self.z)
        return self._emit(self.z)


class OptimisticMD(_MirrorBase):
    """Two Bregman steps per round, both anchored at the half iterate."""

    name = "OPTMD"
    mode = Mode.OPTIMISTIC

    def __init__(self, space, gen, gamma, z0, hint: HintRule = HintRule.PREVIOUS_GRADIENT):
        super().__init__(space, gen, gamma, z0)
        self.hint_rule = hint
        self.z_half = self.z0.copy()
        self.grad_prev = None
        self.hints = []
        self.grads = []

    def start(self, initial_loss=None):
        super().start(initial_loss)
        if initial_loss is not None:
            self.grad_prev = as_point(initial_loss.grad(self.z0))

    def _hint(self, explicit):
        if explicit is not None:
            return as_point(explicit)
        if self.hint_rule is HintRule.ZERO or self.grad_prev is None:
            return np.zeros_like(self.z0)
        return self.grad_prev

    def act(self, t, alpha, loss=None, hint=None):
        m = self._hint(hint)
        self.hints.append(m)
        return self._emit(self._step(_linear(m).scaled(alpha), self.z_half))

    def observe(self, t, alpha, loss):
        super().observe(t, alpha, loss)
        delta = as_point(loss.grad(self.last))
        self.grads.append(delta)
        self.z_half = self._step(_linear(delta).scaled(alpha), self.z_half)
        self.grad_prev = delta


class AFTL(FTL):
    """FTL on the dual space whose round weights are 1 / ||x_t - x_bar_{t-1}||^p.

    The weight is computed from the second mover's action, so it must pair
    with a weight-independent opponent (best response).
    """

    name = "AFTL"

    def __init__(self, space: DualSpace, init=None, exponent: float = 2.0, tol: float = 1e-12):
        if not _is_dual(space):
            raise ValueError("AFTL runs on the dual space")
        super().__init__(space, init)
        self.exponent, self.tol = float(exponent), float(tol)
        self.weights = []

    def adaptive_weight(self, loss) -> float:
        ref = self.dual.avg
        if ref is None:
            if self.initial_loss is None:
                raise ValueError("AFTL needs the round-0 anchor x_0")
            ref = self.initial_loss.anchor
        a = aftl_weight(loss.anchor, ref, self.exponent, self.tol)
        self.weights.append(a)
        return a


class LazyFTL(Learner):
    """FTL with a cache of component gradients, refreshing one per round."""

    name = "LazyFTL"

    def __init__(self, space: DualSpace):
        if not _is_dual(space):
            raise ValueError("LazyFTL runs on the dual space")
        n = space.problem.n_components
        if n <= 0:
            raise ValueError("LazyFTL needs a finite-sum problem with n >= 1")
        super().__init__(space)
        self.n = n
        self.cache = None
        self.dual = _DualAccumulator()
        self.refresh_log = []

    def start(self, initial_loss=None):
        super().start(initial_loss)
        if initial_loss is None:
            raise ValueError("LazyFTL needs the round-0 anchor w_0")
        w0 = initial_loss.anchor
        p = self.space.problem
        self.cache = np.array([p.component_grad(i, w0) for i in range(self.n)])
        self.w0 = as_point(w0)

    def act(self, t, alpha, loss=None):
        at = self.w0 if self.dual.avg is None else self.dual.avg
        y, i = lazyftl_act(self.cache, t, at, self.space.problem)
        self.refresh_log.append((t, i))
        return self._emit(y)

    def observe(self, t, alpha, loss):
        super().observe(t, alpha, loss)
        self.dual.add(alpha, loss.anchor)


# ---------------------------------------------------------------------------
# functional forms (recompute from scratch)


def br_act(loss, space, prev=None) -> np.ndarray:
    """Per-round minimizer of ``loss``."""
    if _is_dual(space):
        if isinstance(loss, FenchelLoss) and loss.side is not Side.Y:
            raise ValueError("dual space expects y-side losses")
        return space.leader(loss.anchor)
    return solve_leader(_loss_terms(loss), space, prev)


def _dual_average(history):
    num, den = None, 0.0
    for a, loss in history:
        v = a * np.asarray(loss.anchor, dtype=np.float64)
        num = v if num is None else num + v
        den += a
    return num / den


def _history_model(history) -> LeaderModel:
    model = LeaderModel.zero()
    for a, loss in history:
        model = model + _loss_terms(loss).scaled(a)
    return model


def ftl_act(history: Sequence, space, init=None) -> np.ndarray:
    """Leader of sum_{s<t} alpha_s l_s; ``init`` when the history is empty."""
    if not history:
        if init is None:
            raise ValueError("FTL at t = 1 needs an initial point")
        return as_point(init)
    if _is_dual(space):
        return space.leader(_dual_average(history))
    return solve_leader(_history_model(history), space)


def btl_act(history: Sequence, current, space) -> np.ndarray:
    """Leader including the current (alpha_t, l_t)."""
    return ftl_act(list(history) + [current], space)


def ftrl_act(history: Sequence, reg: Regularizer, eta: float, space) -> np.ndarray:
    return solve_leader(_history_model(history) + reg.terms().scaled(1.0 / eta), space)


def btrl_act(history: Sequence, current, reg: Regularizer, eta: float, space) -> np.ndarray:
    return ftrl_act(list(history) + [current], reg, eta, space)


def oftl_act(history: Sequence, hint, alpha: float, space, init=None) -> np.ndarray:
    """Leader of alpha_t m_t + past losses (``hint`` may be None)."""
    items = list(history) + ([] if hint is None else [(alpha, hint)])
    return ftl_act(items, space, init)


def oftrl_act(history, hint, alpha, reg, eta, space) -> np.ndarray:
    items = list(history) + ([] if hint is None else [(alpha, hint)])
    return ftrl_act(items, reg, eta, space)


def _mirror(terms, center, gen, gamma, domain):
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    model = terms + bregman_terms(gen, center).scaled(1.0 / gamma)
    return solve_leader(model, domain, center)


def omd_act(z_prev, prev_loss, prev_alpha, gen, gamma, domain) -> np.ndarray:
    """argmin alpha_{t-1} l_{t-1} + V_{z_{t-1}} / gamma (None loss means l_0 = 0)."""
    if prev_loss is None:
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        return as_point(z_prev)
    return _mirror(_loss_terms(prev_loss).scaled(prev_alpha), z_prev, gen, gamma, domain)


def md_act(z_prev, loss, alpha, gen, gamma, domain) -> np.ndarray:
    return _mirror(_loss_terms(loss).scaled(alpha), z_prev, gen, gamma, domain)


def optmd_act(z_half, hint, grad_fn, alpha, gen, gamma, domain):
    """Return (z_t, z_{t+1/2}); ``grad_fn(z_t)`` supplies delta_t."""
    z_t = _mirror(_linear(hint).scaled(alpha), z_half, gen, gamma, domain)
    delta = as_point(grad_fn(z_t))
    z_next = _mirror(_linear(delta).scaled(alpha), z_half, gen, gamma, domain)
    return z_t, z_next


def aftl_weight(x_t, x_bar_prev, exponent: float = 2.0, tol: float = 1e-12) -> float:
    """1 / ||x_t - x_bar_{t-1}||^exponent; raises ``Converged`` below ``tol``."""
    n = float(np.linalg.norm(np.asarray(x_t) - np.asarray(x_bar_prev)))
    if n < tol:
        raise Converged(f"step norm {n:.3e} below {tol:.1e}")
    return 1.0 / n**exponent


def lazyftl_act(cache: np.ndarray, t: int, x_bar, problem):
    """Refresh component (t - 1) mod n at ``x_bar`` in place; return (y_t, i_t)."""
    n = cache.shape[0]
    if n == 0:
        raise ValueError("empty gradient cache")
    i = (t - 1) % n
    cache[i] = problem.component_grad(i, x_bar)
    return cache.sum(axis=0), i
