"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test is named ``test_criterion_NN_*``; the conftest hook prints a
``criterion N: PASS/FAIL`` line per criterion in the terminal summary.
"""
import copy
import math

import numpy as np
import pytest

from fenchel_game.core import WeightSchedule
from fenchel_game.dynamics import GameSpec, Order, equilibrium_gap, run_dynamic
from fenchel_game.geometry import Box, GaugeSet, L2Ball, SquaredL2, Unconstrained
from fenchel_game.learners import (
    BR, BTL, BTRL, FTL, FTRL, MD, OFTL, OFTRL, OMD, DualSpace, OptimisticMD, Regularizer,
)
from fenchel_game.optimizers import (
    accelerated_linear,
    adaptive_frank_wolfe,
    boundary_fw,
    cumulative_gd,
    frank_wolfe,
    gauge_fw_strongly_convex,
    gd_averaging,
    incremental_frank_wolfe,
    run_optimizer,
    single_call_extragradient,
)
from fenchel_game.problems import (
    AbsSum, FiniteSumQuadratic, Lasso, LeastSquares, Linear, LogSumExp, Quadratic, counted, shifted_problem,
)
from fenchel_game.verify import (
    certify_regret_bounds,
    certify_trace,
    equivalence_pair,
    fenchel_young_check,
    finite_diff_check,
    fit_rate,
    gradient_gap_check,
    learner_constants,
    matching_game,
)

D = 10


def along_ones(r, d=D):
    return r * np.ones(d) / math.sqrt(d)


def gaps_at(run, p, f_star, Ts):
    return [(T, p.value(run.iterates[T - 1]) - f_star) for T in Ts]


# --- 1 ---------------------------------------------------------------------

_q1 = Quadratic.random(D, 100, seed=1, x_star=along_ones(3))
_box, _ball, _unc = Box(-1, 1, D), L2Ball(1.0, D), Unconstrained(D)
_w0 = np.linspace(-0.5, 0.7, D)
EQUIV = [
    ("frank_wolfe", _q1, _box, _w0, {}),
    ("heavy_ball", _q1, _box, _w0, {}),
    ("nesterov_1mem", _q1, _ball, _w0, {}),
    ("nesterov_infmem", _q1, _ball, _w0, {}),
    ("accelerated_proximal", Lasso.planted(30, D, c=0.1, seed=3), _unc, _w0, {}),
    ("accelerated_linear", _q1, _ball, _w0, {}),
    ("boundary_fw", Linear(np.arange(1, D + 1.0)), _ball, _ball.lmo(np.ones(D)), {}),
    ("gauge_fw_smooth", _q1, _ball, np.zeros(D), {}),
    ("single_call_extragradient", _q1, _unc, _w0, {}),
    ("optimistic_md_averaging", _q1, _ball, _w0, {}),
    ("gd_averaging", _q1, _box, _w0, {}),
    ("cumulative_gd", _q1, _box, _w0, {"eta": 0.01}),
    ("incremental_frank_wolfe", FiniteSumQuadratic.random(20, D, seed=2, scale=3), _box, _w0, {}),
]


@pytest.mark.parametrize("name,p,dom,w0,kw", EQUIV, ids=[c[0] for c in EQUIV])
def test_criterion_01_equivalence(name, p, dom, w0, kw):
    run, trace, rep = equivalence_pair(name, p, dom, w0, 200, **kw)
    assert run.T == len(trace) == 200
    assert rep.max_deviation <= 1e-10


# --- 2 ---------------------------------------------------------------------


def test_criterion_02_frank_wolfe_box():
    q = Quadratic(np.eye(D), np.zeros(D))
    run = frank_wolfe(q, _box, np.linspace(-0.9, 0.95, D), 1000)
    g = np.array([q.value(w) for w in run.iterates])
    L, diam = 1.0, 40.0
    assert all(g[T - 1] <= 8 * L * diam / (T + 1) for T in range(1, 1001))
    Ts = sorted({int(t) for t in np.round(np.geomspace(8, 1000, 20))})
    fit = fit_rate([(T, g[T - 1]) for T in Ts])
    assert -1.3 <= fit.slope <= -0.8, f"slope {fit.slope:.4f}"


# --- 3 ---------------------------------------------------------------------

T3 = [4 * 2**k for k in range(9)]


@pytest.mark.parametrize("name", ["nesterov_1mem", "nesterov_infmem", "optimistic_md_averaging", "gauge_fw_smooth"])
def test_criterion_03_accelerated_rates(name):
    q = Quadratic.random(D, 100, seed=1, x_star=along_ones(3))
    x_star, f_star = q.minimum(_ball)
    w0 = np.zeros(D)
    run = run_optimizer(name, q, _ball, w0, 1024)
    g = gaps_at(run, q, f_star, T3)
    bound = 8 * q.L * 0.5 * float(np.sum((x_star - w0) ** 2))
    assert all(v <= bound / T**2 for T, v in g)
    assert -2.3 <= fit_rate(g).slope <= -1.8


def test_criterion_03_accelerated_proximal():
    las = Lasso.planted(30, D, c=0.1, seed=3)
    x_star, f_star = las.minimum()
    run = run_optimizer("accelerated_proximal", las, _unc, np.zeros(D), 1024)
    g = gaps_at(run, las, f_star, T3)
    bound = 8 * las.L * 0.5 * float(np.sum(x_star**2))
    assert all(v <= bound / T**2 for T, v in g)
    assert -2.3 <= fit_rate(g).slope <= -1.8


# --- 4 ---------------------------------------------------------------------


@pytest.mark.parametrize("method", ["gd_averaging", "cumulative_gd"])
def test_criterion_04_nonsmooth(method):
    a = AbsSum(D)
    w0 = np.linspace(-0.9, 0.95, D)
    pts = []
    for T in [2**k for k in range(4, 14)]:
        if method == "gd_averaging":
            run = gd_averaging(a, _box, w0, T, mode="nonsmooth")
        else:
            run = cumulative_gd(a, _box, w0, T)
        pts.append((T, a.value(run.output)))
    assert -0.65 <= fit_rate(pts).slope <= -0.35


# --- 5, 6 ------------------------------------------------------------------

_q5 = Quadratic.random(D, 100, seed=4, scale=3)


def test_criterion_05_smooth_gd_averaging():
    x_star, f_star = _q5.minimum()
    w0 = np.zeros(D)
    run = gd_averaging(_q5, _unc, w0, 1024, mode="smooth")
    c = 2 * _q5.L * float(np.sum((w0 - x_star) ** 2))
    assert all(_q5.value(run.iterates[T - 1]) - f_star <= c / T for T in range(1, 1025))


def test_criterion_06_extragradient():
    x_star, f_star = _q5.minimum()
    w0 = np.zeros(D)
    run = single_call_extragradient(_q5, _unc, SquaredL2(), w0, 1024)
    g0 = _q5.grad(w0)
    c = 8 * _q5.L * 0.5 * float(np.sum((x_star - w0) ** 2)) + float(g0 @ g0) / (8 * _q5.L)
    assert all(_q5.value(run.iterates[T - 1]) - f_star <= c / T for T in range(1, 1025))


# --- 7 ---------------------------------------------------------------------


@pytest.mark.parametrize("kappa", [10, 100])
@pytest.mark.parametrize("method", ["accelerated_linear", "gauge_fw_strongly_convex"])
def test_criterion_07_linear_rates(method, kappa):
    q = Quadratic.random(D, kappa, seed=0, x_star=along_ones(0.5))
    _, f_star = q.minimum(_ball)
    T = int(30 / (0.5 * math.sqrt(1 / (2 * kappa))))
    if method == "accelerated_linear":
        run = accelerated_linear(q, _ball, SquaredL2(), T)
    else:
        run = gauge_fw_strongly_convex(q, GaugeSet(_ball), T)
    fit = fit_rate([(t, q.value(w) - f_star) for t, w in enumerate(run.iterates, 1)], "exponential")
    assert fit.slope <= -0.8 * run.aux["exponent"]
    assert fit.r2 >= 0.98


def test_criterion_07_adaptive_fw():
    q = Quadratic.random(D, 10, seed=2, x_star=along_ones(3))
    _, f_star = q.minimum(_ball)
    run = adaptive_frank_wolfe(q, _ball, np.zeros(D), 300)
    fit = fit_rate([(t, q.value(w) - f_star) for t, w in enumerate(run.iterates, 1)], "exponential")
    assert fit.r2 >= 0.95


# --- 8, 9 ------------------------------------------------------------------


def test_criterion_08_boundary_fw():
    lin = Linear(np.ones(D))
    _, f_star = lin.minimum(_ball)
    run = boundary_fw(lin, _ball, np.zeros(D), 4096)
    v = [(lin.value(run.iterates[T - 1]) - f_star) * T / math.log(T) for T in (16, 64, 256, 1024, 4096)]
    assert max(v[1:]) <= v[0]
    assert run.aux["L_T"] > 0


def test_criterion_09_incremental_fw():
    n = 20
    fs = FiniteSumQuadratic.random(n, D, seed=0, x_star=along_ones(3))
    _, f_star = fs.minimum(_ball)
    cp = counted(fs)
    T = 8192
    run = incremental_frank_wolfe(cp, _ball, np.zeros(D), T)
    v = [(fs.value(run.iterates[t - 1]) - f_star) * t / math.log(t) for t in (64, 128, 512, 2048, 8192)]
    assert max(v[1:]) <= v[0]
    # n calls fill the gradient cache once, then one component gradient per round
    assert cp.component_calls == n + T and cp.grad_calls == 0


# --- 10 --------------------------------------------------------------------

MATCHED = [
    ("frank_wolfe", "box"), ("heavy_ball", "box"), ("nesterov_1mem", "ball"), ("nesterov_infmem", "ball"),
    ("gd_averaging", "box"), ("cumulative_gd", "box"), ("single_call_extragradient", "unc"),
    ("optimistic_md_averaging", "ball"), ("accelerated_linear", "ball"), ("gauge_fw_smooth", "ball"),
]


def _perturbed(trace, t, player, eps=1e-3):
    out = copy.copy(trace)
    out.rounds = list(trace.rounds)
    r = out.rounds[t]
    z = np.array(getattr(r, player), dtype=float)
    z[0] += eps
    out.rounds[t] = r._replace(**{player: z})
    return out


def _suite(seed, d=4):
    q = Quadratic.random(d, 10, seed=seed, x_star=along_ones(2, d))
    doms = {"box": Box(-1, 1, d), "ball": L2Ball(1.0, d), "unc": Unconstrained(d)}
    for name, dk in MATCHED:
        w0 = 0.3 * np.ones(d) if name == "frank_wolfe" else np.zeros(d)
        kw = {"eta": 0.05} if name == "cumulative_gd" else {}
        run = run_optimizer(name, q, doms[dk], w0, 30, **kw)
        yield matching_game(run, q, doms[dk]), q
    B = doms["ball"]
    w = WeightSchedule.linear()
    yield GameSpec(q, B, BR(DualSpace()), FTRL(B, Regularizer(SquaredL2()), 0.5), 20, w, Order.X_FIRST, None, np.zeros(d)), q
    yield GameSpec(q, B, BR(DualSpace()), OFTRL(B, Regularizer(SquaredL2()), 0.5), 20, w, Order.X_FIRST, None, np.zeros(d)), q
    yield GameSpec(q, B, BR(DualSpace()), OFTL(B), 20, WeightSchedule.uniform(), Order.X_FIRST, None, np.zeros(d)), q
    lin = Linear(np.random.default_rng(seed).standard_normal(d))
    yield matching_game(run_optimizer("boundary_fw", lin, B, np.zeros(d), 30), lin, B), lin


def test_criterion_10_regret_certification():
    failures, missed = [], []
    for seed in range(50):
        for spec, p in _suite(seed):
            trace = run_dynamic(spec)
            for player, rep in certify_trace(trace).items():
                if not rep.passed:
                    failures.append((seed, spec.x_learner.name, player, rep.regret, rep.bound))
                learner = spec.x_learner if player == "x" else spec.y_learner
                gp = spec.payoff.game_problem(spec.problem)
                bad = _perturbed(trace, len(trace.rounds) // 2, player)
                if certify_regret_bounds(bad, rep.learner, learner_constants(learner, gp), player).passed:
                    missed.append((seed, spec.x_learner.name, player))
    assert not failures
    assert not missed


# --- 11 --------------------------------------------------------------------


def random_spec(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    T = int(rng.integers(1, 11))
    kind = rng.integers(3)
    if kind == 0:
        p = Quadratic.random(d, float(rng.uniform(1, 20)), seed=seed, scale=float(rng.uniform(0.2, 3)))
    elif kind == 1:
        p = Quadratic(np.eye(d) * rng.uniform(0.5, 2), rng.standard_normal(d))
    else:
        p = LogSumExp.random(d, seed=seed)
    dk = int(rng.integers(3))
    dom = [Box(-1, 1, d), L2Ball(float(rng.uniform(0.5, 2)), d), Unconstrained(d)][dk]
    x0 = dom.project(rng.standard_normal(d)) if dk < 2 else rng.standard_normal(d)
    w = [WeightSchedule.uniform(), WeightSchedule.linear()][rng.integers(2)]
    gamma = float(rng.uniform(0.05, 1.0)) / p.L
    reg = Regularizer(SquaredL2())
    if rng.integers(2) == 0:
        y = [FTL, OFTL][rng.integers(2)](DualSpace())
        opts = [lambda: MD(dom, SquaredL2(), gamma, x0), lambda: BTRL(dom, reg, gamma)]
        if dom.bounded:
            opts.append(lambda: BR(dom))
        x = opts[rng.integers(len(opts))]()
        order = Order.Y_FIRST
    else:
        opts = [
            lambda: OMD(dom, SquaredL2(), gamma, x0, seeded=bool(rng.integers(2))),
            lambda: OptimisticMD(dom, SquaredL2(), gamma, x0),
            lambda: FTRL(dom, reg, gamma),
            lambda: OFTRL(dom, reg, gamma),
        ]
        x = opts[rng.integers(len(opts))]()
        y = [BR, BTL][rng.integers(2)](DualSpace())
        order = Order.X_FIRST
    return GameSpec(p, dom, y, x, T, w, order, None, x0)


def test_criterion_11_equilibrium_contract():
    violations = []
    for seed in range(500):
        g = equilibrium_gap(run_dynamic(random_spec(seed)))
        if not g.primal_gap <= g.regret_sum + 1e-9:
            violations.append((seed, g))
    assert not violations


# --- 12 --------------------------------------------------------------------


def _catalog(d=5):
    rng = np.random.default_rng(0)
    return {
        "quadratic": Quadratic.random(d, 50, seed=1),
        "least_squares": LeastSquares(rng.standard_normal((8, d)), rng.standard_normal(8)),
        "logsumexp": LogSumExp.random(d, seed=2),
        "abs_sum": AbsSum(d),
        "linear": Linear(rng.standard_normal(d)),
        "lasso_smooth_part": Lasso.planted(15, d, seed=3).smooth_part,
        "finite_sum": FiniteSumQuadratic.random(6, d, seed=4),
        "shifted": shifted_problem(Quadratic.random(d, 10, seed=5), SquaredL2(), 0.5),
    }


@pytest.mark.parametrize("key", list(_catalog()))
def test_criterion_12_oracles(key):
    p = _catalog()[key]
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = rng.standard_normal(p.dim)
        fd = finite_diff_check(p, x)
        assert fd.kink or fd.error <= 1e-6
        eq, worst = fenchel_young_check(p, x, [rng.standard_normal(p.dim) for _ in range(5)])
        assert eq <= 1e-9 and worst <= 1e-9
        if p.smooth and getattr(p, "L", 0) > 0 and key not in ("linear",):
            assert gradient_gap_check(p, x) <= 1e-9 * max(1.0, p.L)
