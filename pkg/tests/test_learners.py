import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fenchel_game.core import FenchelLoss, QuadraticLoss, Side, weighted_regret
from fenchel_game.geometry import Box, GaugeSet, L2Ball, SquaredGauge, SquaredL2, Unconstrained
from fenchel_game.learners import (
    BR,
    FTL,
    OMD,
    Converged,
    DualSpace,
    LazyFTL,
    Regularizer,
    aftl_weight,
    br_act,
    btl_act,
    btrl_act,
    ftl_act,
    ftrl_act,
    lazyftl_act,
    md_act,
    oftl_act,
    oftrl_act,
    omd_act,
    optmd_act,
)
from fenchel_game.problems import AbsSum, FiniteSumQuadratic, Quadratic

half = Quadratic(np.eye(2), np.zeros(2))


def yloss(x, p=half, w=1.0):
    return FenchelLoss(Side.Y, w, x, p)


def xloss(y, p=half, w=1.0):
    return FenchelLoss(Side.X, w, y, p)


def test_br_examples():
    np.testing.assert_allclose(br_act(yloss([2, -1]), DualSpace(half)), [2, -1])
    np.testing.assert_allclose(br_act(xloss([1, 1]), Box(-1, 1, 2)), [-1, -1])
    a = AbsSum(2)
    np.testing.assert_allclose(br_act(yloss([0.5, 0], a), DualSpace(a)), [1, 0])


def test_br_unbounded_x_side():
    with pytest.raises(ValueError):
        br_act(xloss([1, 0]), Unconstrained(2))


def test_ftl_fenchel_average():
    hist = [(1.0, yloss([0.2, 0.4]))]
    np.testing.assert_allclose(ftl_act(hist, DualSpace(half)), [0.2, 0.4])


def test_ftl_first_round_uses_initial_gradient():
    q = Quadratic.random(3, 5, seed=0)
    w0 = np.array([0.1, 0.2, 0.3])
    learner = FTL(DualSpace(q))
    learner.start(yloss(w0, q))
    np.testing.assert_allclose(learner.act(1, 1.0), q.grad(w0))


def test_ftl_generic_quadratic_mean():
    hist = [(1.0, QuadraticLoss.centered([s], 2.0)) for s in (1.0, 2.0, 3.0)]
    np.testing.assert_allclose(ftl_act(hist, Unconstrained(1)), [2.0])


def test_btl_fenchel():
    np.testing.assert_allclose(btl_act([], (1.0, yloss([1, 0])), DualSpace(half)), [1, 0])


def test_btl_regret_nonpositive(rng):
    dom = Box(-1, 1, 2)
    for _ in range(100):
        losses = [QuadraticLoss(rng.standard_normal(2), rng.uniform(0.1, 2, 2)) for _ in range(5)]
        hist = [(1.0, l) for l in losses]
        acts = [btl_act(hist[:t], hist[t], dom) for t in range(5)]
        # comparator: brute force over a grid
        g = np.linspace(-1, 1, 81)
        pts = np.array([[a, b] for a in g for b in g])
        tot = sum(pts @ l.lin + 0.5 * (pts**2) @ l.quad for l in losses)
        best = pts[int(np.argmin(tot))]
        assert weighted_regret(losses, acts, best, weights=np.ones(5)) <= 1e-9


def test_regularized_leaders():
    reg = Regularizer(SquaredL2())
    np.testing.assert_allclose(btrl_act([], (1.0, QuadraticLoss([1.0, 0.0])), reg, 1.0, Unconstrained(2)), [-1, 0])
    ball = L2Ball(1.0, 2)
    greg = Regularizer(SquaredGauge(GaugeSet(ball), 1.0))
    np.testing.assert_allclose(btrl_act([], (1.0, QuadraticLoss([-1.0, 0.0])), greg, 1.0, ball), [0.5, 0])
    np.testing.assert_allclose(ftrl_act([], reg, 0.3, Box(-1, 1, 2)), [0, 0])


def test_oftrl_specializations(rng):
    dom = Box(-1, 1, 3)
    reg = Regularizer(SquaredL2())
    hist = [(float(t + 1), QuadraticLoss(rng.standard_normal(3))) for t in range(4)]
    cur = QuadraticLoss(rng.standard_normal(3))
    np.testing.assert_allclose(oftrl_act(hist, None, 5.0, reg, 0.7, dom), ftrl_act(hist, reg, 0.7, dom))
    np.testing.assert_allclose(oftrl_act(hist, cur, 5.0, reg, 0.7, dom), btrl_act(hist, (5.0, cur), reg, 0.7, dom))
    lin = [(a, QuadraticLoss(l.lin, 0.5)) for a, l in hist]
    np.testing.assert_allclose(oftl_act(lin, QuadraticLoss(cur.lin, 0.5), 5.0, dom), btl_act(lin, (5.0, QuadraticLoss(cur.lin, 0.5)), dom))


def test_oftl_weighted_hint():
    # alpha_t = t with x_1 = (1,0) observed and hint x_2 = (0,1)
    q = Quadratic.random(2, 4, seed=3)
    y = oftl_act([(1.0, yloss([1, 0], q))], yloss([0, 1], q), 2.0, DualSpace(q))
    np.testing.assert_allclose(y, q.grad([1 / 3, 2 / 3]))
    np.testing.assert_allclose(oftl_act([], yloss([0, 1], q), 1.0, DualSpace(q)), q.grad([0, 1]))


def test_omd_first_round_stays():
    z0 = np.array([0.3, -0.2])
    np.testing.assert_array_equal(omd_act(z0, None, None, SquaredL2(), 0.5, Box(-1, 1, 2)), z0)
    learner = OMD(Box(-1, 1, 2), SquaredL2(), 0.5, z0)
    np.testing.assert_array_equal(learner.act(1, 1.0), z0)


def test_md_linear_step():
    L = 2.0
    y = np.array([0.4, -1.2])
    z = md_act([1.0, 1.0], xloss(y), 3.0, SquaredL2(), 1 / (8 * L), Unconstrained(2))
    np.testing.assert_allclose(z, np.array([1.0, 1.0]) - 3.0 / (8 * L) * y)


def test_md_projected_step():
    z = md_act([0.0, 0.0], QuadraticLoss([-3.0, -4.0]), 1.0, SquaredL2(), 1.0, L2Ball(1.0, 2))
    np.testing.assert_allclose(z, [0.6, 0.8])


def test_mirror_needs_positive_gamma():
    with pytest.raises(ValueError):
        md_act([0.0], QuadraticLoss([1.0]), 1.0, SquaredL2(), 0.0, Unconstrained(1))
    with pytest.raises(ValueError):
        OMD(Unconstrained(1), SquaredL2(), -1.0, [0.0])


def test_optmd_exact_hint_and_closed_form():
    z_half = np.array([1.0, -1.0])
    m = np.array([0.5, 0.25])
    z, nxt = optmd_act(z_half, m, lambda z: m, 2.0, SquaredL2(), 0.1, Unconstrained(2))
    np.testing.assert_allclose(z, z_half - 0.1 * 2.0 * m)
    np.testing.assert_allclose(nxt, z)


def test_optmd_two_step_hand_simulation():
    # f = x^2 / 2, gamma = 1/8, hints are previous gradients, first hint f'(1) = 1
    gen, dom, gamma = SquaredL2(), Unconstrained(1), 1 / 8
    grad = lambda z: z
    z1, h1 = optmd_act([1.0], [1.0], grad, 1.0, gen, gamma, dom)
    assert z1[0] == pytest.approx(7 / 8) and h1[0] == pytest.approx(57 / 64)
    z2, h2 = optmd_act(h1, z1, grad, 1.0, gen, gamma, dom)
    assert z2[0] == pytest.approx(25 / 32) and h2[0] == pytest.approx(203 / 256)


def test_aftl_weight_examples():
    assert aftl_weight([1.0, 0.0], [0.0, 0.0]) == pytest.approx(1.0)
    assert aftl_weight([0.5, 0.0], [0.0, 0.0]) == pytest.approx(4.0)
    with pytest.raises(Converged):
        aftl_weight([1.0, 1.0], [1.0, 1.0])


def test_lazyftl_cycle_and_hand_simulation():
    p = FiniteSumQuadratic(np.array([np.eye(2), 2 * np.eye(2)]), np.array([[1.0, 0.0], [0.0, 1.0]]))
    w0 = np.zeros(2)
    cache = np.array([p.component_grad(i, w0) for i in range(2)])
    # components: (x - b_i) A_i / 2
    x1 = np.array([1.0, 1.0])
    y, i = lazyftl_act(cache, 1, x1, p)
    assert i == 0
    np.testing.assert_allclose(y, [(1 - 1) / 2 + 0.0, (1 - 0) / 2 - 0.5])
    y, i = lazyftl_act(cache, 2, x1, p)
    assert i == 1
    np.testing.assert_allclose(y, p.grad(x1))
    assert [lazyftl_act(cache, t, x1, p)[1] for t in range(3, 8)] == [0, 1, 0, 1, 0]


def test_lazyftl_staleness_bound(rng):
    p = FiniteSumQuadratic.random(4, 3, seed=2)
    L = max(np.linalg.eigvalsh(A).max() for A in p.As)
    learner = LazyFTL(DualSpace(p))
    w0 = rng.standard_normal(3)
    learner.start(yloss(w0, p))
    refreshed = {i: w0 for i in range(4)}
    for t in range(1, 12):
        at = learner.w0 if learner.dual.avg is None else learner.dual.avg
        y = learner.act(t, 1.0)
        i = (t - 1) % 4
        refreshed[i] = at
        lhs = np.linalg.norm(y - p.grad(at))
        rhs = L / 4 * sum(np.linalg.norm(refreshed[j] - at) for j in range(4) if j != i)
        assert lhs <= rhs + 1e-12
        learner.observe(t, 1.0, yloss(rng.standard_normal(3), p))


def test_lazyftl_needs_components():
    with pytest.raises(ValueError):
        LazyFTL(DualSpace(Quadratic.random(2, 2, seed=0)))


@given(arrays(float, (4, 2), elements=st.floats(-2, 2, allow_nan=False)))
def test_br_regret_never_positive(ys):
    dom = Box(-1, 1, 2)
    losses = [QuadraticLoss(y) for y in ys]
    acts = [br_act(l, dom) for l in losses]
    for comp in ([0.0, 0.0], [1.0, -1.0], [0.3, 0.9]):
        assert weighted_regret(losses, acts, comp, weights=np.ones(4)) <= 1e-12


@given(arrays(float, (6, 2), elements=st.floats(-2, 2, allow_nan=False)))
def test_ftl_on_dual_matches_gradient_of_average(xs):
    q = Quadratic.random(2, 3, seed=0)
    hist = [(float(t + 1), yloss(x, q)) for t, x in enumerate(xs)]
    avg = (np.arange(1, 7)[:, None] * xs).sum(axis=0) / 21
    np.testing.assert_allclose(ftl_act(hist, DualSpace(q)), q.grad(avg), atol=1e-10)


def test_br_learner_needs_loss():
    with pytest.raises(ValueError):
        BR(Box(-1, 1, 2)).act(1, 1.0)
