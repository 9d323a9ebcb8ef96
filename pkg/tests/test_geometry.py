import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fenchel_game.geometry import (
    Box,
    Entropy,
    GaugeSet,
    L1Term,
    L2Ball,
    LpBall,
    Simplex,
    SquaredGauge,
    SquaredL2,
    SquaredL2Term,
    Unconstrained,
    ZeroTerm,
    bregman,
    gauge_reg_argmin,
    lmo,
    project,
    prox,
)

vec2 = arrays(float, 2, elements=st.floats(-5, 5, allow_nan=False))
vec3 = arrays(float, 3, elements=st.floats(-5, 5, allow_nan=False))


def test_box_lmo_signwise():
    np.testing.assert_array_equal(lmo(Box(-1, 1, 2), [1, -2]), [-1, 1])


def test_l2ball_lmo():
    np.testing.assert_allclose(lmo(L2Ball(2, 2), [3, 4]), [-6 / 5, -8 / 5], atol=1e-15)


def test_lpball_lmo_against_boundary_grid():
    ball = LpBall(1.5, 1.0, 2)
    x = lmo(ball, [1, 1])
    assert x[0] == pytest.approx(x[1]) and x[0] < 0
    assert ball.norm(x) == pytest.approx(1.0)
    th = np.linspace(0, 2 * math.pi, 6284)
    pts = np.c_[np.cos(th), np.sin(th)]
    pts /= (np.abs(pts) ** 1.5).sum(axis=1, keepdims=True) ** (1 / 1.5)
    assert float(np.sum(x)) <= float(np.min(pts.sum(axis=1))) + 1e-6


def test_lmo_unbounded_raises():
    with pytest.raises(ValueError, match="unbounded"):
        lmo(Unconstrained(2), [1, 0])


def test_lmo_tie_breaks():
    box = Box(-1, 1, 3)
    # zero coordinate goes to the lower bound
    np.testing.assert_array_equal(box.lmo([1, 0, -1]), [-1, -1, 1])
    prev = np.array([0.2, 0.3, 0.4])
    np.testing.assert_array_equal(box.lmo([0, 0, 0], prev), prev)


def test_projection_examples():
    np.testing.assert_allclose(project(L2Ball(1, 2), [3, 4]), [0.6, 0.8])
    np.testing.assert_allclose(project(Box(0, 1, 2), [-0.5, 2]), [0, 1])
    np.testing.assert_allclose(project(Simplex(3), [0.5, 0.5, 0.5]), [1 / 3] * 3)


def _grid_projection(dom, v, step=1e-3):
    g = np.arange(-2, 2 + step, step)
    X, Y = np.meshgrid(g, g)
    pts = np.c_[X.ravel(), Y.ravel()]
    if isinstance(dom, LpBall):
        inside = (np.abs(pts) ** dom.p).sum(axis=1) <= dom.r**dom.p
    else:
        inside = np.hypot(pts[:, 0], pts[:, 1]) <= dom.r
    cand = pts[inside]
    return cand[np.argmin(((cand - v) ** 2).sum(axis=1))]


@pytest.mark.parametrize("dom", [L2Ball(1.0, 2), LpBall(1.5, 1.0, 2)])
def test_projection_against_grid(dom):
    for v in ([1.5, 0.7], [-0.3, 1.9], [1.2, -1.2]):
        x = project(dom, v)
        ref = _grid_projection(dom, np.array(v))
        assert dom.contains(x, tol=1e-12)
        assert np.linalg.norm(x - v) <= np.linalg.norm(ref - v) + 1e-9


@given(vec3)
def test_simplex_projection_kkt(v):
    x = Simplex(3).project(v)
    assert x.sum() == pytest.approx(1.0) and np.all(x >= 0)
    # KKT: v - x = theta on the support, <= theta off it
    supp = x > 1e-12
    theta = (v - x)[supp][0]
    np.testing.assert_allclose((v - x)[supp], theta, atol=1e-9)
    assert np.all((v - x)[~supp] <= theta + 1e-9)


@given(vec2, vec2)
def test_lmo_minimizes_over_vertices(d, other):
    box = Box(-1, 1, 2)
    x = box.lmo(d)
    v = np.clip(other, -1, 1)
    assert float(d @ x) <= float(d @ v) + 1e-12


@given(vec2)
def test_projection_idempotent(v):
    for dom in (Box(-1, 1, 2), L2Ball(1.0, 2), LpBall(1.5, 1.0, 2)):
        x = dom.project(v)
        assert dom.contains(x, tol=1e-9)
        np.testing.assert_allclose(dom.project(x), x, atol=1e-9)


def test_bregman_examples():
    assert bregman(SquaredL2(), [0, 0], [1, 1]) == pytest.approx(1.0)
    z = np.array([0.3, 0.7])
    for gen in (SquaredL2(), Entropy()):
        assert bregman(gen, z, z) == pytest.approx(0.0, abs=1e-15)
    assert bregman(Entropy(), [0.5, 0.5], [0.75, 0.25]) == pytest.approx(0.13081, abs=1e-5)


def test_entropy_rejects_nonpositive():
    with pytest.raises(ValueError):
        bregman(Entropy(), [1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        bregman(Entropy(), [0.5, 0.5], [1.5, -0.5])
    # boundary points are fine as the second argument (0 log 0 = 0)
    assert bregman(Entropy(), [0.5, 0.5], [1.0, 0.0]) == pytest.approx(math.log(2))


@given(vec2, vec2)
def test_bregman_nonnegative(a, b):
    assert bregman(SquaredL2(), a, b) >= 0


def test_gauge_reg_argmin_examples():
    g = GaugeSet(L2Ball(1.0, 2))
    out = gauge_reg_argmin(g, [-1, 0], 1.0)
    np.testing.assert_allclose(out.boundary_point, [1, 0])
    assert out.rho == pytest.approx(0.5)
    np.testing.assert_allclose(out.point, [0.5, 0])
    np.testing.assert_allclose(gauge_reg_argmin(g, [-10, 0], 1.0).point, [1, 0])
    zero = gauge_reg_argmin(g, [0, 0], 1.0)
    assert zero.degenerate and not np.any(zero.point)


def test_gauge_reg_argmin_matches_grid():
    g = GaugeSet(L2Ball(1.0, 2))
    zeta = np.array([-1.0, 0.0])
    t = np.linspace(-1, 1, 401)
    X, Y = np.meshgrid(t, t)
    pts = np.c_[X.ravel(), Y.ravel()]
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) <= 1]
    vals = pts @ zeta + (pts**2).sum(axis=1)
    best = pts[np.argmin(vals)]
    np.testing.assert_allclose(gauge_reg_argmin(g, zeta).point, best, atol=5e-3)


def test_gauge_values():
    g = GaugeSet(L2Ball(2.0, 2))
    assert g.gauge([0.5, 0]) < 1
    assert g.gauge([0, 2.0]) == pytest.approx(1.0)
    assert g.gauge([3.0, 0]) > 1
    assert SquaredGauge(g).value([1.0, 0]) == pytest.approx(0.25)


def test_prox_examples():
    v = np.array([2.0, -0.3])
    np.testing.assert_array_equal(prox(ZeroTerm(), 0.7, v), v)
    np.testing.assert_allclose(prox(L1Term(1.0), 0.5, v), [1.5, 0.0])
    np.testing.assert_allclose(prox(SquaredL2Term(1.0), 1.0, [2.0, 0.0]), [1.0, 0.0])


@given(vec2, st.floats(0.01, 5))
def test_prox_optimality(v, lam):
    # prox point minimizes lam * psi(x) + 1/2 ||x - v||^2 against nearby points
    psi = L1Term(0.7)
    x = prox(psi, lam, v)
    obj = lambda z: lam * psi.value(z) + 0.5 * float(np.sum((z - v) ** 2))
    for e in (np.array([1e-4, 0]), np.array([0, 1e-4]), np.array([-1e-4, 1e-4])):
        assert obj(x) <= obj(x + e) + 1e-12


def test_strongly_convex_set_lipschitz(rng):
    ball = L2Ball(1.5, 3)
    for _ in range(200):
        p, q = rng.standard_normal(3), rng.standard_normal(3)
        lhs = np.linalg.norm(ball.lmo(p) - ball.lmo(q))
        rhs = 2 * np.linalg.norm(p - q) / (ball.lam * (np.linalg.norm(p) + np.linalg.norm(q)))
        assert lhs <= rhs + 1e-12


def test_diameter_sq():
    assert Box(-1, 1, 10).diameter_sq == 40.0
    assert L2Ball(2.0, 3).diameter_sq == 16.0
