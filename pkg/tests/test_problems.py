import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fenchel_game.geometry import Box, L2Ball, SquaredL2, Unconstrained
from fenchel_game.problems import (
    AbsSum,
    FiniteSumQuadratic,
    Lasso,
    LeastSquares,
    Linear,
    LogSumExp,
    OracleUnavailable,
    Quadratic,
    conjugate_value,
    counted,
    shifted_problem,
)
from fenchel_game.verify import fenchel_young_check, finite_diff_check, gradient_gap_check

vec3 = arrays(float, 3, elements=st.floats(-3, 3, allow_nan=False))


def catalog():
    rng = np.random.default_rng(7)
    d = 5
    return {
        "quadratic": Quadratic.random(d, 50, seed=1),
        "least_squares": LeastSquares(rng.standard_normal((8, d)), rng.standard_normal(8)),
        "logsumexp": LogSumExp.random(d, seed=2),
        "abs_sum": AbsSum(d),
        "linear": Linear(rng.standard_normal(d)),
        "lasso_smooth": Lasso.planted(15, d, seed=3).smooth_part,
        "finite_sum": FiniteSumQuadratic.random(6, d, seed=4),
        "shifted": shifted_problem(Quadratic.random(d, 10, seed=5), SquaredL2(), 0.5),
    }


def test_shift_cancels_exactly():
    p = Quadratic(np.eye(2), np.zeros(2))
    s = shifted_problem(p, SquaredL2(), 1.0)
    np.testing.assert_array_equal(s.grad([1.5, -2.0]), [0, 0])
    assert s.value([1.5, -2.0]) == 0.0


def test_shift_diagonal():
    s = shifted_problem(Quadratic(np.diag([2.0, 3.0]), np.zeros(2)), SquaredL2(), 2.0)
    np.testing.assert_allclose(s.grad([0.7, -1.1]), [0.0, -1.1])


def test_shift_zero_is_identity():
    p = Quadratic.random(3, 5, seed=0)
    assert shifted_problem(p, SquaredL2(), 0.0) is p


def test_shift_too_large():
    with pytest.raises(ValueError, match="insufficient strong convexity"):
        shifted_problem(Quadratic(np.diag([1.0, 3.0]), np.zeros(2)), SquaredL2(), 1.5)


def test_conjugate_examples():
    assert conjugate_value(Quadratic(np.eye(2), np.zeros(2)), [1, 2]) == pytest.approx(2.5)
    assert conjugate_value(Quadratic(np.diag([2.0, 2.0]), np.zeros(2)), [2, 0]) == pytest.approx(1.0)
    assert conjugate_value(AbsSum(2), [0.5, -1]) == 0.0
    assert conjugate_value(AbsSum(2), [1.5, 0]) == math.inf


@pytest.mark.parametrize("name", list(catalog()))
def test_finite_differences(name):
    p = catalog()[name]
    rng = np.random.default_rng(0)
    for _ in range(5):
        res = finite_diff_check(p, rng.standard_normal(p.dim))
        assert res.kink or res.error <= 1e-7


@pytest.mark.parametrize("name", list(catalog()))
def test_fenchel_young(name):
    p = catalog()[name]
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = rng.standard_normal(p.dim)
        ys = [rng.standard_normal(p.dim) for _ in range(5)]
        if name == "linear":
            ys.append(p.cvec.copy())
        eq, worst = fenchel_young_check(p, x, ys)
        assert eq <= 1e-9
        assert worst <= 1e-9


@pytest.mark.parametrize("name", ["quadratic", "least_squares", "logsumexp", "lasso_smooth", "finite_sum", "shifted"])
def test_smoothness_spot_check(name):
    p = catalog()[name]
    rng = np.random.default_rng(2)
    for _ in range(10):
        assert gradient_gap_check(p, 3 * rng.standard_normal(p.dim)) <= 1e-9


def test_abs_sum_kink_flagged():
    res = finite_diff_check(AbsSum(2), [0.0, 1.0])
    assert res.kink and math.isnan(res.error)


def test_zero_function_fd():
    assert finite_diff_check(Linear(np.zeros(3)), [1.0, 2.0, 3.0]).error == 0.0


def test_quadratic_trust_region_minimum():
    q = Quadratic.random(4, 10, seed=3, x_star=3 * np.ones(4) / 2)
    x, f = q.minimum(L2Ball(1.0, 4))
    assert np.linalg.norm(x) == pytest.approx(1.0)
    # KKT: gradient is a nonpositive multiple of x
    g = q.grad(x)
    assert float(g @ x) < 0
    np.testing.assert_allclose(g / np.linalg.norm(g), -x, atol=1e-8)


def test_lasso_planted_minimum():
    p = Lasso.planted(30, 10, c=0.1, seed=3)
    x, f = p.minimum()
    g = p.grad(x)
    on = x != 0
    np.testing.assert_allclose(g[on], -0.1 * np.sign(x[on]), atol=1e-10)
    assert np.all(np.abs(g[~on]) <= 0.1 + 1e-12)
    with pytest.raises(OracleUnavailable):
        p.minimum(Box(-1, 1, 10))


def test_finite_sum_components_add_up():
    p = FiniteSumQuadratic.random(7, 3, seed=0)
    x = np.array([0.3, -1.0, 2.0])
    np.testing.assert_allclose(sum(p.component_grad(i, x) for i in range(7)), p.grad(x), atol=1e-12)


def test_counted_problem():
    p = counted(FiniteSumQuadratic.random(3, 2, seed=0))
    p.grad([0, 0])
    p.component_grad(1, [0, 0])
    p.value([0, 0])
    assert (p.grad_calls, p.component_calls, p.value_calls) == (1, 1, 1)
    assert counted(p) is p


def test_logsumexp_minimum_is_stationary():
    p = LogSumExp.random(4, seed=5)
    x, _ = p.minimum(Unconstrained(4))
    assert np.linalg.norm(p.grad(x)) < 1e-10


@given(vec3, vec3)
def test_quadratic_convexity(a, b):
    p = Quadratic.random(3, 20, seed=0)
    lhs = p.value(0.5 * (a + b))
    assert lhs <= 0.5 * (p.value(a) + p.value(b)) + 1e-9 * (1 + abs(lhs))


@given(vec3)
def test_fenchel_young_inequality(y):
    p = Quadratic.random(3, 20, seed=1)
    x = np.array([0.5, -0.2, 1.0])
    assert p.value(x) + p.conjugate(y) >= float(x @ y) - 1e-9
