import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nambupoisson.errors import DomainError, NonDifferentiableError, SingularEvaluationError
from nambupoisson.jets import Jet1, jet_arith, jet_const, jet_func, jet_var, lift_gradient

from conftest import fd_gradient


def test_jet_var_seeds():
    j = jet_var(0, 1.0, 4)
    assert j.value == 1.0
    assert j.grad.tolist() == [1, 0, 0, 0]
    assert not j.hess.any()
    j = jet_var(3, -2.5, 4)
    assert j.value == -2.5
    assert j.grad.tolist() == [0, 0, 0, 1]


def test_jet_var_out_of_range():
    with pytest.raises(DomainError):
        jet_var(4, 1.0, 4)
    with pytest.raises(DomainError):
        jet_var(-1, 1.0, 4)


def test_square():
    x = jet_var(0, 3.0, 1)
    r = jet_arith("mul", x, x)
    assert (r.value, r.grad[0], r.hess[0, 0]) == (9.0, 6.0, 2.0)


def test_add():
    x, y = jet_var(0, 1.0, 2), jet_var(1, 2.0, 2)
    r = jet_arith("add", x, y)
    assert r.value == 3.0
    assert r.grad.tolist() == [1.0, 1.0]
    assert not r.hess.any()


def test_div_matches_finite_differences():
    # oracle: central differences of f = x/y and of its analytic gradient
    f = lambda p: p[0] / p[1]
    grad_f = lambda p: np.array([1 / p[1], -p[0] / p[1] ** 2])
    p = np.array([1.0, 2.0])
    fd_g = fd_gradient(f, p)
    fd_h = np.stack([fd_gradient(lambda q: grad_f(q)[i], p) for i in range(2)])
    np.testing.assert_allclose(fd_g, [0.5, -0.25], atol=1e-9)
    np.testing.assert_allclose(fd_h, [[0, -0.25], [-0.25, 0.25]], atol=1e-9)

    r = jet_arith("div", jet_var(0, 1.0, 2), jet_var(1, 2.0, 2))
    assert r.value == 0.5
    np.testing.assert_allclose(r.grad, [0.5, -0.25], rtol=1e-15)
    np.testing.assert_allclose(r.hess, [[0, -0.25], [-0.25, 0.25]], rtol=1e-15)


def test_div_by_zero_value():
    with pytest.raises(SingularEvaluationError):
        jet_arith("div", jet_var(0, 1.0, 2), jet_var(1, 0.0, 2))


def test_dim_mismatch():
    with pytest.raises(DomainError):
        jet_arith("add", jet_var(0, 1.0, 2), jet_var(0, 1.0, 3))


def test_atan_at_two():
    # f'' = -2v/(1+v^2)^2 = -4/25
    r = jet_func("atan", jet_var(0, 2.0, 1))
    assert r.value == pytest.approx(1.10714872, abs=1e-8)
    assert r.grad[0] == pytest.approx(0.2, rel=1e-14)
    assert r.hess[0, 0] == pytest.approx(-0.16, rel=1e-14)
    fd2 = (math.atan(2 + 1e-4) - 2 * math.atan(2) + math.atan(2 - 1e-4)) / 1e-8
    assert fd2 == pytest.approx(-0.16, rel=1e-5)


def test_sqrt_at_four():
    r = jet_func("sqrt", jet_var(0, 4.0, 1))
    assert (r.value, r.grad[0], r.hess[0, 0]) == (2.0, 0.25, -0.03125)


def test_exp_at_zero():
    r = jet_func("exp", jet_var(0, 0.0, 1))
    assert (r.value, r.grad[0], r.hess[0, 0]) == (1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "name,value",
    [("sqrt", -1.0), ("log", 0.0), ("log", -2.0)],
)
def test_domain_violations(name, value):
    with pytest.raises(SingularEvaluationError):
        jet_func(name, jet_var(0, value, 1))


def test_abs_kink():
    with pytest.raises(NonDifferentiableError):
        jet_func("abs", jet_var(0, 0.0, 1))
    assert jet_func("abs", jet_var(0, -3.0, 1)).grad[0] == -1.0


def test_atan2_arity_and_origin():
    with pytest.raises(DomainError):
        jet_func("atan2", jet_var(0, 1.0, 1))
    with pytest.raises(SingularEvaluationError):
        jet_func("atan2", jet_const(0.0, 1), jet_const(0.0, 1))


def test_constants_have_no_derivatives():
    c = jet_const(3.5, 3)
    r = jet_func("sin", c) * c + c
    assert not r.grad.any() and not r.hess.any()


def _two_var(name):
    funcs = {
        "sin": (lambda a, b: jet_func("sin", a * b), lambda p: math.sin(p[0] * p[1])),
        "cos": (lambda a, b: jet_func("cos", a - b), lambda p: math.cos(p[0] - p[1])),
        "tan": (lambda a, b: jet_func("tan", a * 0.3 + b * 0.2), lambda p: math.tan(0.3 * p[0] + 0.2 * p[1])),
        "atan": (lambda a, b: jet_func("atan", a / (b * b + 1)), lambda p: math.atan(p[0] / (p[1] ** 2 + 1))),
        "atan2": (lambda a, b: jet_func("atan2", a, b * b + 0.5), lambda p: math.atan2(p[0], p[1] ** 2 + 0.5)),
        "sqrt": (lambda a, b: jet_func("sqrt", a * a + b * b + 1), lambda p: math.sqrt(p[0] ** 2 + p[1] ** 2 + 1)),
        "exp": (lambda a, b: jet_func("exp", a * b * 0.5), lambda p: math.exp(0.5 * p[0] * p[1])),
        "log": (lambda a, b: jet_func("log", a * a + b * b + 0.5), lambda p: math.log(p[0] ** 2 + p[1] ** 2 + 0.5)),
        "abs": (lambda a, b: jet_func("abs", a * b + 3.0), lambda p: abs(p[0] * p[1] + 3.0)),
        "pow": (
            lambda a, b: jet_func("pow", a * a + b * b + 0.2, exponent=1.7),
            lambda p: (p[0] ** 2 + p[1] ** 2 + 0.2) ** 1.7,
        ),
        "div": (lambda a, b: (a + 2.0) / (b * b + 1), lambda p: (p[0] + 2) / (p[1] ** 2 + 1)),
    }
    return funcs[name]


@pytest.mark.parametrize("name", ["sin", "cos", "tan", "atan", "atan2", "sqrt", "exp", "log", "abs", "pow", "div"])
@settings(max_examples=40, deadline=None)
@given(
    x=st.floats(-1.5, 1.5, allow_nan=False),
    y=st.floats(-1.5, 1.5, allow_nan=False),
)
def test_functions_match_finite_differences(name, x, y):
    jet_f, plain_f = _two_var(name)
    p = np.array([x, y])

    def jet_at(q):
        return jet_f(jet_var(0, q[0], 2), jet_var(1, q[1], 2))

    j = jet_at(p)
    assert j.value == pytest.approx(plain_f(p), rel=1e-14, abs=1e-14)
    g_fd = fd_gradient(plain_f, p)
    h_fd = np.stack([fd_gradient(lambda q: jet_at(q).grad[i], p) for i in range(2)])
    g_scale = max(np.max(np.abs(j.grad)), 1e-300)
    h_scale = max(np.max(np.abs(j.hess)), 1e-300)
    assert np.max(np.abs(j.grad - g_fd)) <= 1e-6 * max(g_scale, 1e-3)
    assert np.max(np.abs(j.hess - h_fd)) <= 1e-6 * max(h_scale, 1e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3))
def test_hessian_exactly_symmetric(vals):
    x, y, z = (jet_var(i, v, 3) for i, v in enumerate(vals))
    r = jet_func("sin", x * y) / (z * z + 1) + jet_func("atan2", y, x * x + 1) * jet_func("exp", z * 0.1)
    assert np.array_equal(r.hess, r.hess.T)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
def test_arithmetic_values_are_plain_floats(a, b):
    x, y = jet_var(0, a, 2), jet_var(1, b, 2)
    assert (x + y).value == a + b
    assert (x * y).value == a * b
    assert (x + y).value == (y + x).value
    assert (x * y).value == (y * x).value


def test_integer_power_keeps_sign():
    r = jet_var(0, -2.0, 1) ** 3
    assert (r.value, r.grad[0], r.hess[0, 0]) == (-8.0, 12.0, -12.0)


def test_lift_gradient_differentiates_gradient():
    x, y = jet_var(0, 1.5, 2), jet_var(1, -0.5, 2)
    f = x * x * y + jet_func("sin", y)
    gx, gy = lift_gradient(f)
    assert isinstance(gx, Jet1)
    np.testing.assert_allclose(gx.grad, f.hess[0])
    # quotient of lifted entries
    q = gx / gy
    expected = (f.hess[0] * gy.value - gx.value * f.hess[1]) / gy.value**2
    np.testing.assert_allclose(q.grad, expected, rtol=1e-14)
