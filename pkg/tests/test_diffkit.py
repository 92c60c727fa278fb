"""Dual-number arithmetic and the finite-difference gradient oracle.

The dual and central-difference routes are independent implementations of the
same derivative; these tests exercise each on its own against hand-computed
values, then cross-check them on generated smooth functions.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltk.diffkit import (FD_STEP, Dual, ScalarFn, cos, dirderiv, exp, fd_grad,
                         grad, ln, sin, sqrt)

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False, width=64)
nonzero = finite.filter(lambda v: abs(v) > 1e-3)


# -- Dual arithmetic against hand expansion -----------------------------------


def test_dual_product_rule():
    x = Dual(2.0, 1.0)
    y = x * x * x            # d/dx x^3 = 3 x^2
    assert y.val == 8.0
    assert y.dot == 12.0


def test_dual_quotient_rule():
    x = Dual(3.0, 1.0)
    y = (x + 1.0) / (x - 1.0)    # d/dx = -2 / (x-1)^2 = -0.5 at x=3
    assert y.val == pytest.approx(2.0, abs=1e-15)
    assert y.dot == pytest.approx(-0.5, abs=1e-15)


def test_dual_scalar_promotion():
    x = Dual(1.5, 2.0)
    assert (1.0 + x).dot == 2.0
    assert (4.0 - x).dot == -2.0
    assert (3.0 * x).dot == 6.0
    assert (6.0 / Dual(2.0, 1.0)).dot == pytest.approx(-1.5)


def test_dual_integer_power_any_base():
    x = Dual(-2.0, 1.0)
    y = x ** 3
    assert y.val == -8.0
    assert y.dot == 12.0


def test_dual_fractional_power_needs_positive_base():
    with pytest.raises(ValueError, match="positive base"):
        Dual(-2.0, 1.0) ** 0.5


def test_dual_power_zero_exponent_is_constant_one():
    y = Dual(0.7, 3.0) ** 0
    assert (y.val, y.dot) == (1.0, 0.0)


def test_dual_division_by_zero_value_raises():
    with pytest.raises(ZeroDivisionError):
        Dual(1.0, 0.0) / Dual(0.0, 1.0)


def test_dual_abs_kink_convention():
    assert abs(Dual(-3.0, 1.0)).dot == -1.0
    assert abs(Dual(0.0, 5.0)).dot == 0.0


def test_transcendentals_on_duals():
    x = Dual(0.7, 1.0)
    assert exp(x).dot == pytest.approx(math.exp(0.7), abs=1e-15)
    assert ln(x).dot == pytest.approx(1.0 / 0.7, abs=1e-15)
    assert sqrt(x).dot == pytest.approx(0.5 / math.sqrt(0.7), abs=1e-15)
    assert sin(x).dot == pytest.approx(math.cos(0.7), abs=1e-15)
    assert cos(x).dot == pytest.approx(-math.sin(0.7), abs=1e-15)


def test_transcendentals_on_floats_match_math():
    assert exp(0.3) == math.exp(0.3)
    assert ln(2.0) == math.log(2.0)
    assert sqrt(2.0) == math.sqrt(2.0)


def test_domain_errors():
    with pytest.raises(ValueError):
        ln(Dual(-1.0, 1.0))
    with pytest.raises(ValueError):
        ln(0.0)
    with pytest.raises(ValueError):
        sqrt(-1.0)
    with pytest.raises(ValueError, match="not differentiable"):
        sqrt(Dual(0.0, 1.0))
    assert sqrt(Dual(0.0, 0.0)).val == 0.0


# -- gradients: hand values, then dual vs central difference ------------------


def _poly2(x):
    # f(a, b) = a^2 b + sin(b); grad = (2ab, a^2 + cos(b))
    a, b = x[0], x[1]
    return a * a * b + sin(b)


POLY2 = ScalarFn(_poly2, dim=2, name="a^2 b + sin b")


def test_grad_hand_value():
    g = grad(POLY2, [1.5, 0.7])
    assert g[0] == pytest.approx(2.1, abs=1e-15)
    assert g[1] == pytest.approx(2.25 + math.cos(0.7), abs=1e-15)


def test_grad_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        grad(POLY2, [1.0, 2.0, 3.0])


def test_fd_grad_matches_hand_value():
    g = fd_grad(POLY2, [1.5, 0.7])
    assert g[0] == pytest.approx(2.1, abs=1e-9)
    assert g[1] == pytest.approx(2.25 + math.cos(0.7), abs=1e-9)


def test_fd_grad_rejects_nonpositive_step():
    with pytest.raises(ValueError, match="step"):
        fd_grad(POLY2, [1.0, 1.0], h=0.0)


def test_fd_step_is_cbrt_eps():
    assert FD_STEP == pytest.approx(np.finfo(float).eps ** (1 / 3))


def test_grad_falls_back_to_fd_when_not_dual_safe():
    # A function that secretly floors its input cannot run on duals; the
    # flag routes grad through the central-difference path instead.
    f = ScalarFn(lambda x: float(x[0]) ** 2, dim=1, dual_safe=False)
    g = grad(f, [3.0])
    assert g[0] == pytest.approx(6.0, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(a=finite, b=finite)
def test_dual_and_fd_routes_agree(a, b):
    f = ScalarFn(lambda x: exp(0.3 * x[0]) * cos(x[1]) + x[0] * x[1] ** 3,
                 dim=2, name="smooth")
    exact = grad(f, [a, b])
    approx = fd_grad(f, [a, b])
    assert np.allclose(exact, approx, rtol=1e-6, atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(a=nonzero, b=nonzero, da=finite, db=finite)
def test_dirderiv_is_gradient_contraction(a, b, da, db):
    g = grad(POLY2, [a, b])
    d = dirderiv(POLY2, [a, b], [da, db])
    assert d == pytest.approx(g[0] * da + g[1] * db, rel=1e-12, abs=1e-12)


def test_dirderiv_zero_direction_non_dual_safe():
    f = ScalarFn(lambda x: x[0] ** 2, dim=1, dual_safe=False)
    assert dirderiv(f, [2.0], [0.0]) == 0.0


def test_dirderiv_fd_path_exact_on_quadratics():
    # Along any ray a quadratic has no third derivative, so the central
    # difference in the non-dual path carries only roundoff (about eps / h).
    f = ScalarFn(lambda x: x[0] * x[1], dim=2, dual_safe=False)
    d = dirderiv(f, [1.0, 2.0], [3.0, 4.0])
    assert d == pytest.approx(1.0 * 4.0 + 2.0 * 3.0, rel=1e-9)


def test_scalar_fn_is_callable_and_frozen():
    assert POLY2([1.0, 0.0]) == pytest.approx(0.0)
    with pytest.raises(AttributeError):
        POLY2.dim = 3
