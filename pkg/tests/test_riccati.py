"""Closed-form Riccati machinery: solutions, companions, superposition,
reductions and the linear first-order solver."""

import math

import numpy as np
import pytest

from shapeinv import riccati
from shapeinv.errors import PoleError
from shapeinv.riccati import (INFINITY, ConstRiccati, ExtendedReal,
                              LinearFirstOrder, as_extended,
                              constant_solutions, discriminant,
                              general_solution, reduce_alternative,
                              reduce_standard, solve_linear_first_order,
                              solve_z, superpose)

XS = np.linspace(-1.3, 1.3, 257)


# ---------------------------------------------------------------------------
# ExtendedReal

def test_extended_real_tags():
    assert not ExtendedReal(2.5).is_infinite
    assert INFINITY.is_infinite
    assert ExtendedReal(None).is_infinite
    with pytest.raises(ValueError):
        ExtendedReal(float("nan"))
    # a large float is not the infinity tag
    assert not ExtendedReal(1e300).is_infinite


def test_extended_real_json_and_coercion():
    assert ExtendedReal(3.0).to_json() == 3.0
    assert INFINITY.to_json() == "inf"
    assert as_extended("inf").is_infinite
    assert as_extended(2).value == 2.0
    assert as_extended(INFINITY).is_infinite


# ---------------------------------------------------------------------------
# ConstRiccati

def test_const_riccati_rejects_linear():
    with pytest.raises(ValueError):
        ConstRiccati(0.0, 1.0, 1.0)


@pytest.mark.parametrize("coeffs,expected", [
    ((-1.0, 0.0, 1.0), 4.0),    # y' = -y^2 + 1
    ((-1.0, 0.0, 0.0), 0.0),
    ((1.0, 2.0, 1.0), 0.0),     # perfect square
])
def test_discriminant(coeffs, expected):
    assert discriminant(ConstRiccati(*coeffs)) == expected


def test_constant_solutions_counts():
    assert constant_solutions(ConstRiccati(-1.0, 0.0, 1.0)) == [-1.0, 1.0]
    assert constant_solutions(ConstRiccati(-1.0, 0.0, -1.0)) == []
    assert constant_solutions(ConstRiccati(1.0, -2.0, 1.0)) == [1.0]


def test_constant_solution_count_tracks_discriminant():
    rng = np.random.default_rng(3)
    for _ in range(100):
        a2 = rng.uniform(-2, 2)
        if abs(a2) < 1e-3:
            a2 = 1.0
        eq = ConstRiccati(a2, rng.uniform(-2, 2), rng.uniform(-2, 2))
        disc = discriminant(eq)
        n = len(constant_solutions(eq))
        assert n == (2 if disc > 0 else (0 if disc < 0 else 1))


# ---------------------------------------------------------------------------
# general_solution closed forms

def test_limit_solutions_match_named_forms():
    pos = general_solution(1.0, 0.0, INFINITY)
    assert np.allclose(pos.evaluate(XS), np.tanh(XS), atol=1e-14)
    zero = general_solution(0.0, 0.0, ExtendedReal(0.0))
    assert np.all(zero.evaluate(XS) == 0.0)
    neg = general_solution(-1.0, 0.0, INFINITY)
    assert np.allclose(neg.evaluate(XS), -np.tan(XS), atol=1e-12)


@pytest.mark.parametrize("a", [1.0, 0.0, -1.0])
def test_residual_single_draws(a):
    sol = general_solution(a, 0.3, ExtendedReal(0.7))
    xs = XS[np.abs(XS - 0.3) > 1e-2]
    for pole in sol.singularities((-2.0, 2.0)):
        xs = xs[np.abs(xs - pole) > 1e-2]
    res = sol.derivative(xs) + sol.evaluate(xs) ** 2 - a
    assert np.max(np.abs(res)) < 1e-9


def test_residual_sweep_per_class():
    # 50 seeded draws per sign class, closed-form derivative only
    rng = np.random.default_rng(11)
    for kind in ("pos", "zero", "neg"):
        for _ in range(50):
            A = rng.uniform(-2, 2)
            B = ExtendedReal(rng.uniform(-5, 5))
            if kind == "zero":
                a = 0.0
            else:
                c = rng.uniform(0.2, 3.0)
                a = c * c if kind == "pos" else -c * c
            sol = general_solution(a, A, B)
            xs = rng.uniform(A - 2.5, A + 2.5, 300)
            for pole in sol.singularities((A - 3.5, A + 3.5)):
                xs = xs[np.abs(xs - pole) > 1e-2]
            res = sol.derivative(xs) + sol.evaluate(xs) ** 2 - a
            assert np.max(np.abs(res)) < 1e-9, (kind, A, B.value)


def test_pole_evaluation_raises():
    # exact denominator zeros raise instead of returning +-inf
    zero = general_solution(0.0, 0.0, ExtendedReal(2.0))  # pole at -1/B
    with pytest.raises(PoleError):
        zero.evaluate(-0.5)
    lim = general_solution(0.0, 0.3, INFINITY)  # 1/(x - A)
    with pytest.raises(PoleError):
        lim.evaluate(0.3)
    neg = general_solution(-1.0, 0.0, ExtendedReal(0.0))
    with pytest.raises(PoleError):
        neg.derivative(0.0)


def test_pole_locations_reported():
    sol = general_solution(1.0, 0.0, ExtendedReal(0.5))
    assert sol.singularities((-1.0, 1.0)) == pytest.approx([math.atanh(0.5)])
    zero = general_solution(0.0, 0.0, ExtendedReal(2.0))
    assert zero.singularities((-3.0, 3.0)) == pytest.approx([-0.5])


def test_no_pole_for_large_B_pos_class():
    sol = general_solution(1.0, 0.0, ExtendedReal(2.2))
    assert sol.singularities((-50.0, 50.0)) == []


def test_limit_recovery_large_finite_B():
    # the Infinity variant equals the pointwise B -> +-inf limit; the finite
    # form differs by O(1/(B (x-A)^2)) in the zero class, so keep 0.15 away
    for a in (1.0, 0.0, -1.0):
        lim = general_solution(a, 0.1, INFINITY)
        xs = XS[np.abs(XS - 0.1) > 0.15]
        for B in (1e6, -1e6):
            fin = general_solution(a, 0.1, ExtendedReal(B))
            assert np.max(np.abs(fin.evaluate(xs) - lim.evaluate(xs))) < 1e-4


def test_kind_and_scale():
    assert general_solution(4.0, 0.0, ExtendedReal(2.0)).kind == "pos"
    assert general_solution(0.0, 0.0, ExtendedReal(2.0)).kind == "zero"
    sol = general_solution(-4.0, 0.0, ExtendedReal(2.0))
    assert sol.kind == "neg" and sol.c == 2.0


# ---------------------------------------------------------------------------
# solve_z

def test_z_zero_class_linear_form():
    y = general_solution(0.0, 0.0, ExtendedReal(0.0))
    z = solve_z(2.0, y, 0.7)
    assert np.allclose(z.evaluate(XS), 2.0 * XS + 0.7, atol=1e-12)


def test_z_trivial_zero_forcing():
    y = general_solution(1.0, 0.0, ExtendedReal(3.0))
    z = solve_z(0.0, y, 0.0)
    assert np.all(z.evaluate(XS) == 0.0)
    assert np.all(z.derivative(XS) == 0.0)


def test_z_pos_limit_form():
    y = general_solution(1.0, 0.0, INFINITY)
    z = solve_z(1.5, y, -0.4)
    expect = 1.5 * np.tanh(XS) - 0.4 / np.cosh(XS)
    assert np.allclose(z.evaluate(XS), expect, atol=1e-12)


def test_z_residual_sweep():
    rng = np.random.default_rng(29)
    for i in range(150):
        kind = ("pos", "zero", "neg")[i % 3]
        A = rng.uniform(-2, 2)
        B = INFINITY if i % 5 == 4 else ExtendedReal(rng.uniform(-5, 5))
        if kind == "zero":
            a = 0.0
        else:
            c = rng.uniform(0.2, 3.0)
            a = c * c if kind == "pos" else -c * c
        y = general_solution(a, A, B)
        b = rng.uniform(-3, 3)
        D = rng.uniform(-3, 3)
        z = solve_z(b, y, D)
        xs = rng.uniform(A - 2.5, A + 2.5, 300)
        for pole in y.singularities((A - 3.5, A + 3.5)):
            xs = xs[np.abs(xs - pole) > 1e-2]
        res = y.evaluate(xs) * z.evaluate(xs) + z.derivative(xs) - b
        assert np.max(np.abs(res)) < 1e-9, (kind, b, D)


# ---------------------------------------------------------------------------
# superposition

def _tanh_triple():
    y1 = general_solution(1.0, 0.0, INFINITY)
    y2 = general_solution(1.0, 0.0, ExtendedReal(-1.0))  # constant +1
    y3 = general_solution(1.0, 0.0, ExtendedReal(1.0))   # constant -1
    return y1, y2, y3


def test_superpose_endpoints():
    y1, y2, y3 = _tanh_triple()
    assert np.allclose(superpose(y1, y2, y3, 0.0)(XS), y1.evaluate(XS),
                       atol=1e-12)
    assert np.allclose(superpose(y1, y2, y3, 1.0)(XS), y3.evaluate(XS),
                       atol=1e-12)
    assert np.allclose(superpose(y1, y2, y3, INFINITY)(XS), y2.evaluate(XS),
                       atol=1e-12)


@pytest.mark.parametrize("k", [-2.0, -0.5, 0.35, 0.8, 3.0])
def test_superpose_generic_k_is_a_solution(k):
    y1, y2, y3 = _tanh_triple()
    mixed = superpose(y1, y2, y3, k)
    # residual via a one-sided dense derivative of the analytic combination
    w1 = np.tanh(XS)
    num = k * 1.0 * (-1.0 - w1) + w1 * 2.0
    den = k * (-1.0 - w1) + 2.0
    keep = np.abs(den) > 0.05
    y = num[keep] / den[keep]
    assert np.allclose(mixed(XS[keep]), y, atol=1e-12)
    d1 = 1.0 - w1 ** 2
    dnum = -k * d1 + 2.0 * d1
    dden = -k * d1
    dy = (dnum[keep] * den[keep] - num[keep] * dden[keep]) / den[keep] ** 2
    assert np.max(np.abs(dy + y * y - 1.0)) < 1e-9


def test_superpose_singular_mix_raises():
    y1, y2, y3 = _tanh_triple()
    # k = 2 puts the mixing denominator zero where tanh = 0
    with pytest.raises(PoleError):
        superpose(y1, y2, y3, 2.0)(0.0)


# ---------------------------------------------------------------------------
# reductions and the linear solver

def test_reduce_standard_coefficients():
    # constant particular solutions come in as plain floats
    p = reduce_standard(ConstRiccati(-1.0, 0.0, 1.0), 1.0)
    assert p.constant_coefficients
    assert p.a == pytest.approx(2.0)
    assert p.b == pytest.approx(-1.0)
    p0 = reduce_standard(ConstRiccati(-1.0, 0.0, 0.0), 0.0)
    assert (p0.a, p0.b) == (0.0, -1.0)
    p1 = reduce_standard(ConstRiccati(1.0, 0.0, 0.0), 0.0)
    assert (p1.a, p1.b) == (0.0, 1.0)


def test_reduce_standard_callable_solution():
    eq = ConstRiccati(-1.0, 0.0, 1.0)
    p = reduce_standard(eq, np.tanh)
    xs = np.linspace(-1.0, 1.0, 33)
    assert np.allclose(p.a(xs), 2.0 * np.tanh(xs), atol=1e-14)
    assert p.b == pytest.approx(-1.0)


def test_reduce_alternative_coefficients():
    p = reduce_alternative(ConstRiccati(-1.0, 0.0, 1.0), 1.0)
    assert p.a == pytest.approx(2.0)
    assert p.b == pytest.approx(1.0)
    # a0 = 0: homogeneous in u
    ph = reduce_alternative(ConstRiccati(-1.0, 0.5, 0.0), 0.4)
    assert ph.b == pytest.approx(0.0)


def test_reduce_alternative_inverse_linear_solution():
    # y' = -y^2 with y1 = 1/x turns into du/dx = 0
    eq = ConstRiccati(-1.0, 0.0, 0.0)
    y1 = general_solution(0.0, 0.0, INFINITY)
    p = reduce_alternative(eq, y1)
    xs = np.linspace(0.5, 2.0, 64)
    assert np.max(np.abs(p.a(xs) * 1.0 + p.b)) < 1e-12  # u' = 0 for u = 1


def test_reduce_alternative_rejects_vanishing_y1():
    with pytest.raises(ValueError):
        reduce_alternative(ConstRiccati(-1.0, 0.0, 1.0), 0.0)
    p = reduce_alternative(ConstRiccati(-1.0, 0.0, 1.0), np.tanh)
    with pytest.raises(ValueError):
        p.a(np.linspace(-1.0, 1.0, 11))  # tanh vanishes at 0


def test_linear_solver_constant_cases():
    xs = np.linspace(0.0, 2.0, 101)
    v = solve_linear_first_order(LinearFirstOrder(0.0, 1.0), 0.0, E=0.0)
    assert np.allclose(v(xs), xs, atol=1e-12)
    v = solve_linear_first_order(LinearFirstOrder(1.0, 0.0), 0.0, E=1.0)
    assert np.allclose(v(xs), np.exp(xs), atol=1e-10)


def _rk4(rhs, x0, u0, x_end, n=4000):
    h = (x_end - x0) / n
    x, u = x0, u0
    for _ in range(n):
        k1 = rhs(x, u)
        k2 = rhs(x + h / 2, u + h * k1 / 2)
        k3 = rhs(x + h / 2, u + h * k2 / 2)
        k4 = rhs(x + h, u + h * k3)
        u += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        x += h
    return u


def test_linear_solver_constant_matches_rk4():
    # the reduce_standard resolvent u' = 2u - 1 with u(0) = 1
    v = solve_linear_first_order(LinearFirstOrder(2.0, -1.0), 0.0, E=1.0)
    for x_end in (0.4, 0.9, 1.5):
        ref = _rk4(lambda x, u: 2.0 * u - 1.0, 0.0, 1.0, x_end)
        assert abs(float(v(x_end)) - ref) < 1e-8


def test_linear_solver_quadrature_matches_rk4():
    # variable coefficients force the Simpson path
    a = lambda x: np.sin(x)
    b = lambda x: np.cos(2.0 * x)
    v = solve_linear_first_order(LinearFirstOrder(a, b), 0.0, E=1.0)
    for x_end in (0.5, 1.0, 1.7):
        ref = _rk4(lambda x, u: math.sin(x) * u + math.cos(2.0 * x),
                   0.0, 1.0, x_end)
        assert abs(float(v(x_end)) - ref) < 1e-8


def test_reduction_round_trip_standard():
    # solve the reduced problem, then map back through y = y1 - 1/u; the
    # derivative of the recovered y follows from u' = a u + b in closed form
    eq = ConstRiccati(-1.0, 0.0, 1.0)
    p = reduce_standard(eq, 1.0)
    v = solve_linear_first_order(p, 0.0, E=1.2)
    xs = np.linspace(-0.8, 0.8, 401)
    u = v(xs)
    y = 1.0 - 1.0 / u
    dy = (p.a * u + p.b) / (u * u)
    res = dy + y * y - 1.0
    assert np.max(np.abs(res)) < 1e-7


def test_reduction_round_trip_alternative():
    # map back through y = u y1 / (u + y1) with y1 = 1
    eq = ConstRiccati(-1.0, 0.0, 1.0)
    p = reduce_alternative(eq, 1.0)
    v = solve_linear_first_order(p, 0.0, E=0.8)
    xs = np.linspace(-0.8, 0.8, 401)
    u = v(xs)
    y = u / (u + 1.0)
    dy = (p.a * u + p.b) / (u + 1.0) ** 2
    res = dy + y * y - 1.0
    assert np.max(np.abs(res)) < 1e-7
