"""Tests for the singular solutions S^nu and the bounded-solution dichotomy."""
import math

import numpy as np
import pytest

from szego_borel.errors import DomainError
from szego_borel.numerics.quadrature import QuadSpec
from szego_borel.numerics.special import log_gamma
from szego_borel.singular import (
    OSCILLATORY,
    REAL,
    ROTATED,
    EvalPoint,
    S_closed_form,
    S_generic,
    S_j,
    S_j_many,
    S_many,
    SingularSolutionSpec,
    boundedness_probe,
    g_xi,
    gevrey_order_estimate,
    large_xi_sequence,
    t_derivative_closed_form,
)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_eval_point(order2):
    pt = EvalPoint(0.2, -1.0, 0.3)
    assert pt.z == 0.2 - 1j
    assert pt.sigma == -1
    assert pt.conjugate() == EvalPoint(0.2, 1.0, -0.3)
    assert pt.scaled(2.0) == EvalPoint(0.4, -2.0, 0.3)
    assert EvalPoint(0.0, 1.0).in_sector(order2)
    assert not EvalPoint(1.0, 0.1).in_sector(order2)
    assert not EvalPoint(1.0, 0.0).in_sector(order2)


def test_solution_spec(table2):
    pt = EvalPoint(0.0, -1.0)
    assert SingularSolutionSpec(0.5, j=2).resolve(table2, pt) == -1j * table2[2].a
    assert SingularSolutionSpec(0.5, xi=3j).resolve(table2, pt) == 3j
    with pytest.raises(ValueError):
        SingularSolutionSpec(0.5)
    with pytest.raises(ValueError):
        SingularSolutionSpec(-1.0, j=1)


def test_closed_form_matches_quadrature(table2):
    order = table2.order
    pt = EvalPoint(0.0, 1.0)
    for j in (1, 3):
        xi = 1j * table2[j].a
        quad = S_generic(order, xi, pt, 0.5, method=REAL)
        assert rel(quad, S_closed_form(order, xi, pt.z, 0.5)) < 1e-8


def test_scaling_law(table2):
    order = table2.order
    nu = 0.5
    power = 2 * order.m * nu + 2 * order.m
    values = [S_j(order, table2, 1, EvalPoint(0.0, lam), nu, method=REAL) * lam ** power
              for lam in (0.5, 1.0, 2.0)]
    assert rel(values[0], values[1]) < 1e-8
    assert rel(values[2], values[1]) < 1e-8


def test_many_matches_single_generic(table2):
    order = table2.order
    pt = EvalPoint(0.2, 1.0, 0.3)
    xis = 1j * table2.a[[0, 1, 4]]
    many = S_many(order, xis, pt, 0.5)
    for xi, value in zip(xis, many):
        assert rel(value, S_generic(order, xi, pt, 0.5, method=ROTATED)) < 1e-7


def test_many_on_the_axis_with_time(table2):
    order = table2.order
    pt = EvalPoint(0.0, 1.0, 0.3)
    xis = 1j * table2.a[:3]
    many = S_many(order, xis, pt, 0.5)
    for xi, value in zip(xis, many):
        assert rel(value, S_generic(order, xi, pt, 0.5, method=ROTATED)) < 1e-8
        assert rel(value, S_generic(order, xi, pt, 0.5, method=OSCILLATORY)) < 1e-6


def test_many_uses_closed_form(table2):
    order = table2.order
    pt = EvalPoint(0.0, 1.2)
    values = S_many(order, 1j * table2.a, pt, 0.5)
    expected = S_j_many(order, table2, pt, 0.5)
    assert np.allclose(values, expected, rtol=1e-12, atol=0)


def test_not_integrable_on_the_axis(order2):
    pt = EvalPoint(0.0, 1.0)
    with pytest.raises(DomainError):
        S_generic(order2, -2j, pt, 0.5)
    with pytest.raises(DomainError):
        S_many(order2, [2j, -2j], pt, 0.5)


def test_singular_support(table2):
    with pytest.raises(DomainError, match="singular support"):
        S_j(table2.order, table2, 1, EvalPoint(0.5, 0.0), 0.5)


def test_derivative_term_ratio(order2):
    a, y = 2.0, 1.1
    m = order2.m
    for k in (0, 5, 12):
        step = t_derivative_closed_form(order2, a, y, k + 1) - t_derivative_closed_form(order2, a, y, k)
        p = 2 * m * k + 2 * m + 2
        expected = log_gamma(p + 2 * m) - log_gamma(p) - 2 * m * math.log(y * a)
        assert abs(step - expected) < 1e-10


def test_gevrey_estimate_of_closed_form(order2, order3):
    for order in (order2, order3):
        ks = list(range(0, 31))
        logs = [t_derivative_closed_form(order, 2.0, 1.0, k) for k in ks]
        estimate = gevrey_order_estimate(logs, ks)
        assert abs(estimate.s_hat - 2 * order.m) < 0.3
        assert estimate.monotone


def test_gevrey_estimate_needs_data():
    with pytest.raises(ValueError):
        gevrey_order_estimate([1.0, 2.0], [0, 1])
    with pytest.raises(ValueError):
        gevrey_order_estimate(range(6), [0, 1, 2, 4, 5, 6])


def test_large_xi_limit(order2):
    pt = EvalPoint(0.0, 1.0, 0.3)
    nu = 0.5
    power = 2 * order2.m * nu + 2 * order2.m
    limit = 2 * order2.m * math.gamma(power)
    seq = large_xi_sequence(order2, pt, nu, [5.0, 20.0, 80.0], QuadSpec(rel_tol=1e-10, abs_tol=0.0))
    errors = [rel(v, limit) for v in seq]
    assert errors[2] < errors[1] < errors[0]
    assert errors[2] < 1e-3


def test_bounded_at_zero(table2):
    order = table2.order
    xi = 1j * table2[1].a
    assert abs(g_xi(order, xi, -5.0).value) < 1e-6
    report = boundedness_probe(order, xi)
    assert report.bounded
    assert report.sup_window < 1e3
    assert report.unbounded_at is None
    assert report.branch == "tail"


@pytest.mark.parametrize("shift", [-0.1, 0.1])
def test_unbounded_off_zero(table2, shift):
    report = boundedness_probe(table2.order, 1j * (table2[1].a + shift))
    assert not report.bounded
    assert report.unbounded_at is not None


def test_g_rejects_infinite(order2):
    with pytest.raises(DomainError):
        g_xi(order2, 1j, math.inf)
