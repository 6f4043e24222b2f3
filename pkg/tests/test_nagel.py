"""Tests for the kernels by the direct integral over P."""
import math

import numpy as np
import pytest
from scipy import integrate

from szego_borel.errors import DomainError
from szego_borel.nagel import (
    BERGMAN,
    NAGEL,
    SZEGO,
    K_nagel,
    KB_nagel,
    KernelValue,
    kernel_nu,
    nagel_integral,
)
from szego_borel.phi import log_phi_real
from szego_borel.singular import OSCILLATORY, ROTATED, EvalPoint


def rel(a, b):
    return abs(a - b) / abs(b)


def gaussian_kernel(pt, power):
    """m = 1: P(u) = 2 exp(u^2 / 2), so the tau-integral is 2 Gamma(power) / w^power."""
    w = pt.x ** 2 - pt.z ** 2 / 2 - 1j * pt.t
    return 2 * math.gamma(power) / w ** power


def test_kernel_nu(order2):
    assert kernel_nu(order2, SZEGO) == 0.5
    assert kernel_nu(order2, BERGMAN) == 1.5
    with pytest.raises(ValueError):
        kernel_nu(order2, "cauchy")


@pytest.mark.parametrize("pt", [EvalPoint(0.0, 1.0), EvalPoint(0.3, 1.0, 0.4), EvalPoint(0.2, -0.9, -0.5)])
def test_gaussian_closed_form(order1, pt):
    value = K_nagel(order1, pt)
    assert value.route == NAGEL
    assert rel(value.value, gaussian_kernel(pt, 2)) < 1e-7
    assert rel(KB_nagel(order1, pt).value, gaussian_kernel(pt, 3)) < 1e-7


def test_gaussian_rotated(order1):
    pt = EvalPoint(0.3, 1.0, 0.4)
    assert rel(K_nagel(order1, pt, method=ROTATED).value, gaussian_kernel(pt, 2)) < 1e-7


def test_brute_force_oracle(order2):
    """Riemann sums over v (for P(i s)) and over s reproduce K at z = i, t = 0."""
    v = np.linspace(0.0, 16.0, 3201)
    inv_phi = np.exp(-log_phi_real(order2, v))
    s = np.linspace(0.0, 30.0, 3001)
    weights_v = np.full(v.size, v[1] - v[0])
    weights_v[[0, -1]] /= 2
    P = 2 * (np.cos(np.outer(s, v)) * inv_phi) @ weights_v
    integrand = 4 * P * s ** 5
    oracle = integrate.trapezoid(integrand, s)
    value = K_nagel(order2, EvalPoint(0.0, 1.0)).value
    assert abs(value.imag) < 1e-8 * abs(value)
    assert rel(value, oracle) < 1e-3


def test_conjugate_point(order2):
    pt = EvalPoint(0.1, 1.0, 0.3)
    a = K_nagel(order2, pt).value
    b = K_nagel(order2, pt.conjugate()).value
    assert rel(b, np.conj(a)) < 1e-8


@pytest.mark.parametrize("which, kernel", [(SZEGO, K_nagel), (BERGMAN, KB_nagel)])
@pytest.mark.parametrize("lam", [0.8, 1.5])
def test_homogeneity(order2, which, kernel, lam):
    """K(lam x, lam y, lam^{2m} t) = lam^{-2m(nu + 1)} K(x, y, t)."""
    pt = EvalPoint(0.2, 1.0, 0.3)
    scaled = EvalPoint(lam * pt.x, lam * pt.y, lam ** (2 * order2.m) * pt.t)
    power = 2 * order2.m * (kernel_nu(order2, which) + 1)
    assert rel(kernel(order2, scaled).value * lam ** power, kernel(order2, pt).value) < 1e-6


def test_homogeneity_on_the_axis(order2):
    assert K_nagel(order2, EvalPoint(0.0, 1.0)).value / K_nagel(order2, EvalPoint(0.0, 2.0)).value \
        == pytest.approx(2.0 ** 6, rel=1e-8)


def test_methods_agree(order2):
    pt = EvalPoint(0.0, 1.0, 0.3)
    a = K_nagel(order2, pt, method=OSCILLATORY).value
    b = K_nagel(order2, pt, method=ROTATED).value
    assert rel(a, b) < 1e-6


def test_origin_is_singular(order2):
    with pytest.raises(DomainError):
        K_nagel(order2, EvalPoint(0.0, 0.0, 0.3))


def test_unknown_method(order2):
    with pytest.raises(ValueError):
        nagel_integral(order2, EvalPoint(0.0, 1.0, 0.3), 0.5, method="spiral")


def test_kernel_value_error_is_nonnegative():
    with pytest.raises(ValueError):
        KernelValue(1.0, NAGEL, -1e-3)
