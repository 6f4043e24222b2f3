"""Tests for the zero atlas of phi on the imaginary axis."""
import math

import numpy as np
import pytest

from szego_borel.errors import DomainError
from szego_borel.phi import ModelOrder, phi_derivative, phi_derivative_quadrature
from szego_borel.zeros import (
    exponent_consistency,
    interlacing_check,
    locate_zeros,
    predicted_offset,
    predicted_zero,
    psi,
    psi_values,
    residue_convergence_threshold,
    residue_weight,
    table_summary,
    zero_law_fit,
)


def test_psi_is_real_and_even_in_x(order2):
    assert psi(order2, 0.0) == pytest.approx(0.5 * 2 ** -0.25 * math.gamma(0.25), rel=1e-12)
    with pytest.raises(DomainError):
        psi(order2, -1.0)


def test_psi_changes_sign(order2):
    values = psi_values(order2, np.linspace(0, 10, 2001))
    assert np.count_nonzero(np.diff(np.signbit(values))) >= 1


def test_thirty_zeros(order2):
    table = locate_zeros(order2, 30)
    assert len(table) == 30
    assert np.all(np.diff(table.a) > 0)
    # a sign scan about 40 times finer than the zero spacing sees the same zeros
    upper = table.a[-1] + 0.5 * (table.a[-1] - table.a[-2])
    grid = np.linspace(1e-3, upper, 40 * 32)
    changes = np.count_nonzero(np.diff(np.signbit(psi_values(order2, grid))))
    assert changes == 30


def test_root_residuals(table2):
    order = table2.order
    for rec in table2:
        slope = abs(phi_derivative(order, 1j * rec.a, 1))
        assert abs(psi(order, rec.a)) < 1e-9 * max(1.0, slope)


def test_record_invariants(table2):
    assert table2.multiplicity_flags == ()
    assert np.all(np.diff(table2.f) > 0)
    assert np.all(table2.f > -0.25)
    for rec in table2:
        assert abs(rec.phi_prime.real) < 1e-8 * abs(rec.phi_prime)
        assert abs(abs(rec.c_phase) - math.pi / 2) < 1e-6
    assert table2[1].j == 1
    with pytest.raises(KeyError):
        table2[41]


def test_residue_weight_reproduced_by_quadrature(table2):
    order = table2.order
    rec = table2[1]
    log_mag, phase = residue_weight(table2, rec)
    assert log_mag == pytest.approx(rec.c_log_mag, rel=1e-12)
    assert phase == pytest.approx(rec.c_phase, abs=1e-12)
    quad = phi_derivative_quadrature(order, 1j * rec.a, 1).value
    assert abs(quad - rec.phi_prime) < 1e-8 * abs(rec.phi_prime)


@pytest.mark.parametrize("name", ["table2", "table3"])
def test_counting_law(name, request):
    table = request.getfixturevalue(name)
    fit = zero_law_fit(table)
    assert abs(fit.c2_hat / table.order.c2 - 1) < 0.02
    assert fit.max_residual < 0.1
    # the offset carries the fractional part predicted by the asymptotics
    shifted = fit.j0_raw - predicted_offset(table.order)
    assert abs(shifted - round(shifted)) < 0.1
    assert fit.predicted_fraction == pytest.approx(predicted_offset(table.order))


def test_counting_law_needs_enough_zeros(order2):
    with pytest.raises(ValueError):
        zero_law_fit(locate_zeros(order2, 5))


def test_predicted_zeros(table2):
    order = table2.order
    for j in (10, 20, 40):
        assert predicted_zero(order, j) == pytest.approx(table2[j].a, rel=0.02)


def test_interlacing_and_exponents(table2):
    assert interlacing_check(table2) == []
    assert exponent_consistency(table2) < 1e-10


def test_threshold(order2):
    assert residue_convergence_threshold(order2) == pytest.approx(
        math.exp(math.pi * math.tan(math.pi / 6)))


def test_summary(table2):
    summary = table_summary(table2)
    assert summary["count"] == 40
    assert summary["a_1"] == table2[1].a


def test_no_zeros_for_gaussian(order1):
    with pytest.raises(DomainError):
        locate_zeros(order1, 5)


def test_count_must_be_positive(order2):
    with pytest.raises(ValueError):
        locate_zeros(order2, 0)


def test_zero_in_quarter_order():
    table = locate_zeros(ModelOrder(4), 8)
    assert len(table) == 8
    assert np.all(np.diff(table.a) > 0)
