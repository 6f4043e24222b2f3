"""Tests for P and P_q along the real line and the Gamma contours."""
import math

import numpy as np
import pytest
from scipy import integrate

from szego_borel.contours import (
    P_of,
    Pq_contour,
    Pq_residues,
    arc_radius,
    first_zero,
    log_P,
    q_decay_rate,
)
from szego_borel.errors import DomainError
from szego_borel.phi import log_phi_real
from szego_borel.zeros import ZeroRecord, ZeroTable


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("u", [0.0, 0.7, 1.5, -2.0])
def test_P_gaussian(order1, u):
    assert rel(P_of(order1, u), 2 * math.exp(u * u / 2)) < 1e-8


def test_P_at_origin(order2):
    oracle, _ = integrate.quad(lambda v: math.exp(-log_phi_real(order2, [v])[0]),
                               -np.inf, np.inf, epsabs=0, epsrel=1e-12)
    assert rel(P_of(order2, 0.0), oracle) < 1e-9


def test_P_even_and_real(order2):
    values = P_of(order2, np.array([1.3, -1.3, 2.1j, -2.1j]))
    assert rel(values[0], values[1]) < 1e-10
    assert abs(values[0].imag) < 1e-10 * abs(values[0])
    assert rel(values[2], values[3]) < 1e-9


def test_P_routes_agree(order2):
    """Points just either side of the switch between the real line and Gamma."""
    u_real = 3.0 * np.exp(1j * (math.pi / 4 - 1e-3))
    u_gamma = 3.0 * np.exp(1j * (math.pi / 4 + 1e-3))
    a, b = P_of(order2, u_real), P_of(order2, u_gamma)
    assert rel(a, b) < 1e-8


def test_log_P_large_argument(order2):
    values = log_P(order2, np.array([20.0, 40.0]))
    assert np.all(np.isfinite(values))
    assert values[1].real > values[0].real


def test_arc_radius(order2):
    assert arc_radius(order2) == pytest.approx(0.5 * first_zero(2))
    assert first_zero(2) > 0


@pytest.mark.parametrize("q", [10.0, 20.0])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 3.0, 4.0])
def test_residue_identity(table2, q, s):
    u = 1j * s
    contour = Pq_contour(table2.order, u, q)
    residues = Pq_residues(table2.order, table2, u, q)
    assert rel(residues.value, contour) < 1e-7
    assert residues.terms_used <= len(table2)


@pytest.mark.parametrize("q", [3.0, 5.0])
@pytest.mark.parametrize("s", [1.0, 1.5, 2.0, 3.0, 4.0])
def test_residue_identity_sextic(table3, q, s):
    u = 1j * s
    residues = Pq_residues(table3.order, table3, u, q)
    assert rel(residues.value, Pq_contour(table3.order, u, q)) < 1e-7


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_unit_q_is_P(order2, s):
    assert rel(Pq_contour(order2, 1j * s, 1.0), P_of(order2, 1j * s)) < 1e-7


def test_lower_half_plane_contour(order2):
    assert rel(Pq_contour(order2, -1j, 10.0, sign=-1),
               np.conj(Pq_contour(order2, 1j, 10.0))) < 1e-10


def test_q_outside_region(table2):
    assert q_decay_rate(table2.order, 10.0) > 0
    with pytest.raises(DomainError):
        Pq_contour(table2.order, 1j, 1e-30)
    with pytest.raises(DomainError):
        Pq_residues(table2.order, table2, 1j, 0)


def test_residues_refuse_growing_terms(table2):
    with pytest.raises(DomainError):
        Pq_residues(table2.order, table2, -3j, 1.0)


def test_P_q_needs_zeros(order1):
    with pytest.raises(DomainError):
        Pq_contour(order1, 1j, 2.0)


def test_residue_sum_keeps_small_terms(order2):
    """Terms below half an ulp of the leading one still reach the total."""
    phi_primes = [1.0, 2.0 ** 53, 2.0 ** 53, 2.0 ** 53, 2.0 ** 60]
    table = ZeroTable(order2, tuple(
        ZeroRecord(j, float(j), pp, -1.0, 0.0, 0.0) for j, pp in enumerate(phi_primes, start=1)))
    residues = Pq_residues(order2, table, 0.0, 10.0)
    assert residues.terms_used == 5
    assert residues.value == 2j * math.pi * (1.0 + 2.0 ** -51)
