"""Tests for the diagonal profile functions."""
import numpy as np
import pytest

from szego_borel.errors import DomainError
from szego_borel.profile import (
    Phi,
    PhiB,
    diagonal_kernels,
    haslinger_ratio,
    interior_region_check,
    kappa,
    profile_sweep,
)


@pytest.mark.parametrize("omega", [0.0, 0.3, -0.5, 0.9])
def test_gaussian_profiles_are_constant(order1, omega):
    assert Phi(order1, omega) == pytest.approx(2.0, rel=1e-9)
    assert PhiB(order1, omega) == pytest.approx(4.0, rel=1e-9)


@pytest.mark.parametrize("u", [0.0, 0.7, 2.5])
def test_gaussian_haslinger_ratio(order1, u):
    assert haslinger_ratio(order1, u) == pytest.approx(1.0, rel=1e-9)


def test_kappa(order1, order2):
    assert kappa(order1) == pytest.approx(2 ** 0.5)
    assert kappa(order2) == pytest.approx(2 ** 0.75)


@pytest.mark.parametrize("omega", [0.2, 0.6, 0.95])
def test_profiles_are_even(order2, omega):
    assert Phi(order2, -omega) == pytest.approx(Phi(order2, omega), rel=1e-10)
    assert PhiB(order2, -omega) == pytest.approx(PhiB(order2, omega), rel=1e-10)


@pytest.mark.parametrize("fixture", ["order2", "order3"])
def test_normalised_profiles_stay_in_a_band(request, fixture):
    order = request.getfixturevalue(fixture)
    rows = profile_sweep(order, np.linspace(0.0, 0.99, 12))
    normalised = np.array([r.normalized for r in rows])
    normalisedB = np.array([r.normalizedB for r in rows])
    assert np.all(normalised > 0)
    assert normalised.max() / normalised.min() < 10
    assert normalisedB.max() / normalisedB.min() < 10
    # the profile itself blows up towards |omega| = 1
    assert rows[-1].Phi > rows[0].Phi


@pytest.mark.parametrize("fixture", ["order2", "order3"])
def test_haslinger_band(request, fixture):
    order = request.getfixturevalue(fixture)
    ratios = np.array([haslinger_ratio(order, u) for u in np.linspace(0.0, 3.0, 13)])
    assert np.all(ratios > 0)
    assert ratios.max() / ratios.min() < 20


def test_haslinger_rejects_negative(order2):
    with pytest.raises(ValueError):
        haslinger_ratio(order2, -1.0)


@pytest.mark.parametrize("a, b", [(0.3, 1.0), (0.5, 2.0), (-0.4, 0.5)])
def test_diagonal_factorisation(order2, a, b):
    """S(z, z) and B(z, z) factor through the profiles."""
    diag = diagonal_kernels(order2, a, b)
    assert diag.rho == pytest.approx(b - a ** 4)
    assert diag.residual < 1e-8
    assert diag.residualB < 1e-8


def test_diagonal_gaussian(order1):
    diag = diagonal_kernels(order1, 0.5, 1.0)
    assert diag.S_diag == pytest.approx(0.5 / 0.75 ** 2, rel=1e-9)


def test_diagonal_needs_interior_point(order2):
    with pytest.raises(DomainError):
        diagonal_kernels(order2, 1.0, 1.0)
    with pytest.raises(DomainError):
        diagonal_kernels(order2, 0.0, -1.0)


@pytest.mark.parametrize("omega", [1.0, -1.0, 1.5])
def test_profile_domain(order2, omega):
    with pytest.raises(ValueError):
        Phi(order2, omega)


def test_interior_region(order2):
    report = interior_region_check(order2, 2.0, samples=5)
    assert report.omega_limit == pytest.approx(2.0 ** -0.25)
    assert 0 < report.inside_min <= report.inside_max
    assert report.inside_max / report.inside_min < 10
    assert report.growing_at_edge
    with pytest.raises(ValueError):
        interior_region_check(order2, 1.0)
