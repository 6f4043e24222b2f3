"""
Diagonal behaviour of the kernels: the profile functions Phi and Phi^B,
the two-sided estimate of P on the real axis and the factorisation of
S(z, z) and B(z, z) through them.

With phi normalised as in ``szego_borel.phi`` the real-axis growth of P is
exp(u^{2m} / 2^{2m-1}), so P is read at kappa * u with
kappa = 2^{1 - 1/(2m)} wherever the profile variable enters.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .contours import log_P
from .errors import DomainError
from .numerics.quadrature import ContourSegment, QuadSpec, integrate_segment
from .phi import ModelOrder
from .utils.validation import validate_positive, validate_unit_interval

logger = logging.getLogger(__name__)

# decay exponent at which the s-integral is cut
S_CUTOFF = 40.0
SLOW_OMEGA = 0.995


@dataclass(frozen=True)
class ProfileSample:
    omega: float
    Phi: float
    PhiB: float
    normalized: float
    normalizedB: float


@dataclass(frozen=True)
class DiagonalKernels:
    """
    S(z, z) and B(z, z) at Re z_1 = a, Im z_2 = b, with the profile values
    and the relative residuals of the factorisation through them.
    """

    S_diag: float
    B_diag: float
    omega: float
    rho: float
    Phi: float
    PhiB: float
    residual: float
    residualB: float


def kappa(order: ModelOrder) -> float:
    return 2.0 ** (1.0 - 1.0 / (2 * order.m))


def _log_moment(order: ModelOrder, scale: float, decay: float, power: float,
                r_max: float, spec: QuadSpec) -> float:
    """
    log int_0^{r_max} e^{-decay r^{2m}} P(scale r) 2m r^{2m power + 2m - 1} dr,
    i.e. int e^{-decay s} P(scale s^{1/2m}) s^power ds after s = r^{2m}.
    """
    m = order.m

    def log_integrand(r: np.ndarray) -> np.ndarray:
        r = np.maximum(r.real, 1e-300)
        return log_P(order, scale * r).real - decay * r ** (2 * m) \
            + math.log(2 * m) + (2 * m * power + 2 * m - 1) * np.log(r)

    probe = np.linspace(r_max / 400, r_max, 400)
    shift = float(np.max(log_integrand(probe)))

    def integrand(r: np.ndarray) -> np.ndarray:
        return np.exp(log_integrand(r) - shift)

    res = integrate_segment(integrand, ContourSegment.segment(0j, complex(r_max)), spec,
                            initial_panels=16)
    if not res.converged:
        logger.warning("profile integral did not reach the tolerance (r_max=%g)", r_max)
    return math.log(res.value.real) + shift


def _profile(order: ModelOrder, omega: float, power: float, spec: Optional[QuadSpec]) -> float:
    omega = validate_unit_interval("omega", omega)
    spec = spec or QuadSpec(rel_tol=1e-12, abs_tol=0.0)
    gap = 1.0 - omega ** (2 * order.m)
    s_max = S_CUTOFF / gap
    if abs(omega) > SLOW_OMEGA:
        logger.warning("omega=%g is close to 1: slow decay, truncation extended", omega)
        s_max *= 2.0
    r_max = s_max ** (1.0 / (2 * order.m))
    log_value = _log_moment(order, kappa(order) * omega, 1.0, power, r_max, spec)
    return math.exp(log_value + (power + 1.0) * math.log(gap))


def Phi(order: ModelOrder, omega: float, spec: Optional[QuadSpec] = None) -> float:
    """
    Phi(omega) = [1 - omega^{2m}]^{1 + 1/m} int_0^inf e^{-s} P(kappa omega s^{1/2m}) s^{1/m} ds.

    Raises:
        ValueError: If |omega| >= 1
    """
    return _profile(order, omega, 1.0 / order.m, spec)


def PhiB(order: ModelOrder, omega: float, spec: Optional[QuadSpec] = None) -> float:
    """Bergman profile, with s^{1 + 1/m} and the exponent 2 + 1/m."""
    return _profile(order, omega, 1.0 + 1.0 / order.m, spec)


def haslinger_ratio(order: ModelOrder, u: float) -> float:
    """
    P(u) / ([1 + v^{2m-2}] e^{v^{2m}}) with v = u / kappa, computed in the log domain.

    The ratio stays between two positive constants for u >= 0.
    """
    u = validate_positive("u", u, allow_zero=True)
    m = order.m
    v = u / kappa(order)
    log_value = float(log_P(order, u)[0].real) - math.log1p(v ** (2 * m - 2)) - v ** (2 * m)
    return math.exp(log_value)


def profile_sweep(order: ModelOrder, omegas: Sequence[float],
                  spec: Optional[QuadSpec] = None) -> Tuple[ProfileSample, ...]:
    """Phi, Phi^B and their normalised values (1 - |omega|)^{1 - 1/m} * Phi."""
    rows = []
    for omega in omegas:
        a, b = Phi(order, omega, spec), PhiB(order, omega, spec)
        weight = (1.0 - abs(omega)) ** (1.0 - 1.0 / order.m)
        rows.append(ProfileSample(float(omega), a, b, a * weight, b * weight))
    return tuple(rows)


def diagonal_kernels(order: ModelOrder, a: float, b: float,
                     spec: Optional[QuadSpec] = None) -> DiagonalKernels:
    """
    S(z, z) = int e^{-2 b tau} P(2 a tau^{1/2m}) tau^{1/m} dtau and its Bergman
    counterpart, checked against 2^{-1-1/m} Phi / rho^{1+1/m} and
    2^{-2-1/m} Phi^B / rho^{2+1/m}.

    Raises:
        DomainError: If b <= a^{2m} (not an interior point)
    """
    m = order.m
    rho = b - a ** (2 * m)
    if not rho > 0:
        raise DomainError(f"(a, b) = ({a}, {b}) is not interior: b must exceed a^{2 * m}")
    spec = spec or QuadSpec(rel_tol=1e-12, abs_tol=0.0)
    omega = a * b ** (-1.0 / (2 * m))
    # tau-scale of the effective decay e^{-2 rho tau}
    r_max = (S_CUTOFF / (2.0 * rho)) ** (1.0 / (2 * m))
    s_diag = math.exp(_log_moment(order, 2.0 * a, 2.0 * b, 1.0 / m, r_max, spec))
    b_diag = math.exp(_log_moment(order, 2.0 * a, 2.0 * b, 1.0 + 1.0 / m, r_max, spec))
    phi_s, phi_b = Phi(order, omega, spec), PhiB(order, omega, spec)
    expected_s = 2.0 ** (-1.0 - 1.0 / m) * phi_s / rho ** (1.0 + 1.0 / m)
    expected_b = 2.0 ** (-2.0 - 1.0 / m) * phi_b / rho ** (2.0 + 1.0 / m)
    return DiagonalKernels(
        s_diag, b_diag, omega, rho, phi_s, phi_b,
        abs(s_diag / expected_s - 1.0), abs(b_diag / expected_b - 1.0),
    )


@dataclass(frozen=True)
class InteriorReport:
    """
    Normalised Phi inside |omega| <= alpha^{-1/(2m)} and Phi itself towards |omega| = 1.
    """

    alpha: float
    omega_limit: float
    inside_max: float
    inside_min: float
    edge_omegas: Tuple[float, ...]
    edge_values: Tuple[float, ...]

    @property
    def growing_at_edge(self) -> bool:
        return bool(np.all(np.diff(self.edge_values) > 0))


def interior_region_check(order: ModelOrder, alpha: float, samples: int = 11,
                          edge_omegas: Sequence[float] = (0.9, 0.95, 0.98, 0.99),
                          spec: Optional[QuadSpec] = None) -> InteriorReport:
    """
    Phi on the region {Im z_2 > alpha [Re z_1]^{2m}}, alpha > 1, which is
    |omega| <= alpha^{-1/(2m)} in the profile variable.
    """
    if not alpha > 1:
        raise ValueError("alpha must be greater than 1")
    limit = alpha ** (-1.0 / (2 * order.m))
    inside = [Phi(order, w, spec) for w in np.linspace(0.0, limit, samples)]
    edge = [Phi(order, w, spec) for w in edge_omegas]
    return InteriorReport(float(alpha), limit, max(inside), min(inside),
                          tuple(float(w) for w in edge_omegas), tuple(edge))
