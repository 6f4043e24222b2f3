"""
Szegő and Bergman kernels from the one-dimensional representation

    K(z, t) = int_0^inf e^{i t tau} e^{-x^{2m} tau} P(z tau^{1/2m}) tau^{nu'} dtau

with nu' = 1/m (Szegő) or 1 + 1/m (Bergman), reported with the unknown
overall constant set to 1.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contours import first_zero, log_P
from .errors import ConvergenceError, DivergenceError, DomainError
from .numerics.quadrature import (
    ContourSegment,
    QuadResult,
    QuadSpec,
    integrate_decaying_halfline,
    integrate_oscillatory_halfline,
)
from .numerics.special import principal_power
from .phi import ModelOrder
from .singular import EvalPoint, OSCILLATORY, ROTATED

logger = logging.getLogger(__name__)

SZEGO = "szego"
BERGMAN = "bergman"
KERNELS = (SZEGO, BERGMAN)

NAGEL = "nagel"
BOREL_SERIES = "borel-series"
BOREL_CONTOUR = "borel-contour"


@dataclass(frozen=True)
class KernelValue:
    value: complex
    route: str
    err_est: float

    def __post_init__(self):
        if self.err_est < 0:
            raise ValueError("err_est must be non-negative")


def kernel_nu(order: ModelOrder, which: str) -> float:
    """nu' of the tau-integral: 1/m for the Szegő kernel, 1 + 1/m for Bergman."""
    if which == SZEGO:
        return 1.0 / order.m
    if which == BERGMAN:
        return 1.0 + 1.0 / order.m
    raise ValueError(f"Unknown kernel: {which}. Must be one of {KERNELS}.")


def _check_point(pt: EvalPoint) -> None:
    if pt.x == 0 and pt.y == 0:
        raise DomainError("the kernel is singular at z = 0")


def _peak_scale(order: ModelOrder, z: complex, power: float) -> float:
    """Rough location of the peak of s^{power-1} |P(z s)| along the ray."""
    height = abs(z.imag) + 1e-3
    if order.m == 1:
        # P(u) = 2 exp(u^2 / 2)
        return max(math.sqrt(max(power - 1, 1.0)) / height, 0.05)
    return max((power - 1) / (first_zero(order.m) * height), 0.05)


def _s_integral(order: ModelOrder, pt: EvalPoint, nu: float, spec: QuadSpec,
                angle: float = 0.0) -> QuadResult:
    """2m int e^{(it - x^{2m}) s^{2m}} P(z s) s^{2m nu + 2m - 1} ds along arg s = angle."""
    m = order.m
    power = 2 * m * nu + 2 * m
    a = complex(-pt.x ** (2 * m), pt.t)
    z = pt.z
    direction = complex(math.cos(angle), math.sin(angle))
    scale = _peak_scale(order, z * direction, power)

    def integrand(s: np.ndarray) -> np.ndarray:
        u = z * s
        log_value = log_P(order, u) + a * s ** (2 * m)
        return 2 * m * principal_power(s, power - 1) * np.exp(log_value)

    return integrate_decaying_halfline(integrand, ContourSegment.ray(0j, direction), spec, scale)


def _tau_oscillatory(order: ModelOrder, pt: EvalPoint, nu: float, spec: QuadSpec) -> QuadResult:
    m = order.m
    c = pt.x ** (2 * m)
    z = pt.z

    def envelope(tau: np.ndarray) -> np.ndarray:
        tau = np.maximum(tau.real, 0.0)
        u = z * np.power(tau, 1.0 / (2 * m))
        return np.exp(log_P(order, u) - c * tau) * np.power(tau, nu)

    return integrate_oscillatory_halfline(envelope, pt.t, ContourSegment.ray(0j, 1), spec)


def nagel_integral(order: ModelOrder, pt: EvalPoint, nu: float,
                   spec: Optional[QuadSpec] = None, method: Optional[str] = None) -> KernelValue:
    """
    int_0^inf e^{i t tau} e^{-x^{2m} tau} P(z tau^{1/2m}) tau^nu dtau for any nu >= 0.

    Args:
        method: ``oscillatory`` (default for t != 0) integrates in tau with the
            alternating-chunk engine; ``rotated`` turns the s-ray into the
            decay sector of e^{i t s^{2m}}

    Raises:
        DomainError: At z = 0
        ConvergenceError: If the outer integral does not converge
    """
    _check_point(pt)
    spec = spec or QuadSpec()
    try:
        if pt.t == 0:
            res = _s_integral(order, pt, nu, spec)
        elif (method or OSCILLATORY) == ROTATED:
            angle = math.copysign(math.pi / (8 * order.m), pt.t)
            res = _s_integral(order, pt, nu, spec, angle)
        elif (method or OSCILLATORY) == OSCILLATORY:
            res = _tau_oscillatory(order, pt, nu, spec)
        else:
            raise ValueError(f"Unknown method: {method}")
    except DivergenceError as e:
        raise ConvergenceError(
            f"outer integral does not converge at {pt!r}; try a larger |y| ({e})"
        ) from e
    if not res.converged:
        logger.warning("Nagel integral at %r did not reach the tolerance", pt)
    return KernelValue(complex(res.value), NAGEL, float(res.err_est))


def K_nagel(order: ModelOrder, pt: EvalPoint, spec: Optional[QuadSpec] = None,
            method: Optional[str] = None) -> KernelValue:
    """Szegő kernel K(z, t) (second argument at the origin) by the Nagel route."""
    return nagel_integral(order, pt, kernel_nu(order, SZEGO), spec, method)


def KB_nagel(order: ModelOrder, pt: EvalPoint, spec: Optional[QuadSpec] = None,
             method: Optional[str] = None) -> KernelValue:
    """Bergman kernel K^B(z, t) by the Nagel route."""
    return nagel_integral(order, pt, kernel_nu(order, BERGMAN), spec, method)
