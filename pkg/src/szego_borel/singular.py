"""
Bounded solutions g_xi and the singular solutions S^nu(xi; z, t).

S^nu(xi; z, t) = int_0^inf e^{i t tau} e^{-x^{2m} tau} e^{xi z tau^{1/2m}} tau^nu dtau

is evaluated after the substitution tau = s^{2m}, or in tau itself when the
oscillatory engine handles a non-zero t.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .numerics.quadrature import (
    ContourSegment,
    QuadResult,
    QuadSpec,
    integrate_decaying_halfline,
    integrate_oscillatory_halfline,
)
from .numerics.rules import FixedRule
from .numerics.special import log_gamma, principal_power
from .phi import ModelOrder, phi_values
from .zeros import ZeroTable

logger = logging.getLogger(__name__)

OSCILLATORY = "oscillatory"
ROTATED = "rotated"
REAL = "real"
S_METHODS = (OSCILLATORY, ROTATED, REAL)

# log of the largest |g_xi| reported as a number
LOG_OVERFLOW_GUARD = 700.0
UNBOUNDED_SIGNAL = 1e6
# natural-log drop below the peak where shared s-rules stop
LOG_TRUNCATION = 46.0


@dataclass(frozen=True)
class EvalPoint:
    """A point (z, t) = (x + iy, t) of C x R."""

    x: float
    y: float
    t: float = 0.0

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def sigma(self) -> int:
        """Sign of y (0 on the singular support)."""
        return int(np.sign(self.y))

    def in_sector(self, order: ModelOrder) -> bool:
        """True when |arg z - sigma pi/2| < pi / (2(2m - 1))."""
        if self.y == 0:
            return False
        return abs(np.angle(self.z) - self.sigma * math.pi / 2) < order.theta0

    def conjugate(self) -> "EvalPoint":
        return EvalPoint(self.x, -self.y, -self.t)

    def scaled(self, factor: float) -> "EvalPoint":
        """Same t, z multiplied by factor."""
        return EvalPoint(self.x * factor, self.y * factor, self.t)


@dataclass(frozen=True)
class SingularSolutionSpec:
    """Which singular solution: a zero index j or a generic xi, and nu >= 0."""

    nu: float
    j: Optional[int] = None
    xi: Optional[complex] = None

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be non-negative")
        if (self.j is None) == (self.xi is None):
            raise ValueError("Give exactly one of j or xi")

    def resolve(self, table: ZeroTable, pt: EvalPoint) -> complex:
        if self.xi is not None:
            return complex(self.xi)
        return pt.sigma * 1j * table[self.j].a


@dataclass(frozen=True)
class GValue:
    """
    g_xi(u) with its log-magnitude.

    ``unbounded`` is set when the log-magnitude passes the overflow guard;
    ``value`` is then infinite.
    """

    value: complex
    log_magnitude: float
    unbounded: bool
    branch: str


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    sup_window: float
    edge_magnitude: float
    unbounded_at: Optional[float]
    branch: str


@dataclass(frozen=True)
class GevreyEstimate:
    s_hat: float
    monotone: bool
    slopes: Tuple[float, ...]


# g_xi -----------------------------------------------------------------------

def _exponent(m: int, xi: complex, s: np.ndarray) -> np.ndarray:
    return -2.0 * (s ** (2 * m) - xi * s)


def _saddle(m: int, xi: complex) -> float:
    """Maximum of Re(-2 s^{2m} + 2 xi s) on the real line."""
    return math.copysign((abs(xi.real) / (2 * m)) ** (1.0 / (2 * m - 1)), xi.real)


def _log_halfline(order: ModelOrder, xi: complex, u: float, direction: int,
                  spec: QuadSpec) -> Tuple[complex, float]:
    """
    log of int e^{-2(s^{2m} - xi s)} ds from u towards direction*infinity.

    Returns:
        (log of the integral, reference exponent taken out)
    """
    m = order.m
    saddle = _saddle(m, xi)
    ref = float(_exponent(m, xi, np.array([u]))[0].real)
    slope = abs(4.0 * m * u ** (2 * m - 1) - 2.0 * xi.real)
    scale = min(1.0, 4.0 / slope) if slope > 0 else 1.0
    if (saddle - u) * direction > 0:
        ref = max(ref, float(_exponent(m, xi, np.array([saddle]))[0].real))
        scale = max(scale, abs(saddle - u))

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.exp(_exponent(m, xi, s) - ref)

    ray = ContourSegment.ray(complex(u), direction)
    res = integrate_decaying_halfline(integrand, ray, QuadSpec(spec.rel_tol, 0.0, spec.max_evals), scale)
    value = res.value * (1 if direction > 0 else -1)
    if value == 0:
        return complex(-math.inf), ref
    return complex(np.log(value)), ref


def _log_full_minus_tail(order: ModelOrder, xi: complex, u: float,
                         spec: QuadSpec) -> Tuple[complex, float]:
    """log(phi(xi) - int_u^inf), for u right of the real saddle and phi(xi) != 0."""
    value, _ = phi_values(order, [xi])
    log_tail, ref = _log_halfline(order, xi, u, 1, spec)
    tail = np.exp(log_tail + ref) if ref + log_tail.real > -745 else 0j
    return complex(np.log(complex(value[0]) - tail)), 0.0


def _phi_near_zero(order: ModelOrder, xi: complex, rel: float = 1e-9) -> bool:
    value, _ = phi_values(order, [xi])
    slope, _ = phi_values(order, [xi], 1)
    return abs(value[0]) <= rel * max(1.0, abs(xi)) * abs(slope[0])


def g_xi(order: ModelOrder, xi: complex, u: float, spec: Optional[QuadSpec] = None,
         near_zero: Optional[bool] = None) -> GValue:
    """
    Bounded-solution candidate g_xi(u) = e^{-xi u + u^{2m}} int_{-inf}^u e^{-2(s^{2m} - xi s)} ds.

    For u > 0 and phi(xi) = 0 the integral is replaced by minus the tail
    from u to infinity.

    Args:
        order: Model order
        xi: Complex parameter
        u: Real point
        spec: Tolerances of the inner integral
        near_zero: Override the phi(xi) = 0 test

    Returns:
        GValue; unbounded=True is the growth signal, not a failure
    """
    spec = spec or QuadSpec()
    xi = complex(xi)
    u = float(u)
    if not math.isfinite(u):
        raise DomainError("g_xi needs a finite u")
    m = order.m
    if near_zero is None:
        near_zero = u > 0 and _phi_near_zero(order, xi)
    if u > 0 and near_zero:
        log_int, ref = _log_halfline(order, xi, u, 1, spec)
        log_int += math.pi * 1j
        branch = "tail"
    elif u > _saddle(m, xi):
        log_int, ref = _log_full_minus_tail(order, xi, u, spec)
        branch = "direct"
    else:
        log_int, ref = _log_halfline(order, xi, u, -1, spec)
        branch = "direct"
    log_g = -xi * u + u ** (2 * m) + ref + log_int
    log_mag = float(log_g.real)
    if log_mag > LOG_OVERFLOW_GUARD:
        return GValue(complex(math.inf), log_mag, True, branch)
    return GValue(complex(np.exp(log_g)) if math.isfinite(log_mag) else 0j, log_mag, False, branch)


def boundedness_probe(order: ModelOrder, xi: complex, window: Tuple[float, float] = (-6.0, 6.0),
                      threshold: float = 1e3, u_max: float = 8.0, samples: int = 121,
                      spec: Optional[QuadSpec] = None) -> BoundednessReport:
    """
    Numerical form of the dichotomy: g_xi is bounded on the real line exactly
    when phi(xi) = 0.

    The window is sampled; past its right edge the scan continues to u_max
    looking for the growth signal.
    """
    near_zero = _phi_near_zero(order, complex(xi))
    grid = np.linspace(window[0], max(u_max, window[1]), samples)
    sup_window = 0.0
    edge = math.nan
    unbounded_at = None
    branch = "direct"
    for u in grid:
        g = g_xi(order, xi, u, spec, near_zero=near_zero and u > 0)
        branch = g.branch if u > 0 else branch
        magnitude = math.exp(min(g.log_magnitude, LOG_OVERFLOW_GUARD))
        if g.unbounded or magnitude > UNBOUNDED_SIGNAL:
            unbounded_at = float(u)
            break
        if u <= window[1]:
            sup_window = max(sup_window, magnitude)
            edge = magnitude
    bounded = unbounded_at is None and sup_window < threshold and edge <= sup_window
    logger.debug("boundedness probe xi=%r: bounded=%s sup=%.3g", xi, bounded, sup_window)
    return BoundednessReport(bounded, sup_window, edge, unbounded_at, branch)


# S^nu -------------------------------------------------------------------------

def _power(order: ModelOrder, nu: float) -> float:
    return 2 * order.m * nu + 2 * order.m


def S_closed_form(order: ModelOrder, xi: complex, z: complex, nu: float) -> complex:
    """2m Gamma(2m nu + 2m) / (-xi z)^{2m nu + 2m}, the value at x = 0, t = 0."""
    p = _power(order, nu)
    w = -complex(xi) * complex(z)
    if w.real <= 0:
        raise DomainError("closed form needs Re(xi z) < 0")
    return complex(2 * order.m * np.exp(log_gamma(p) - p * np.log(w)))


def _check_integrable(xi: complex, pt: EvalPoint) -> None:
    if pt.x == 0 and (complex(xi) * pt.z).real >= 0:
        raise DomainError(
            f"S is not integrable at x=0 unless Re(xi z) < 0 (xi={xi!r}, z={pt.z!r})"
        )


def _s_real(order: ModelOrder, xi: complex, pt: EvalPoint, nu: float,
            spec: QuadSpec, angle: float = 0.0) -> QuadResult:
    """2m int s^{2m nu + 2m - 1} e^{(it - x^{2m}) s^{2m} + xi z s} ds along arg s = angle."""
    m = order.m
    p = _power(order, nu)
    a = complex(-pt.x ** (2 * m), pt.t)
    b = complex(xi) * pt.z
    direction = complex(np.exp(1j * angle))
    # first panel ends at the maximum of the modulus along the ray
    r = np.geomspace(1e-4, 1e4, 400)
    log_mod = (p - 1) * np.log(r) + (a * direction ** (2 * m)).real * r ** (2 * m) \
        + (b * direction).real * r
    scale = float(r[np.argmax(log_mod)])

    def integrand(s: np.ndarray) -> np.ndarray:
        return 2 * m * principal_power(s, p - 1) * np.exp(a * s ** (2 * m) + b * s)

    ray = ContourSegment.ray(0j, direction)
    return integrate_decaying_halfline(integrand, ray, spec, scale)


def _s_oscillatory(order: ModelOrder, xi: complex, pt: EvalPoint, nu: float,
                   spec: QuadSpec) -> QuadResult:
    m = order.m
    b = complex(xi) * pt.z
    c = pt.x ** (2 * m)

    def envelope(tau: np.ndarray) -> np.ndarray:
        tau = tau.real
        root = np.power(np.maximum(tau, 0.0), 1.0 / (2 * m))
        return np.exp(-c * tau + b * root) * np.power(np.maximum(tau, 0.0), nu)

    return integrate_oscillatory_halfline(envelope, pt.t, ContourSegment.ray(0j, 1), spec)


def S_generic(order: ModelOrder, xi: complex, pt: EvalPoint, nu: float,
              spec: Optional[QuadSpec] = None, method: Optional[str] = None) -> complex:
    """
    S^nu(xi; z, t).

    Args:
        order: Model order
        xi: Complex parameter
        pt: Evaluation point
        nu: Exponent, nu >= 0
        spec: Tolerances
        method: ``oscillatory`` (default for t != 0), ``rotated`` (ray in the
            s-plane turned into the decay sector of e^{i t s^{2m}}) or ``real``

    Raises:
        DomainError: If the integral diverges at x = 0
    """
    if nu < 0:
        raise ValueError("nu must be non-negative")
    spec = spec or QuadSpec()
    xi = complex(xi)
    _check_integrable(xi, pt)
    if method is None:
        if pt.x == 0 and pt.t == 0:
            return S_closed_form(order, xi, pt.z, nu)
        method = OSCILLATORY if pt.t != 0 else REAL
    if method not in S_METHODS:
        raise ValueError(f"Unknown method: {method}. Must be one of {S_METHODS}.")
    if pt.t == 0 or method == REAL:
        return complex(_s_real(order, xi, pt, nu, spec).value)
    if method == ROTATED:
        angle = math.copysign(math.pi / (8 * order.m), pt.t)
        return complex(_s_real(order, xi, pt, nu, spec, angle).value)
    return complex(_s_oscillatory(order, xi, pt, nu, spec).value)


def S_j(order: ModelOrder, table: ZeroTable, j: int, pt: EvalPoint, nu: float,
        spec: Optional[QuadSpec] = None, method: Optional[str] = None) -> complex:
    """
    Singular solution S_j^nu(z, t), i.e. S_generic at xi = sigma(y) i a_j.

    Raises:
        DomainError: On the singular support y = 0
    """
    if pt.y == 0:
        raise DomainError("S_j is undefined on the singular support set {y = 0}")
    return S_generic(order, pt.sigma * 1j * table[j].a, pt, nu, spec, method)


def S_j_many(order: ModelOrder, table: ZeroTable, pt: EvalPoint, nu: float,
             spec: Optional[QuadSpec] = None, method: Optional[str] = None,
             count: Optional[int] = None) -> np.ndarray:
    """S_j for j = 1..count (default: the whole table)."""
    count = count or len(table)
    return np.array([S_j(order, table, j, pt, nu, spec, method) for j in range(1, count + 1)])


def _s_ray(pt: EvalPoint, order: ModelOrder) -> complex:
    if pt.t == 0:
        return 1 + 0j
    return complex(np.exp(1j * math.copysign(math.pi / (8 * order.m), pt.t)))


def _s_group(order: ModelOrder, b: np.ndarray, pt: EvalPoint, p: float,
             spec: QuadSpec, max_halvings: int = 6) -> np.ndarray:
    """
    2m int_ray s^{p-1} e^{a s^{2m} + b_k s} ds for every b_k, on one shared rule.
    """
    m = order.m
    a = complex(-pt.x ** (2 * m), pt.t)
    direction = _s_ray(pt, order)
    r = np.geomspace(1e-4, 1e4, 800)
    slowest = float(np.max((b * direction).real))
    log_mod = (p - 1) * np.log(r) + (a * direction ** (2 * m)).real * r ** (2 * m) + slowest * r
    live = np.flatnonzero(log_mod >= log_mod.max() - LOG_TRUNCATION)
    extent = float(r[min(live[-1] + 1, r.size - 1)])
    fastest = float(np.max(np.abs(b)))
    width = min(extent / 8.0, 2.0 / max(fastest, 1e-300))
    seg = ContourSegment.segment(0j, extent * direction)
    for _ in range(max_halvings + 1):
        panels = max(int(math.ceil(extent / width)), 1)
        rule = FixedRule.on_segment(seg, np.linspace(0.0, 1.0, panels + 1))
        s = rule.nodes
        with np.errstate(under="ignore"):
            values = 2 * m * principal_power(s, p - 1)[None, :] \
                * np.exp(a * s[None, :] ** (2 * m) + b[:, None] * s[None, :])
        result, err = rule.integrate(values)
        if np.all(err <= np.maximum(spec.rel_tol * np.abs(result), spec.abs_tol)):
            return result
        width /= 2.0
    logger.warning("S rule error %.2e above tolerance after %d halvings",
                   float(np.max(err / np.maximum(np.abs(result), spec.abs_tol))), max_halvings)
    return result


def S_many(order: ModelOrder, xis: Sequence[complex], pt: EvalPoint, nu: float,
           spec: Optional[QuadSpec] = None) -> np.ndarray:
    """
    S^nu(xi_k; z, t) for an array of xi at one point.

    The closed form is used at x = t = 0; otherwise the xi are grouped by the
    size of xi z and each group shares a fixed rule on the (rotated) s-ray.
    """
    if nu < 0:
        raise ValueError("nu must be non-negative")
    spec = spec or QuadSpec()
    xis = np.asarray(xis, dtype=complex)
    shape = xis.shape
    xis = xis.ravel()
    b = xis * pt.z
    if pt.x == 0 and np.any(b.real >= 0):
        raise DomainError("S is not integrable at x=0 unless Re(xi z) < 0")
    p = _power(order, nu)
    if pt.x == 0 and pt.t == 0:
        return (2 * order.m * np.exp(log_gamma(p) - p * np.log(-b))).reshape(shape)
    out = np.empty(b.shape, dtype=complex)
    buckets = np.ceil(np.log2(np.maximum(np.abs(b), 1.0)))
    for bucket in np.unique(buckets):
        idx = np.flatnonzero(buckets == bucket)
        for chunk in np.array_split(idx, max(1, idx.size // 256)):
            out[chunk] = _s_group(order, b[chunk], pt, p, spec)
    return out.reshape(shape)


def t_derivative_closed_form(order: ModelOrder, a_j: float, y: float, k: int) -> float:
    """
    log |d^k/dt^k S_j^{1/m}| at (0 + iy, 0):
    log 2m + log Gamma(2mk + 2m + 2) - (2mk + 2m + 2) log(|y| a_j).
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a non-negative integer")
    if y == 0:
        raise DomainError("y must be non-zero")
    m = order.m
    p = 2 * m * k + 2 * m + 2
    return math.log(2 * m) + log_gamma(p) - p * math.log(abs(y) * a_j)


def gevrey_order_estimate(log_derivatives: Sequence[float],
                          k_values: Sequence[int]) -> GevreyEstimate:
    """
    Gevrey order s from log |D_k| ~ s k log k + (lower order).

    k times the second difference of log |D_k| behaves like s + O(1/k); the
    intercept of its regression on 1/k is returned.
    """
    logs = np.asarray(log_derivatives, dtype=float)
    ks = np.asarray(k_values, dtype=float)
    if logs.size < 6 or logs.size != ks.size:
        raise ValueError("gevrey_order_estimate needs at least 6 matching values")
    h = np.diff(ks)
    if not np.allclose(h, h[0]):
        raise ValueError("k values must be equally spaced")
    h = h[0]
    second = (logs[2:] - 2 * logs[1:-1] + logs[:-2]) / h ** 2
    k_mid = ks[1:-1]
    slopes = k_mid * second
    tail = slice(len(slopes) // 3, None)
    _, intercept = np.polyfit(1.0 / k_mid[tail], slopes[tail], 1)
    monotone = bool(np.all(np.diff(logs[len(logs) // 2:]) > 0))
    if not monotone:
        logger.warning("derivative sequence is not monotone in k")
    return GevreyEstimate(float(intercept), monotone, tuple(float(v) for v in slopes))


def large_xi_sequence(order: ModelOrder, pt: EvalPoint, nu: float,
                         magnitudes: Sequence[float], spec: Optional[QuadSpec] = None) -> List[complex]:
    """
    |xi|^{2m nu + 2m} S^nu(xi; z, t) along xi = i * magnitude * sigma(y).

    The sequence tends to a non-zero constant as |xi| grows.
    """
    p = _power(order, nu)
    out = []
    for r in magnitudes:
        xi = pt.sigma * 1j * r
        out.append(r ** p * S_generic(order, xi, pt, nu, spec))
    return out
