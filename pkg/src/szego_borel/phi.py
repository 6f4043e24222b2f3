"""
The entire function phi(x) = int exp(-2(w^{2m} - x w)) dw and its derivatives.

Three independent routes are offered: the even-moment Taylor series, direct
quadrature along a horizontal line through the saddle point, and the
two-saddle asymptotic formula.  The series runs in double precision when its
condition estimate allows it and switches to mpmath otherwise.
"""
import logging
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import mpmath
import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError
from .numerics.quadrature import ContourSegment, QuadSpec, integrate_decaying_halfline
from .utils.validation import validate_order

logger = logging.getLogger(__name__)

SERIES = "series"
QUADRATURE = "quadrature"
ASYMPTOTIC = "asymptotic"
METHODS = (SERIES, QUADRATURE, ASYMPTOTIC)

MAX_TERMS = 10_000
_EPS = np.finfo(float).eps
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class ModelOrder:
    """
    The integer m of the model hypersurface and its derived constants.

    Attributes:
        m: Order, m >= 1
        c0, c1: Constants of the asymptotic formula
        c2: Constant of the zero counting law (zero for m = 1)
        theta0: pi / (2(2m - 1))
    """

    m: int
    c0: float = field(init=False)
    c1: float = field(init=False)
    c2: float = field(init=False)
    theta0: float = field(init=False)

    def __post_init__(self):
        m = validate_order(self.m)
        n = 2 * m - 1
        base = 1.0 / (2 * m)
        bracket = base ** (1.0 / n) - base ** (2.0 * m / n)
        theta0 = math.pi / (2 * n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c0", math.sqrt(math.pi / n) * (2 * m) ** (-1.0 / (4 * m - 2)))
        object.__setattr__(self, "c1", 2.0 * bracket)
        object.__setattr__(self, "c2", 0.0 if m == 1 else (2.0 / math.pi) * bracket * math.cos(theta0))
        object.__setattr__(self, "theta0", theta0)

    @property
    def exponent(self) -> float:
        """2m / (2m - 1), the growth order of phi."""
        return 2.0 * self.m / (2 * self.m - 1)

    @property
    def asymptotic_threshold(self) -> float:
        """|x| above which the asymptotic route is accepted."""
        return (10.0 / self.c1) ** ((2 * self.m - 1) / (2.0 * self.m))

    def saddle(self, x: complex) -> complex:
        """Principal saddle point of 2(x w - w^{2m}), i.e. (x/2m)^{1/(2m-1)}."""
        if x == 0:
            return 0j
        return complex(np.exp(np.log(complex(x) / (2 * self.m)) / (2 * self.m - 1)))


@dataclass(frozen=True)
class PhiEval:
    """Value of phi (or a derivative) with the route that produced it."""

    value: complex
    method: str
    err_est: float


# Series ---------------------------------------------------------------------

@lru_cache(maxsize=64)
def _log_coefficients(m: int, derivative: int, count: int) -> np.ndarray:
    """
    Log of the coefficient of x^{2k - d} in phi^{(d)}, for k < count.

    Coefficients with 2k < d are -inf.
    """
    k = np.arange(count, dtype=float)
    two_k = 2.0 * k
    log_c = (
        two_k * math.log(2.0)
        - sc.gammaln(two_k + 1.0)
        - math.log(m)
        - (two_k + 1.0) / (2.0 * m) * math.log(2.0)
        + sc.gammaln((two_k + 1.0) / (2.0 * m))
    )
    if derivative:
        falling = sc.gammaln(two_k + 1.0) - sc.gammaln(np.maximum(two_k - derivative, 0) + 1.0)
        log_c = np.where(two_k >= derivative, log_c + falling, -np.inf)
    return log_c


def _required_terms(m: int, derivative: int, radius: float, digits: float) -> int:
    """
    Number of terms after which every term at |x| = radius is below the
    largest one by ``digits`` decimal digits.

    Raises:
        ConvergenceError: If more than MAX_TERMS terms would be needed
    """
    if radius == 0:
        return derivative // 2 + 2
    log_c = _log_coefficients(m, derivative, MAX_TERMS)
    power = np.maximum(2 * np.arange(MAX_TERMS) - derivative, 0)
    logs = log_c + power * math.log(radius)
    keep = np.flatnonzero(logs > logs.max() - digits * _LN10 - 5.0)
    count = int(keep[-1]) + 6
    if count >= MAX_TERMS:
        raise ConvergenceError(f"Series needs more than {MAX_TERMS} terms at |x|={radius:g}")
    return count


_QUARTER_TURNS = np.array([1, 1j, -1, -1j])


def _log_terms(m: int, derivative: int, x: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Series terms at each point as log-magnitudes and unit phases, both of
    shape (len(x), count).

    On the real and imaginary axes the phases are exact powers of i.
    """
    log_c = _log_coefficients(m, derivative, MAX_TERMS)[:count]
    power = 2 * np.arange(count) - derivative
    radius = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.log(np.where(radius == 0, 1.0, radius))[:, None]
        logs = log_c[None, :] + power[None, :] * log_r
    # 0**0 = 1 for the constant term, other powers of 0 vanish
    logs = np.where((radius == 0)[:, None] & (power[None, :] != 0), -np.inf, logs)
    angle = np.angle(x)
    on_axis = (x.real == 0) | (x.imag == 0)
    quarter = np.rint(angle / (np.pi / 2)).astype(int)
    exact = _QUARTER_TURNS[np.mod(power[None, :] * quarter[:, None], 4)]
    phases = np.where(on_axis[:, None], exact, np.exp(1j * power[None, :] * angle[:, None]))
    return logs, phases


def _float_series(m: int, derivative: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Double precision series for an array of points.

    Returns:
        (values, error estimates, log10 of the sum of |terms|)
    """
    values = np.empty(x.shape, dtype=complex)
    errors = np.empty(x.shape, dtype=float)
    sizes = np.empty(x.shape, dtype=float)
    order = np.argsort(np.abs(x))
    # Points are processed in blocks of similar modulus to keep the matrices small
    for block in np.array_split(order, max(1, x.size // 256)):
        if block.size == 0:
            continue
        pts = x[block]
        count = _required_terms(m, derivative, float(np.max(np.abs(pts))), 18.0)
        logs, phases = _log_terms(m, derivative, pts, count)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            magnitudes = np.exp(logs)
            terms = magnitudes * phases
        values[block] = terms.sum(axis=1)
        sizes[block] = sc.logsumexp(logs, axis=1) / _LN10
        errors[block] = 4.0 * _EPS * math.sqrt(count) * magnitudes.sum(axis=1) \
            + magnitudes[:, -5:].sum(axis=1)
    return values, errors, sizes


# mpmath keeps its working precision in a process-wide context
_MP_LOCK = threading.RLock()
_MP_COEFFICIENTS: Dict[Tuple[int, int, int], List] = {}


def _mp_coefficients(m: int, derivative: int, count: int, dps: int) -> List:
    """Coefficients of y^{k - k0} in phi^{(d)} / x^{2 k0 - d}, k0 = ceil(d/2)."""
    key = (m, derivative, dps)
    k0 = (derivative + 1) // 2
    with _MP_LOCK, mpmath.workdps(dps):
        cached = _MP_COEFFICIENTS.setdefault(key, [])
        for k in range(k0 + len(cached), count):
            c = (mpmath.mpf(2) ** (2 * k) / mpmath.factorial(2 * k) / m
                 * mpmath.mpf(2) ** (-mpmath.mpf(2 * k + 1) / (2 * m))
                 * mpmath.gamma(mpmath.mpf(2 * k + 1) / (2 * m)))
            if derivative:
                c *= mpmath.factorial(2 * k) / mpmath.factorial(2 * k - derivative)
            cached.append(c)
        return cached[:max(0, count - k0)]


def _mp_series(m: int, derivative: int, x: complex, dps: int, count: int):
    """Horner evaluation of the series in mpmath; returns an mpmath number."""
    coefficients = _mp_coefficients(m, derivative, count, dps)
    k0 = (derivative + 1) // 2
    with _MP_LOCK, mpmath.workdps(dps):
        if x.imag == 0:
            xm = mpmath.mpf(x.real)
        else:
            xm = mpmath.mpc(x.real, x.imag)
        y = xm * xm
        # y is real on both axes, which keeps the loop in real arithmetic
        if x.real == 0 or x.imag == 0:
            y = mpmath.re(y)
        acc = mpmath.mpf(0)
        for c in reversed(coefficients):
            acc = acc * y + c
        return acc * xm ** (2 * k0 - derivative)


def _digits_for(log10_magnitude: float) -> int:
    digits = 25 + 1.6 * max(0.0, log10_magnitude)
    return int(math.ceil(digits / 10.0) * 10)


def _escalate(m: int, derivative: int, x: complex, log10_magnitude: float,
              rel_tol: float) -> Tuple[complex, float]:
    """Evaluate with enough digits to beat the cancellation of the series."""
    dps = _digits_for(log10_magnitude)
    for _ in range(4):
        count = _required_terms(m, derivative, abs(x), dps + 2)
        value = complex(_mp_series(m, derivative, x, dps, count))
        lost = log10_magnitude - math.log10(abs(value)) if value != 0 else float(dps)
        if dps - lost >= -math.log10(rel_tol) + 3:
            logger.debug("series at x=%r used %d digits", x, dps)
            return value, abs(value) * 10.0 ** (lost - dps)
        dps = int(math.ceil((lost + 25 - math.log10(rel_tol)) / 10.0) * 10)
    raise ConvergenceError(f"Series precision escalation failed at x={x!r}")


def phi_values(order: ModelOrder, xs: Sequence[complex], derivative: int = 0,
               rel_tol: float = 1e-12, abs_tol: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    phi^{(derivative)} at many points by the moment series.

    Points whose double precision condition estimate misses the tolerance
    are re-evaluated with mpmath.

    Returns:
        (values, error estimates) as numpy arrays
    """
    x = np.atleast_1d(np.asarray(xs, dtype=complex))
    values, errors, sizes = _float_series(order.m, derivative, x)
    bad = ~(errors <= np.maximum(abs_tol, rel_tol * np.abs(values)))
    if np.any(bad):
        logger.debug("escalating %d of %d series points", int(bad.sum()), x.size)
    for idx in np.flatnonzero(bad):
        values[idx], errors[idx] = _escalate(order.m, derivative, complex(x[idx]),
                                             float(sizes[idx]), rel_tol)
    return values, errors


def log_phi_real(order: ModelOrder, v: Sequence[float]) -> np.ndarray:
    """
    log phi(v) for real v.

    On the real axis every series term is positive, so the logarithm is a
    log-sum-exp of the term logarithms and never overflows.
    """
    v = np.abs(np.atleast_1d(np.asarray(v, dtype=float)))
    out = np.empty(v.shape)
    order_idx = np.argsort(v)
    for block in np.array_split(order_idx, max(1, v.size // 128)):
        if block.size == 0:
            continue
        pts = v[block]
        count = _required_terms(order.m, 0, float(pts.max()), 18.0)
        log_c = _log_coefficients(order.m, 0, MAX_TERMS)[:count]
        two_k = 2.0 * np.arange(count)
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.where(two_k[None, :] == 0, 0.0, two_k[None, :] * np.log(pts)[:, None])
        out[block] = sc.logsumexp(log_c[None, :] + powers, axis=1)
    return out


# Quadrature route -----------------------------------------------------------

def _quadrature(order: ModelOrder, x: complex, derivative: int, spec: QuadSpec) -> PhiEval:
    m = order.m
    sign = 1.0
    if x.real < 0 or (x.real == 0 and x.imag < 0):
        # phi^{(d)}(-x) = (-1)^d phi^{(d)}(x)
        x = -x
        sign = (-1.0) ** derivative
    w0 = order.saddle(x)
    ref = (-2.0 * (w0 ** (2 * m) - x * w0)).real
    curvature = abs(4.0 * m * (2 * m - 1) * w0 ** (2 * m - 2)) if m > 1 else 4.0
    scale = max(0.25, min(2.0, 1.0 / math.sqrt(curvature))) if curvature > 0 else 1.0

    def integrand(w: np.ndarray) -> np.ndarray:
        out = np.exp(-2.0 * (w ** (2 * m) - x * w) - ref)
        if derivative:
            out = out * (2.0 * w) ** derivative
        return out

    start = complex(w0.real, w0.imag)
    right = integrate_decaying_halfline(integrand, ContourSegment.ray(start, 1), spec, scale)
    left = integrate_decaying_halfline(integrand, ContourSegment.ray(start, -1), spec, scale)
    total = right.value - left.value
    factor = math.exp(ref)
    if not (right.converged and left.converged):
        logger.warning("phi quadrature at x=%r did not converge", x)
    return PhiEval(sign * total * factor, QUADRATURE, (right.err_est + left.err_est) * factor)


# Asymptotic route -----------------------------------------------------------

def _sector_argument(x: complex) -> float:
    """arg x taken in (-pi/2, 3pi/2]."""
    arg = math.atan2(x.imag, x.real)
    if arg <= -math.pi / 2:
        arg += 2.0 * math.pi
    return arg


def _log_a(order: ModelOrder, log_r: float, arg: float) -> complex:
    """log A(x) for x = exp(log_r + i arg), branches fixed by arg."""
    m = order.m
    log_x = complex(log_r, arg)
    alpha = (1.0 - m) / (2 * m - 1)
    return math.log(order.c0) + alpha * log_x + order.c1 * np.exp(order.exponent * log_x)


def log_asymptotic(order: ModelOrder, x: complex) -> complex:
    """log of A(x) + A(x e^{-pi i})."""
    log_r = math.log(abs(x))
    arg = _sector_argument(x)
    first = complex(_log_a(order, log_r, arg))
    second = complex(_log_a(order, log_r, arg - math.pi))
    if second.real > first.real:
        first, second = second, first
    return first + np.log1p(np.exp(second - first))


def _check_asymptotic_regime(order: ModelOrder, x: complex, margin: float = 1e-6) -> None:
    if abs(x) < order.asymptotic_threshold:
        raise DomainError(
            f"x={x!r} outside asymptotic regime (|x| < {order.asymptotic_threshold:.6g})"
        )
    arg = _sector_argument(x)
    if not (-math.pi / 2 + margin < arg < 1.5 * math.pi - margin):
        raise DomainError(f"x={x!r} outside asymptotic regime (argument)")


# Public operations ----------------------------------------------------------

def phi(order: ModelOrder, x: complex, method: str = SERIES,
        spec: QuadSpec = QuadSpec()) -> PhiEval:
    """
    Evaluate phi at a complex point.

    Args:
        order: Model order
        x: Point
        method: ``series``, ``quadrature`` or ``asymptotic``
        spec: Tolerances (series and quadrature routes)

    Returns:
        PhiEval

    Raises:
        DomainError: If the asymptotic route is asked below its threshold
    """
    x = complex(x)
    if method == SERIES:
        values, errors = phi_values(order, [x], 0, min(spec.rel_tol, 1e-12), spec.abs_tol)
        return PhiEval(complex(values[0]), SERIES, float(errors[0]))
    if method == QUADRATURE:
        return _quadrature(order, x, 0, spec)
    if method == ASYMPTOTIC:
        _check_asymptotic_regime(order, x)
        log_value = log_asymptotic(order, x)
        return PhiEval(complex(np.exp(log_value)), ASYMPTOTIC, math.nan)
    raise ValueError(f"Unknown method: {method}. Must be one of {METHODS}.")


def phi_derivative(order: ModelOrder, x: complex, k: int) -> complex:
    """
    k-th derivative of phi by term-wise differentiation of the series.

    Raises:
        ValueError: If k is outside 0..2m
    """
    if not 0 <= k <= 2 * order.m:
        raise ValueError(f"Derivative order must lie in 0..{2 * order.m}")
    values, _ = phi_values(order, [complex(x)], k)
    return complex(values[0])


def phi_derivative_quadrature(order: ModelOrder, x: complex, k: int,
                              spec: QuadSpec = QuadSpec()) -> PhiEval:
    """k-th derivative of phi from the integral of (2w)^k times the integrand."""
    return _quadrature(order, complex(x), k, spec)


def log_phi(order: ModelOrder, x: complex) -> complex:
    """Principal-value logarithm of phi(x), safe for large |x|."""
    x = complex(x)
    if x.imag == 0:
        return complex(log_phi_real(order, [x.real])[0])
    with np.errstate(over="ignore", invalid="ignore"):
        values, errors, sizes = _float_series(order.m, 0, np.array([x]))
    value = values[0]
    if np.isfinite(value) and value != 0 and errors[0] <= 1e-12 * abs(value):
        return complex(np.log(value))
    dps = _digits_for(float(sizes[0]))
    count = _required_terms(order.m, 0, abs(x), dps + 2)
    with _MP_LOCK, mpmath.workdps(dps):
        return complex(mpmath.log(_mp_series(order.m, 0, x, dps, count)))


def ode_residual(order: ModelOrder, x: complex) -> float:
    """
    Normalised residual of y^{(2m-1)} - (2^{2m-2}/m) x y = 0 at x.
    """
    m = order.m
    value = phi_derivative(order, x, 0)
    high = phi_derivative(order, x, 2 * m - 1)
    return abs(high - (2.0 ** (2 * m - 2) / m) * complex(x) * value) / (1.0 + abs(value))


def asymptotic_agreement(order: ModelOrder, x_grid: Sequence[complex]) -> List[float]:
    """
    |phi(x) / (A(x) + A(x e^{-pi i})) - 1| for each grid point.

    The ratio is formed in the log domain.
    """
    out = []
    for x in x_grid:
        x = complex(x)
        if x == 0:
            raise DomainError("asymptotic comparison needs x != 0")
        ratio = np.exp(log_phi(order, x) - log_asymptotic(order, x))
        out.append(float(abs(ratio - 1.0)))
    return out
