"""
Borel density H^nu(z, t; p) and the Borel-summed kernels.

    H^nu(z, t; p) = sum_j p^{f_j} / Gamma(f_j + 1) * S_j^nu(z, t) / phi'(sigma i a_j)

is summed term by term for small p.  For larger p it is the integral of

    p^zeta / Gamma(zeta + 1) * S^nu(G(zeta)) G'(zeta) / phi(G(zeta))

along a vertical line left of the first residue exponent, whose poles
f_j reproduce the series.  The kernel is int_0^inf e^{-p} H dp with the
series integrated exactly on [0, p_switch] and the line representation on
[p_switch, inf).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.special as sc

from .cache import cached
from .contours import TRUNCATION, first_zero, log_phi_nodes
from .errors import ConvergenceError, DomainError, PrecisionLossError
from .maps import ConformalMaps
from .nagel import BOREL_CONTOUR, BOREL_SERIES, SZEGO, KernelValue, kernel_nu
from .numerics.quadrature import ContourSegment, QuadSpec, integrate_segment
from .numerics.rules import FixedRule, graded_breaks
from .numerics.special import compensated_sum, log_reciprocal_gamma
from .phi import ModelOrder
from .singular import EvalPoint, S_many
from .utils.validation import validate_positive
from .zeros import ZeroTable, residue_convergence_threshold

logger = logging.getLogger(__name__)

SERIES = "series"
CONTOUR = "contour"

PRECISION_LOSS = 1e-13
# digits the series side of K_borel may lose to cancellation
SERIES_DIGITS = 6.0
MAX_P_SWITCH = 50.0
LINE_HEIGHT = 2.0 * (TRUNCATION + 10.0) / math.pi


@dataclass(frozen=True)
class BorelDensitySample:
    """
    H at one p.

    ``count`` is the number of series terms or of line nodes used.
    """

    p: float
    H: complex
    route: str
    count: int
    err_est: float
    precision_loss: bool = False


def check_sector_point(order: ModelOrder, pt: EvalPoint) -> None:
    if pt.y == 0:
        raise DomainError("H is undefined on the singular support set {y = 0}")
    if not pt.in_sector(order):
        raise DomainError(
            f"{pt!r} lies outside the sector |arg z - sigma pi/2| < {order.theta0:.4g}"
        )


def residue_weights(table: ZeroTable, pt: EvalPoint, start: int = 1
                    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Exponents f_j, points xi_j = sigma i a_j and weights 1/phi'(xi_j) for j >= start.
    """
    records = table.records[start - 1:]
    if start < 1 or not records:
        raise ValueError(f"start={start} is outside the table (1..{len(table)})")
    sigma = pt.sigma
    f = np.array([r.f for r in records])
    xi = sigma * 1j * np.array([r.a for r in records])
    # phi' is odd
    w = sigma / np.array([r.phi_prime for r in records])
    return f, xi, w


def _series_cutoff(log_mag: np.ndarray, floor: float) -> Optional[Tuple[int, float]]:
    """
    Number of terms after which the geometric tail bound is below exp(floor),
    with that bound; None if the terms never get there.
    """
    peak = int(np.argmax(log_mag))
    for n in range(max(peak, 1), len(log_mag)):
        step = log_mag[n] - log_mag[n - 1]
        if not step < 0:
            continue
        ratio = math.exp(step)
        if ratio == 0.0:
            return n + 1, 0.0
        tail = log_mag[n] + math.log(ratio / (1.0 - ratio))
        if tail <= floor:
            return n + 1, math.exp(tail)
    return None


def _sum_terms(terms: np.ndarray, log_mag: np.ndarray, what: str) -> Tuple[complex, float, int, bool]:
    """Compensated sum of the leading terms; returns (sum, err, count, precision_loss)."""
    largest = float(np.max(log_mag))
    cut = _series_cutoff(log_mag, largest + math.log(1e-17))
    if cut is None:
        raise ConvergenceError(
            f"zero table exhausted before the {what} converged; "
            "use the contour route or a longer table"
        )
    n, tail = cut
    total = compensated_sum(terms[:n])
    scale = math.exp(largest)
    lost = abs(total) < PRECISION_LOSS * scale
    if lost:
        logger.warning("%s lost all digits to cancellation (largest term %.3e, sum %.3e)",
                       what, scale, abs(total))
    return total, tail + n * np.finfo(float).eps * scale, n, lost


def H_series(order: ModelOrder, table: ZeroTable, pt: EvalPoint, p: float, nu: float,
             spec: Optional[QuadSpec] = None, start: int = 1) -> BorelDensitySample:
    """
    H^nu(z, t; p) from the residue series (terms with j >= start).

    Raises:
        DomainError: Outside the sector or on y = 0
        ConvergenceError: If the table ends before the terms have decayed
    """
    p = validate_positive("p", p)
    check_sector_point(order, pt)
    f, xi, w = residue_weights(table, pt, start)
    s_values = S_many(order, xi, pt, nu, spec)
    damping = f * math.log(p) - sc.gammaln(f + 1.0)
    with np.errstate(divide="ignore"):
        log_mag = damping + np.log(np.abs(w * s_values))
    terms = np.exp(damping) * w * s_values
    total, err, n, lost = _sum_terms(terms, log_mag, f"H series at p={p:g}")
    if lost:
        logger.warning("switch to H_contour at p=%g", p)
    return BorelDensitySample(p, total, SERIES, n, err, lost)


# Vertical line ------------------------------------------------------------------

@dataclass(frozen=True)
class BorelLine:
    """
    Fixed rule on Re zeta = abscissa with the p-independent part of the
    integrand stored at its nodes.
    """

    abscissa: float
    rule: FixedRule
    log_kernel: np.ndarray
    s_values: np.ndarray

    def __len__(self) -> int:
        return len(self.rule)

    def density(self, p) -> Tuple[np.ndarray, np.ndarray]:
        """
        H at each p with the Kronrod-Gauss error estimate.
        """
        p = np.atleast_1d(np.asarray(p, dtype=float))
        exponent = np.log(p)[:, None] * self.rule.nodes[None, :] + self.log_kernel[None, :]
        values = np.exp(exponent) * self.s_values[None, :]
        kronrod, err = self.rule.integrate(values)
        scale = -1.0 / (2j * math.pi)
        return scale * kronrod, abs(scale) * err


def line_density(p: float) -> float:
    """Panels per unit height, enough to resolve p^{i tau}."""
    return 2.0 ** max(1, math.ceil(math.log2(max(math.log(max(p, 1.0)) / 2.0, 1.0))))


def _line_breaks(density: float, singular: bool) -> np.ndarray:
    largest = 1.0 / (2.0 * LINE_HEIGHT * density)
    first = 1e-10 if singular else largest
    half = graded_breaks(0.0, 0.5, first, 2.0, largest)
    return np.concatenate([0.5 - half[::-1], 0.5 + half[1:]])


@cached(key_prefix="lines")
def borel_line(m: int, x: float, y: float, t: float, nu: float, abscissa: float,
               density: float, rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> BorelLine:
    """
    Line data for H at the point (x + iy, t).

    The nodes are graded towards zeta = -1/4 when the line passes through
    it, where G' behaves like |zeta + 1/4|^{-1/(2m)}.
    """
    order = ModelOrder(m)
    pt = EvalPoint(x, y, t)
    maps = ConformalMaps(order)
    sigma = pt.sigma
    singular = abscissa <= -0.25
    seg = ContourSegment.segment(complex(abscissa, -LINE_HEIGHT), complex(abscissa, LINE_HEIGHT))
    rule = FixedRule.on_segment(seg, _line_breaks(density, singular))
    zeta = rule.nodes
    xi = maps.G(zeta, sigma)
    s_values = S_many(order, xi, pt, nu, QuadSpec(rel_tol, abs_tol))
    log_kernel = log_reciprocal_gamma(zeta + 1.0) + np.log(maps.G_prime(zeta, sigma)) \
        - log_phi_nodes(order, xi)
    with np.errstate(divide="ignore"):
        log_mag = log_kernel.real + np.log(np.abs(s_values))
    edge = max(log_mag[0], log_mag[-1]) - np.max(log_mag)
    if edge > -30.0:
        logger.warning("line integrand at Im zeta = +/-%g is only e^%.1f below its peak",
                       LINE_HEIGHT, edge)
    logger.debug("Borel line m=%d at (%g, %g, %g) c=%g: %d nodes", m, x, y, t, abscissa, len(rule))
    return BorelLine(float(abscissa), rule, log_kernel, s_values)


def exponent_window(order: ModelOrder, table: Optional[ZeroTable] = None,
                    start: int = 1) -> Tuple[float, float]:
    """(f_{start-1}, f_start), with f_0 = -1/4."""
    if start == 1:
        a_1 = table[1].a if table is not None else first_zero(order.m)
        return -0.25, order.c2 * a_1 ** order.exponent - 0.25
    if table is None:
        raise ValueError("a zero table is needed for start > 1")
    return table[start - 1].f, table[start].f


def default_abscissa(order: ModelOrder, pt: EvalPoint, nu: float, lower: float,
                     upper: float) -> float:
    """
    Real part of the vertical line, between the residue exponents lower and upper.

    At x = t = 0 the closed form of S grows like |xi|^{-2m nu - 2m} towards
    the vertex, so the line is kept where |G| is within e^{5/(2m nu + 2m)}
    of the next zero.
    """
    if pt.x == 0 and pt.t == 0:
        power = 2 * order.m * nu + 2 * order.m
        near = (upper + 0.25) * math.exp(-5.0 * order.exponent / power) - 0.25
        return max(0.5 * (lower + upper), near)
    if lower <= -0.25:
        return -0.25
    return 0.5 * (lower + upper)


def line_for(order: ModelOrder, pt: EvalPoint, nu: float, p_max: float,
              spec: QuadSpec, abscissa: Optional[float], table: Optional[ZeroTable],
              start: int) -> BorelLine:
    lower, upper = exponent_window(order, table, start)
    if abscissa is None:
        abscissa = default_abscissa(order, pt, nu, lower, upper)
    elif not (lower < abscissa < upper or (abscissa == lower == -0.25 and (pt.x, pt.t) != (0, 0))):
        raise DomainError(f"abscissa {abscissa} must lie in ({lower:.6g}, {upper:.6g})")
    # panels no wider than the distance to the nearest pole
    gap = min(upper - abscissa, abscissa - lower if lower > -0.25 else math.inf)
    density = max(line_density(p_max), 2.0 ** math.ceil(math.log2(max(1.0, 1.0 / gap))))
    return borel_line(order.m, float(pt.x), float(pt.y), float(pt.t), float(nu),
                      float(abscissa), density, spec.rel_tol, spec.abs_tol)


def H_contour(order: ModelOrder, pt: EvalPoint, p: float, nu: float,
              spec: Optional[QuadSpec] = None, abscissa: Optional[float] = None,
              table: Optional[ZeroTable] = None, start: int = 1) -> BorelDensitySample:
    """
    H^nu(z, t; p) from the vertical-line integral.

    Args:
        abscissa: Real part of the line; -1/4 by default, shifted right of
            -1/4 at x = t = 0
        table, start: Drop the residues j < start (the line then runs
            between f_{start-1} and f_start)
    """
    p = validate_positive("p", p)
    check_sector_point(order, pt)
    spec = spec or QuadSpec()
    line = line_for(order, pt, nu, p, spec, abscissa, table, start)
    value, err = line.density(p)
    return BorelDensitySample(p, complex(value[0]), CONTOUR, len(line), float(err[0]))


# Kernels ----------------------------------------------------------------------

def default_p_switch(order: ModelOrder, table: ZeroTable) -> float:
    """
    Largest p at which the series side stays accurate.

    The weights 1/phi'(i a_j) grow like q0^j with q0 the residue convergence
    threshold, so the terms peak near e^{q0 p}: this bounds p by the digit
    budget and by the length of the table.
    """
    q0 = residue_convergence_threshold(order)
    digits = SERIES_DIGITS / (q0 * math.log10(math.e))
    n = len(table)
    cover = math.exp((sc.gammaln(n + 1.0) + math.log(1e-16)) / n) / q0
    return min(MAX_P_SWITCH, digits, cover)


def _series_part(order: ModelOrder, table: ZeroTable, pt: EvalPoint, nu: float,
                 p_switch: float, spec: QuadSpec, start: int) -> Tuple[complex, float]:
    """int_0^{p_switch} e^{-p} H dp, term by term with the incomplete gamma function."""
    if p_switch == 0:
        return 0j, 0.0
    f, xi, w = residue_weights(table, pt, start)
    s_values = S_many(order, xi, pt, nu, spec)
    partial = sc.gammainc(f + 1.0, p_switch)
    terms = w * s_values * partial
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(terms))
    total, err, _, lost = _sum_terms(terms, log_mag, f"series on [0, {p_switch:g}]")
    if lost:
        raise PrecisionLossError(f"series on [0, {p_switch:g}] cancelled to nothing",
                                 float(np.exp(np.max(log_mag))), abs(total))
    return total, err


def _contour_part(line: BorelLine, p_switch: float, spec: QuadSpec) -> Tuple[complex, float]:
    """int_{p_switch}^inf e^{-p} H dp, with the tail past the cut bounded by C p^{-1/4}."""
    grid = np.linspace(max(p_switch, 1e-3), p_switch + 60.0, 121)
    values, _ = line.density(grid)
    bound = float(np.max(np.abs(values) * grid ** 0.25))
    tol = max(spec.abs_tol * 1e-2, 1e-17 * bound)
    p_end = p_switch + max(5.0, math.log(max(bound, tol) / tol))

    def integrand(p: np.ndarray) -> np.ndarray:
        h, _ = line.density(p.real)
        return np.exp(-p.real) * h

    res = integrate_segment(integrand, ContourSegment.segment(p_switch, p_end), spec,
                            endpoint_transform=p_switch == 0, initial_panels=8)
    if not res.converged:
        logger.warning("p-integral on [%g, %g] did not reach the tolerance", p_switch, p_end)
    tail = bound * math.gamma(0.75) * sc.gammaincc(0.75, p_end)
    return complex(res.value), res.err_est + tail


def K_borel(order: ModelOrder, table: ZeroTable, pt: EvalPoint, which: str = SZEGO,
            spec: Optional[QuadSpec] = None, p_switch: Optional[float] = None,
            nu: Optional[float] = None, abscissa: Optional[float] = None,
            start: int = 1) -> KernelValue:
    """
    int_0^inf e^{-p} H(z, t; p) dp, the Borel-summed Szegő or Bergman kernel.

    Args:
        which: ``szego`` or ``bergman``
        p_switch: Split point between the two H routes (adaptive by default)
        nu: Override of the exponent (derivatives in t shift it by one each)
        start: Sum over the residues j >= start only

    Raises:
        DomainError: Outside the sector or on y = 0
        ConvergenceError: If a part of the integral fails
    """
    check_sector_point(order, pt)
    spec = spec or QuadSpec()
    nu = kernel_nu(order, which) if nu is None else nu
    if p_switch is None:
        p_switch = default_p_switch(order, table)
    p_switch = validate_positive("p_switch", p_switch, allow_zero=True)
    try:
        series, series_err = _series_part(order, table, pt, nu, p_switch, spec, start)
    except PrecisionLossError as e:
        logger.warning("%s; integrating H along the line from p = 0", e)
        p_switch, series, series_err = 0.0, 0j, 0.0
    line = line_for(order, pt, nu, p_switch + 64.0, spec, abscissa, table, start)
    contour, contour_err = _contour_part(line, p_switch, spec)
    route = BOREL_SERIES if abs(series) >= abs(contour) else BOREL_CONTOUR
    logger.debug("K_borel at %r: series %s, contour %s (p_switch=%g)", pt, series, contour, p_switch)
    return KernelValue(series + contour, route, series_err + contour_err)


def KB_borel(order: ModelOrder, table: ZeroTable, pt: EvalPoint,
             spec: Optional[QuadSpec] = None, **kwargs) -> KernelValue:
    """Bergman kernel by Borel summation, nu = 1 + 1/m."""
    return K_borel(order, table, pt, "bergman", spec, **kwargs)
