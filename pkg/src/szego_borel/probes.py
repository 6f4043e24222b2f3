"""
Numerical experiments on the Borel representation: divergence of the formal
residue series, Gevrey growth of t-derivatives, the p^{-1/4} bound on H and
agreement of the two kernel routes.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.special as sc

from .borel import (
    CONTOUR,
    BorelDensitySample,
    K_borel,
    check_sector_point,
    line_for,
    line_density,
    residue_weights,
)
from .nagel import BERGMAN, SZEGO, K_nagel, KB_nagel, kernel_nu
from .numerics.quadrature import QuadSpec
from .numerics.special import log_gamma
from .phi import ModelOrder
from .singular import EvalPoint, GevreyEstimate, S_many, gevrey_order_estimate
from .zeros import ZeroTable

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE = tuple(EvalPoint(0.0, y, t) for t in (0.0, 0.3) for y in (0.8, 1.0, 1.2))


def _increasing_from(values: np.ndarray, sign: int = 1) -> Optional[int]:
    """First 1-based index from which sign * values increase strictly to the end."""
    steps = sign * np.diff(values)
    if steps.size == 0 or not steps[-1] > 0:
        return None
    bad = np.flatnonzero(~(steps > 0))
    return int(bad[-1]) + 2 if bad.size else 1


# Divergence -------------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceReport:
    """
    Log-magnitudes of the formal residue series and of its Borel-damped terms.

    Attributes:
        log_magnitudes: log |S_j / phi'(sigma i a_j)|
        damped_log_magnitudes: The same plus log(p^{f_j} / Gamma(f_j + 1))
        increasing_from: Index from which the formal terms increase strictly
        growth_rate: Fitted geometric ratio of the formal terms over that tail
        damped_decreasing_from: Index from which the damped terms decrease strictly
    """

    log_magnitudes: Tuple[float, ...]
    damped_log_magnitudes: Tuple[float, ...]
    increasing_from: Optional[int]
    growth_rate: float
    damped_decreasing_from: Optional[int]


def divergence_probe(order: ModelOrder, table: ZeroTable, pt: EvalPoint,
                     nu: Optional[float] = None, p: float = 1.0,
                     spec: Optional[QuadSpec] = None) -> DivergenceReport:
    """Term sizes of sum_j S_j^nu / phi'(sigma i a_j), with and without the Borel damping."""
    check_sector_point(order, pt)
    nu = kernel_nu(order, SZEGO) if nu is None else nu
    f, xi, w = residue_weights(table, pt)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(w * S_many(order, xi, pt, nu, spec)))
    damped = logs + f * math.log(p) - sc.gammaln(f + 1.0)
    start = _increasing_from(logs)
    if start is None:
        rate = float("nan")
        logger.warning("formal residue terms are not eventually increasing")
    else:
        tail = slice(max(start - 1, len(logs) // 2), None)
        slope, _ = np.polyfit(np.arange(len(logs))[tail], logs[tail], 1)
        rate = float(math.exp(slope))
    return DivergenceReport(
        tuple(float(v) for v in logs),
        tuple(float(v) for v in damped),
        start,
        rate,
        _increasing_from(damped, -1),
    )


# Gevrey growth ----------------------------------------------------------------

@dataclass(frozen=True)
class GevreyReport:
    """
    t-derivatives of the kernel at (iy, 0).

    Attributes:
        ks: Derivative orders
        log_derivatives: log |d^k/dt^k K|
        ratios: d^k K divided by the closed-form j = 1 term
        ratio_steps: |ratio_k / ratio_{k+1} - 1|
        estimate: Gevrey order fitted to log_derivatives
        remainder: Remainder quotients for N = 2
    """

    ks: Tuple[int, ...]
    log_derivatives: Tuple[float, ...]
    ratios: Tuple[complex, ...]
    ratio_steps: Tuple[float, ...]
    estimate: GevreyEstimate
    remainder: Tuple[float, ...]


def _power(order: ModelOrder, nu: float, k: int) -> float:
    return 2 * order.m * (nu + k) + 2 * order.m


def _check_axis(pt: EvalPoint) -> None:
    if pt.x != 0 or pt.t != 0 or pt.y == 0:
        raise ValueError("derivative probes need x = 0, t = 0 and y != 0")


def _scaled_derivative(order: ModelOrder, table: ZeroTable, pt: EvalPoint, nu: float,
                       k: int, start: int, a_ref: float,
                       spec: Optional[QuadSpec]) -> Tuple[complex, float]:
    """
    (i^{-k} d^k/dt^k of the Borel sum over j >= start at y', log(y'/|y|)).

    On the imaginary axis the kernel is homogeneous of degree -(2m nu + 2m)
    in y, so it is evaluated at the y' where (y' a_ref)^power matches Gamma(power).
    """
    power = _power(order, nu, k)
    y_scaled = math.exp(log_gamma(power) / power) / a_ref
    scaled = EvalPoint(0.0, math.copysign(y_scaled, pt.y), 0.0)
    value = K_borel(order, table, scaled, spec=spec, nu=nu + k, start=start).value
    return value, math.log(y_scaled / abs(pt.y))


def remainder_probe(order: ModelOrder, table: ZeroTable, pt: EvalPoint, N: int,
                    ks: Sequence[int], eps: Optional[float] = None,
                    nu: Optional[float] = None, spec: Optional[QuadSpec] = None) -> Tuple[float, ...]:
    """
    |d^k/dt^k R_N| (|y| (a_N - eps))^{power} / Gamma(power) for each k, where
    R_N is the Borel sum over the residues j >= N and power = 2m(nu + k) + 2m.
    """
    _check_axis(pt)
    if N < 2:
        raise ValueError("N must be at least 2")
    nu = kernel_nu(order, SZEGO) if nu is None else nu
    a_prev, a_n = table[N - 1].a, table[N].a
    eps = 0.1 * (a_n - a_prev) if eps is None else eps
    if not 0 < eps < a_n - a_prev:
        raise ValueError("eps must lie in (0, a_N - a_{N-1})")
    out = []
    for k in ks:
        power = _power(order, nu, k)
        value, _ = _scaled_derivative(order, table, pt, nu, k, N, a_n, spec)
        y_scaled = math.exp(log_gamma(power) / power) / a_n
        out.append(float(abs(value) * math.exp(power * math.log(y_scaled * (a_n - eps))
                                               - log_gamma(power))))
    return tuple(out)


def gevrey_probe(order: ModelOrder, table: ZeroTable, pt: EvalPoint, k_max: int,
                 k_min: int = 0, nu: Optional[float] = None,
                 spec: Optional[QuadSpec] = None) -> GevreyReport:
    """
    Exact t-derivatives of the Borel-summed kernel at (iy, 0) for k_min..k_max.

    Each derivative multiplies the tau-integrand by i tau, i.e. raises nu by
    one in every S_j; no finite differences are taken.
    """
    _check_axis(pt)
    if k_max - k_min < 6:
        raise ValueError("need at least 7 derivative orders")
    nu = kernel_nu(order, SZEGO) if nu is None else nu
    m = order.m
    a_1 = table[1].a
    ks = tuple(range(k_min, k_max + 1))
    logs, ratios = [], []
    for k in ks:
        power = _power(order, nu, k)
        value, log_scale = _scaled_derivative(order, table, pt, nu, k, 1, a_1, spec)
        logs.append(math.log(abs(value)) + power * log_scale)
        # at y' the closed-form j = 1 term 2m Gamma(power) / (y' a_1)^power equals 2m
        ratios.append(complex(value / (2 * m)))
    steps = tuple(abs(r0 / r1 - 1.0) for r0, r1 in zip(ratios[:-1], ratios[1:]))
    estimate = gevrey_order_estimate(logs, ks)
    remainder = remainder_probe(order, table, pt, 2, ks, nu=nu, spec=spec)
    return GevreyReport(ks, tuple(logs), tuple(ratios), steps, estimate, remainder)


# Borel density bound --------------------------------------------------------------

@dataclass(frozen=True)
class BorelBoundReport:
    """
    |H| p^{1/4} on a grid of p.

    ``tail_slope`` is the least-squares slope of log(|H| p^{1/4}) against
    log p over the last decade of the grid.
    """

    samples: Tuple[BorelDensitySample, ...]
    scaled: Tuple[float, ...]
    sup: float
    tail_slope: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.sup) and self.tail_slope < 0.05


def borel_bound_probe(order: ModelOrder, pt: EvalPoint, p_grid: Optional[Sequence[float]] = None,
                      nu: Optional[float] = None, spec: Optional[QuadSpec] = None,
                      table: Optional[ZeroTable] = None) -> BorelBoundReport:
    """Sample H along p_grid (default 41 points on [1, 1e4]) by the line route."""
    check_sector_point(order, pt)
    spec = spec or QuadSpec()
    nu = kernel_nu(order, SZEGO) if nu is None else nu
    grid = np.asarray(p_grid if p_grid is not None else np.geomspace(1.0, 1e4, 41), dtype=float)
    samples = []
    densities = np.array([line_density(p) for p in grid])
    for density in np.unique(densities):
        sel = np.flatnonzero(densities == density)
        line = line_for(order, pt, nu, float(grid[sel].max()), spec, None, table, 1)
        values, errs = line.density(grid[sel])
        for idx, value, err in zip(sel, values, errs):
            samples.append((idx, BorelDensitySample(float(grid[idx]), complex(value), CONTOUR,
                                                    len(line), float(err))))
    samples = tuple(s for _, s in sorted(samples, key=lambda pair: pair[0]))
    scaled = np.array([abs(s.H) * s.p ** 0.25 for s in samples])
    last = grid >= grid.max() / 10.0
    if np.count_nonzero(last) >= 2:
        slope, _ = np.polyfit(np.log(grid[last]), np.log(scaled[last]), 1)
    else:
        slope = float("nan")
    return BorelBoundReport(samples, tuple(float(v) for v in scaled), float(scaled.max()),
                            float(slope))


# Route agreement --------------------------------------------------------------

@dataclass(frozen=True)
class RatioRow:
    pt: EvalPoint
    nagel: complex
    borel: complex
    ratio: complex


@dataclass(frozen=True)
class RatioSample:
    rows: Tuple[RatioRow, ...]
    spread: float

    @property
    def mean_ratio(self) -> complex:
        return complex(np.mean([r.ratio for r in self.rows]))


def ratio_spread(ratios: Sequence[complex]) -> float:
    """max_i |r_i - mean| / |mean|."""
    ratios = np.asarray(ratios, dtype=complex)
    mean = ratios.mean()
    return float(np.max(np.abs(ratios - mean)) / abs(mean))


def route_ratio_sample(order: ModelOrder, table: ZeroTable,
                       points: Sequence[EvalPoint] = DEFAULT_SAMPLE, which: str = SZEGO,
                       spec: Optional[QuadSpec] = None,
                       method: Optional[str] = None) -> RatioSample:
    """
    K_nagel / K_borel over a set of points; the ratio is the same constant
    (2 pi i sigma in the normalisation used here) wherever both routes apply.
    """
    nagel = KB_nagel if which == BERGMAN else K_nagel
    rows = []
    for pt in points:
        a = nagel(order, pt, spec, method).value
        b = K_borel(order, table, pt, which, spec).value
        rows.append(RatioRow(pt, a, b, a / b))
        logger.info("ratio at %r: %s", pt, a / b)
    return RatioSample(tuple(rows), ratio_spread([r.ratio for r in rows]))
