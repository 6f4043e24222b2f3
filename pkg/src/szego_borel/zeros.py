"""
Purely imaginary zeros of phi.

phi is even and real on both axes, so its zeros on the imaginary axis are the
sign changes of psi(a) = phi(ia).  The zeros are bracketed on a grid that
follows the asymptotic spacing, refined with Brent's method and stored with
the residue exponent f_j and the residue weight c_j.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .errors import ConsistencyError, DomainError
from .maps import ConformalMaps
from .numerics.quadrature import QuadSpec
from .numerics.special import log_gamma
from .phi import ModelOrder, phi_values

logger = logging.getLogger(__name__)

SIMPLICITY_TOL = 1e-8
ANOMALY_TOL = 0.2
# psi is evaluated while the series needs fewer than this many digits
MAX_LOST_DIGITS = 600.0


@dataclass(frozen=True)
class ZeroRecord:
    """
    One zero i a_j of phi.

    Attributes:
        j: Index, starting at 1
        a: Imaginary part of the zero
        phi_prime: phi'(i a_j), purely imaginary
        f: Residue exponent c2 a_j^{2m/(2m-1)} - 1/4
        c_log_mag: log |c_j| with c_j = 1 / (phi'(i a_j) Gamma(f_j + 1))
        c_phase: arg c_j
    """

    j: int
    a: float
    phi_prime: complex
    f: float
    c_log_mag: float
    c_phase: float


@dataclass(frozen=True)
class ZeroTable:
    order: ModelOrder
    records: Tuple[ZeroRecord, ...]
    quad_tols: QuadSpec = field(default_factory=QuadSpec)
    multiplicity_flags: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, j: int) -> ZeroRecord:
        """Record with index j (1-based)."""
        if not 1 <= j <= len(self.records):
            raise KeyError(f"No zero with index {j} (table has {len(self.records)})")
        return self.records[j - 1]

    @property
    def a(self) -> np.ndarray:
        return np.array([r.a for r in self.records])

    @property
    def f(self) -> np.ndarray:
        return np.array([r.f for r in self.records])



@dataclass(frozen=True)
class ZeroLawFit:
    """
    Least-squares check of j = c2 a_j^{2m/(2m-1)} - 1/4 - j0.

    Attributes:
        c2_hat: Fitted slope over the upper half of the table
        j0_raw: Mean offset over the upper half (continuous)
        j0_hat: j0_raw rounded to the nearest integer
        anomaly: True when j0_raw is further than 0.2 from an integer
        predicted_fraction: Fractional offset expected from the asymptotics
        residuals: r_j = j - (c2 a_j^beta - 1/4 - j0_raw), all j
        max_residual: max |r_j| over the upper half
        trend: |r_j| * j over the upper half
    """

    c2_hat: float
    j0_raw: float
    j0_hat: int
    anomaly: bool
    predicted_fraction: float
    residuals: Tuple[float, ...]
    max_residual: float
    trend: Tuple[float, ...]


def psi_values(order: ModelOrder, a: Sequence[float], rel_tol: float = 1e-12) -> np.ndarray:
    """
    phi(i a) for real a as real numbers.

    Raises:
        ConsistencyError: If an imaginary part exceeds the error estimate
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a < 0):
        raise DomainError("psi requires a >= 0")
    values, errors = phi_values(order, 1j * a, 0, rel_tol)
    scale = np.maximum(np.abs(values.real), errors)
    leak = np.abs(values.imag) > 1e-10 * np.maximum(scale, np.finfo(float).tiny)
    if np.any(leak):
        idx = int(np.flatnonzero(leak)[0])
        raise ConsistencyError(
            f"phi(i a) has imaginary part {values.imag[idx]:.3e} at a={a[idx]!r}"
        )
    return values.real


def psi(order: ModelOrder, a: float) -> float:
    """phi(i a) = 2 int_0^inf exp(-2 w^{2m}) cos(2 a w) dw."""
    return float(psi_values(order, [a])[0])


def _phi_prime(order: ModelOrder, a: float) -> complex:
    values, _ = phi_values(order, [1j * a], 1)
    return complex(values[0])


def zero_spacing(order: ModelOrder, a: float) -> float:
    """Asymptotic distance between consecutive zeros near a."""
    m = order.m
    return (2 * m - 1) / (2.0 * m) * a ** (-1.0 / (2 * m - 1)) / order.c2


def predicted_offset(order: ModelOrder) -> float:
    """
    Fractional part of j0 expected from the two-saddle asymptotics.

    The asymptotic formula vanishes on the imaginary axis where
    c2 a^{2m/(2m-1)} = n + 1/2 + (m - 1)/(2(2m - 1)).
    """
    m = order.m
    return ((m - 1) / (2.0 * (2 * m - 1)) + 0.25) % 1.0


def residue_convergence_threshold(order: ModelOrder) -> float:
    """Smallest real q for which the residue sum of P_q converges absolutely."""
    # 1/|phi'(i a_j)| grows like exp(pi tan(theta0) j) while q^{-f_j} ~ q^{-j}
    return math.exp(math.pi * math.tan(order.theta0))


def predicted_zero(order: ModelOrder, n: int) -> float:
    """Asymptotic location of the n-th zero (n >= 1)."""
    level = n - 0.5 + (order.m - 1) / (2.0 * (2 * order.m - 1))
    return (level / order.c2) ** (1.0 / order.exponent)


def _grid(order: ModelOrder, start: float, stop: float, divisions: float) -> np.ndarray:
    points = [start]
    while points[-1] < stop:
        a = points[-1]
        step = 0.25 if a < 1.0 else min(0.25, zero_spacing(order, a) / divisions)
        points.append(a + step)
    return np.asarray(points)


def _overflow_limit(order: ModelOrder) -> float:
    """a above which psi needs more than MAX_LOST_DIGITS digits."""
    return (MAX_LOST_DIGITS * math.log(10.0) / order.c1) ** (1.0 / order.exponent)


def _brackets(order: ModelOrder, grid: np.ndarray) -> List[Tuple[float, float, float, float]]:
    values = psi_values(order, grid)
    out = []
    for k in np.flatnonzero(np.signbit(values[:-1]) != np.signbit(values[1:])):
        out.append((grid[k], grid[k + 1], values[k], values[k + 1]))
    return out


def _refine(order: ModelOrder, lo: float, hi: float) -> float:
    # brentq combines bisection with secant and inverse quadratic steps
    return optimize.brentq(lambda a: psi(order, a), lo, hi, xtol=1e-15 * max(1.0, hi),
                           rtol=8 * np.finfo(float).eps, maxiter=200)


def _record(order: ModelOrder, j: int, a: float) -> ZeroRecord:
    phi_prime = _phi_prime(order, a)
    f = order.c2 * a ** order.exponent - 0.25
    return ZeroRecord(
        j=j,
        a=float(a),
        phi_prime=phi_prime,
        f=float(f),
        c_log_mag=float(-math.log(abs(phi_prime)) - log_gamma(f + 1.0)),
        c_phase=float(-np.angle(phi_prime)),
    )


def _fill_gaps(order: ModelOrder, roots: List[float], stop: float) -> List[float]:
    """Rescan densely wherever consecutive roots are too far apart."""
    found = sorted(roots)
    edges = [0.0] + found + [stop]
    extra = []
    for left, right in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (left + right)
        if mid < 1.0 or right - left <= 1.5 * zero_spacing(order, mid):
            continue
        step = min(0.05, zero_spacing(order, mid) / 8.0)
        grid = np.arange(left + step / 2, right, step)
        if grid.size < 2:
            continue
        for lo, hi, _, _ in _brackets(order, grid):
            extra.append(_refine(order, lo, hi))
    if extra:
        logger.warning("dense rescan found %d zeros missed by the coarse grid", len(extra))
    return sorted(found + extra)


def locate_zeros(order: ModelOrder, count: int, spec: Optional[QuadSpec] = None,
                 divisions: float = 4.0) -> ZeroTable:
    """
    Locate the first ``count`` zeros i a_j of phi on the positive imaginary axis.

    Args:
        order: Model order, m >= 2
        count: Number of zeros wanted
        spec: Tolerances recorded with the table
        divisions: Grid points per asymptotic zero spacing

    Returns:
        ZeroTable; fewer records than requested when the overflow-safe
        search limit is reached

    Raises:
        DomainError: For m = 1, where phi has no zeros
    """
    if order.m == 1:
        raise DomainError("no zeros exist for m = 1 (phi is a Gaussian)")
    if count < 1:
        raise ValueError("count must be at least 1")
    spec = spec or QuadSpec()
    limit = _overflow_limit(order)
    stop = min(limit, predicted_zero(order, count + 2))
    roots: List[float] = []
    start = 0.0
    while True:
        grid = _grid(order, start, stop, divisions)
        brackets = _brackets(order, grid)
        roots.extend(_refine(order, lo, hi) for lo, hi, _, _ in brackets)
        logger.debug("scanned [%g, %g]: %d sign changes", start, stop, len(brackets))
        if len(roots) >= count or stop >= limit:
            break
        start, stop = grid[-1], min(limit, stop * 1.2)
    roots = _fill_gaps(order, roots, stop)
    if len(roots) < count:
        logger.warning("only %d of %d zeros found below a=%g", len(roots), count, limit)
    roots = roots[:count]

    records = [_record(order, j, a) for j, a in enumerate(roots, start=1)]
    flags = []
    for rec in records:
        step = min(0.25, zero_spacing(order, max(rec.a, 1.0)) / divisions)
        local = max(abs(psi(order, rec.a - step)), abs(psi(order, rec.a + step))) / step
        if abs(rec.phi_prime) <= SIMPLICITY_TOL * local:
            flags.append(rec.j)
    if flags:
        logger.warning("zeros %s failed the simplicity check", flags)
    logger.info("located %d zeros for m=%d (a_max=%.6g)", len(records), order.m,
                records[-1].a if records else 0.0)
    return ZeroTable(order, tuple(records), spec, tuple(flags))


def zero_law_fit(table: ZeroTable) -> ZeroLawFit:
    """
    Compare the located zeros with the counting law.

    Raises:
        ValueError: If the table has fewer than 15 records
    """
    if len(table) < 15:
        raise ValueError("zero_law_fit needs at least 15 records")
    order = table.order
    j = np.arange(1, len(table) + 1, dtype=float)
    level = order.c2 * table.a ** order.exponent - 0.25
    upper = j > len(table) / 2
    slope, _ = np.polyfit(table.a[upper] ** order.exponent, j[upper], 1)
    offsets = level - j
    j0_raw = float(np.mean(offsets[upper]))
    j0_hat = int(round(j0_raw))
    anomaly = abs(j0_raw - j0_hat) > ANOMALY_TOL
    if anomaly:
        logger.warning("counting-law anomaly: mean offset %.4f is not near an integer", j0_raw)
    residuals = j - (level - j0_raw)
    return ZeroLawFit(
        c2_hat=float(1.0 / slope),
        j0_raw=j0_raw,
        j0_hat=j0_hat,
        anomaly=anomaly,
        predicted_fraction=predicted_offset(order),
        residuals=tuple(float(r) for r in residuals),
        max_residual=float(np.max(np.abs(residuals[upper]))),
        trend=tuple(float(v) for v in np.abs(residuals[upper]) * j[upper]),
    )


def residue_weight(table: ZeroTable, record: ZeroRecord) -> Tuple[float, float]:
    """
    c_j = 1 / (phi'(i a_j) Gamma(f_j + 1)) in the log domain.

    Returns:
        (log |c_j|, arg c_j)

    Raises:
        DomainError: If the record failed the simplicity check
    """
    if record.j in table.multiplicity_flags:
        raise DomainError(f"zero {record.j} is not certified simple")
    return (
        -math.log(abs(record.phi_prime)) - log_gamma(record.f + 1.0),
        -float(np.angle(record.phi_prime)),
    )


def interlacing_check(table: ZeroTable, samples: int = 8) -> List[int]:
    """
    Indices j for which psi does not change sign exactly once on
    (a_j, a_{j+1}) when sampled at ``samples`` interior points.
    """
    bad = []
    for left, right in zip(table.records[:-1], table.records[1:]):
        inner = np.linspace(left.a, right.a, samples + 2)[1:-1]
        signs = np.signbit(psi_values(table.order, inner))
        # one sign change between consecutive zeros means the samples share a sign
        if signs.min() != signs.max():
            bad.append(left.j)
    return bad


def exponent_consistency(table: ZeroTable) -> float:
    """max |F_+(i a_j) - f_j| over the table."""
    maps = ConformalMaps(table.order)
    values = maps.F_plus(1j * table.a)
    return float(np.max(np.abs(values - table.f))) if len(table) else 0.0


def table_summary(table: ZeroTable) -> Dict[str, float]:
    """Headline numbers of a table, used in logs and CLI metadata."""
    return {
        "m": table.order.m,
        "count": len(table),
        "a_1": table.records[0].a if table.records else math.nan,
        "a_max": table.records[-1].a if table.records else math.nan,
        "flags": len(table.multiplicity_flags),
    }
