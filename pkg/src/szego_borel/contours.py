"""
P(u) = int e^{uv} / phi(v) dv and its q-deformation P_q.

Two node rules carry 1/phi at their nodes:

* the real-line rule, for u near the real axis; its values are combined in
  the log domain because P grows like exp(u^{2m} / 2^{2m-1});
* the Gamma rule, the real line pushed up onto the two rays
  arg v = pi/2 -/+ pi/(2m) joined by an arc of radius a_1/2 below the first
  zero, for u near the imaginary axis where e^{uv} oscillates on the line.

The rules depend only on m and a size bucket of |u|, so they are memoised.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .cache import cached
from .errors import ConvergenceError, DomainError
from .maps import ConformalMaps
from .numerics.special import compensated_sum
from .numerics.quadrature import ContourSegment
from .numerics.rules import FixedRule, graded_breaks
from .phi import ModelOrder, log_phi, log_phi_real, phi_values
from .zeros import ZeroTable, locate_zeros

logger = logging.getLogger(__name__)

# exponent drop (natural log) below the peak at which a rule is truncated
TRUNCATION = 46.0


@dataclass(frozen=True)
class WeightedRule:
    """A FixedRule together with log(1/phi) at its nodes."""

    rule: FixedRule
    log_inv_phi: np.ndarray

    def conjugate(self) -> "WeightedRule":
        """Rule of the mirror contour v -> conj(v), traversed left to right."""
        r = self.rule
        return WeightedRule(
            FixedRule(np.conj(r.nodes), np.conj(r.weights), np.conj(r.gauss_weights)),
            np.conj(self.log_inv_phi),
        )


def _bucket(value: float) -> float:
    """Round up to a power of two (at least 1) so nearby sizes share a rule."""
    return 2.0 ** max(0, math.ceil(math.log2(max(value, 1.0))))


def log_phi_nodes(order: ModelOrder, nodes: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        values, _ = phi_values(order, nodes)
        out = np.log(values.astype(complex))
    bad = ~np.isfinite(out)
    for idx in np.flatnonzero(bad):
        out[idx] = log_phi(order, complex(nodes[idx]))
    return out


# Real-line rule ---------------------------------------------------------------

def _real_extent(order: ModelOrder, u_max: float) -> float:
    """Half-length V with u_max V - log phi(V) below the peak by TRUNCATION."""
    beta = order.exponent
    c1 = order.c1
    peak_v = (u_max / (c1 * beta)) ** (1.0 / (beta - 1.0)) if u_max > 0 else 0.0
    peak = u_max * peak_v - c1 * peak_v ** beta
    v = max(peak_v, 1.0)
    while u_max * v - c1 * v ** beta > peak - TRUNCATION - 10.0:
        v *= 1.25
    return v


@cached(key_prefix="rules")
def real_rule(m: int, u_bucket: float, im_bucket: float = 0.0, width: float = 0.5) -> WeightedRule:
    """
    Composite rule on [-V, V] for integrands e^{uv}/phi(v) with
    |Re u| <= u_bucket and |Im u| <= im_bucket.

    Panel widths follow the curvature of log phi and the oscillation of e^{i Im(u) v}.
    """
    order = ModelOrder(m)
    extent = _real_extent(order, u_bucket)
    beta = order.exponent
    breaks = [0.0]
    while breaks[-1] < extent:
        v = max(breaks[-1], 1.0)
        curvature = order.c1 * beta * (beta - 1.0) * v ** (beta - 2.0)
        step = min(4.0, max(width * 0.5, width / math.sqrt(curvature)))
        if im_bucket > 0:
            step = min(step, 2.0 / im_bucket)
        breaks.append(min(extent, breaks[-1] + step))
    right = np.asarray(breaks)
    full = np.concatenate([-right[::-1], right[1:]])
    rule = FixedRule.on_segment(ContourSegment.segment(0j, 1 + 0j), full)
    log_inv = -log_phi_real(order, rule.nodes.real).astype(complex)
    logger.debug("real rule m=%d bucket=%g: %d nodes on [-%g, %g]", m, u_bucket,
                 len(rule), extent, extent)
    return WeightedRule(rule, log_inv)


def _log_apply(rule: WeightedRule, u: np.ndarray, extra: Optional[np.ndarray] = None
               ) -> Tuple[np.ndarray, np.ndarray]:
    """
    log of sum_k w_k exp(u v_k + log(1/phi(v_k)) + extra_k) for each u.

    Returns:
        (log of the Kronrod sums, relative Kronrod-Gauss differences)
    """
    exponent = u[:, None] * rule.rule.nodes[None, :] + rule.log_inv_phi[None, :]
    if extra is not None:
        exponent = exponent + extra
    shift = exponent.real.max(axis=1)
    scaled = np.exp(exponent - shift[:, None])
    kronrod, diff = rule.rule.integrate(scaled)
    with np.errstate(divide="ignore"):
        log_value = shift + np.log(kronrod.astype(complex))
    relative = diff / np.maximum(np.abs(kronrod), np.finfo(float).tiny)
    return log_value, relative


# Gamma rule -----------------------------------------------------------------

def _ray_angle(order: ModelOrder) -> float:
    """Angle of the right ray of Gamma_+, pi/2 - pi/(2m)."""
    return math.pi / 2 - math.pi / (2 * order.m)


def _gamma_extent(order: ModelOrder) -> float:
    """Ray length after which 1/phi is below exp(-TRUNCATION - 10)."""
    rate = order.c1 * math.cos(math.pi * (order.m - 1) / (2 * order.m - 1))
    return ((TRUNCATION + 10.0) / rate) ** (1.0 / order.exponent)


@cached(key_prefix="zeros")
def first_zero(m: int) -> float:
    """a_1, the smallest positive zero of psi."""
    return locate_zeros(ModelOrder(m), 1).records[0].a


def arc_radius(order: ModelOrder, a_1: Optional[float] = None) -> float:
    """Radius of the arc of Gamma_+, half the first zero."""
    if a_1 is None:
        a_1 = first_zero(order.m)
    return 0.5 * a_1


@cached(key_prefix="rules")
def gamma_rule(m: int, u_bucket: float, r0: float) -> WeightedRule:
    """
    Rule on Gamma_+ for integrands e^{uv}/phi(v) with |u| <= u_bucket and u
    within pi/4 of the positive imaginary axis.

    The right half (arc from pi/2 down to the right ray, then the ray) is
    built explicitly; the left half is its mirror image v -> -conj(v).
    """
    order = ModelOrder(m)
    theta = _ray_angle(order)
    extent = _gamma_extent(order)
    arc = ContourSegment.arc(0j, r0, math.pi / 2, theta)
    arc_rule = FixedRule.on_segment(arc, np.linspace(*arc.domain, 5))
    direction = complex(math.cos(theta), math.sin(theta))
    ray = ContourSegment.segment(r0 * direction, extent * direction)
    step = min(0.5, 2.0 / u_bucket) / (extent - r0)
    ray_rule = FixedRule.on_segment(ray, graded_breaks(0.0, 1.0, step, 1.0, step))
    right = FixedRule.concat([arc_rule, ray_rule])
    log_inv_right = -log_phi_nodes(order, right.nodes)
    left = FixedRule(-np.conj(right.nodes), np.conj(right.weights), np.conj(right.gauss_weights))
    rule = FixedRule.concat([left, right])
    log_inv = np.concatenate([np.conj(log_inv_right), log_inv_right])
    logger.debug("Gamma rule m=%d bucket=%g r0=%g: %d nodes", m, u_bucket, r0, len(rule))
    return WeightedRule(rule, log_inv)


def _use_gamma(order: ModelOrder, u: np.ndarray) -> np.ndarray:
    """u close enough to the imaginary axis for the Gamma rule."""
    if order.m == 1:
        return np.zeros(u.shape, dtype=bool)
    return (np.abs(np.abs(np.angle(u)) - math.pi / 2) <= math.pi / 4) & (u != 0)


# P ----------------------------------------------------------------------------

def log_P(order: ModelOrder, u, r0: Optional[float] = None) -> np.ndarray:
    """
    log P(u) for an array of complex u.

    Points near the imaginary axis use Gamma_+ (or its mirror for Im u < 0);
    the others use the real line.
    """
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    out = np.empty(u.shape, dtype=complex)
    gamma = _use_gamma(order, u)
    if np.any(~gamma):
        sel = u[~gamma]
        im_max = float(np.max(np.abs(sel.imag)))
        rule = real_rule(order.m, _bucket(float(np.max(np.abs(sel.real)))),
                         _bucket(im_max) if im_max > 0 else 0.0)
        out[~gamma], err = _log_apply(rule, sel)
        _warn_error("real line", err)
    if np.any(gamma):
        r0 = r0 if r0 is not None else arc_radius(order)
        sel = u[gamma]
        # P(conj u) = conj P(u)
        flip = sel.imag < 0
        sel = np.where(flip, np.conj(sel), sel)
        rule = gamma_rule(order.m, _bucket(float(np.max(np.abs(sel)))), r0)
        values, err = _log_apply(rule, sel)
        out[gamma] = np.where(flip, np.conj(values), values)
        _warn_error("Gamma contour", err)
    return out


def _warn_error(name: str, err: np.ndarray, limit: float = 1e-8) -> None:
    worst = float(np.max(err)) if err.size else 0.0
    if worst > limit:
        logger.warning("%s rule error estimate %.2e exceeds %.0e", name, worst, limit)


def P_of(order: ModelOrder, u, r0: Optional[float] = None):
    """
    P(u) = int_R e^{uv} / phi(v) dv.

    Accepts a scalar or an array; a scalar argument gives a complex number.
    Values beyond the double range come back infinite, use log_P instead.
    """
    scalar = np.ndim(u) == 0
    with np.errstate(over="ignore"):
        values = np.exp(log_P(order, u, r0))
    return complex(values[0]) if scalar else values


# P_q --------------------------------------------------------------------------

def q_decay_rate(order: ModelOrder, q: complex) -> float:
    """
    Coefficient of r^{2m/(2m-1)} in -log|integrand| of P_q far out on the
    rays of Gamma_+; q is admissible when it is positive.
    """
    m = order.m
    log_q = np.log(complex(q))
    phi_rate = order.c1 * math.cos(math.pi * (m - 1) / (2 * m - 1))
    angle = math.pi / (2 * m - 1)
    return phi_rate + order.c2 * (log_q.real * math.cos(angle) - abs(log_q.imag) * math.sin(angle))


def _check_q(order: ModelOrder, q: complex) -> None:
    if q == 0 or q_decay_rate(order, q) <= 0:
        raise DomainError(f"q={q!r} is outside the region where P_q is defined")


def Pq_contour(order: ModelOrder, u: complex, q: complex, sign: int = 1,
               r0: Optional[float] = None) -> complex:
    """
    P_q(u) = int_{Gamma_sign} e^{uv} q^{-F_sign(v) - 1} / phi(v) dv.

    q = 1 gives P(u).
    """
    if order.m < 2:
        raise DomainError("P_q needs m >= 2")
    _check_q(order, complex(q))
    r0 = r0 if r0 is not None else arc_radius(order)
    u = complex(u)
    rule = gamma_rule(order.m, _bucket(abs(u)), r0)
    if sign < 0:
        rule = rule.conjugate()
    maps = ConformalMaps(order)
    extra = -(maps.F(rule.rule.nodes, sign) + 1.0) * np.log(complex(q))
    log_value, err = _log_apply(rule, np.array([u]), extra[None, :])
    _warn_error("P_q contour", err)
    return complex(np.exp(log_value[0]))


@dataclass(frozen=True)
class ResidueSum:
    value: complex
    terms_used: int
    tail_bound: float


def Pq_residues(order: ModelOrder, table: ZeroTable, u: complex, q: complex,
                sign: int = 1, abs_tol: float = 1e-16) -> ResidueSum:
    """
    2 pi i sum_j e^{sign i a_j u} q^{-f_j - 1} / phi'(i a_j).

    Terms are summed until their log-magnitude falls below the tolerance and
    the ratio of the last terms certifies a geometric tail.

    Raises:
        DomainError: If the terms grow (q or u outside the convergence region)
        ConvergenceError: If the table runs out first
    """
    _check_q(order, complex(q))
    u = complex(u)
    log_q = np.log(complex(q))
    a = table.a
    log_terms = sign * 1j * a * u - (table.f + 1.0) * log_q \
        - np.log(np.array([r.phi_prime for r in table.records]))
    mags = log_terms.real
    terms = np.exp(log_terms)
    for n in range(3, len(mags)):
        ratio = math.exp(mags[n] - mags[n - 1])
        if ratio >= 1.0 and np.all(np.diff(mags[n - 3:n + 1]) > 0):
            raise DomainError("residue series terms grow: outside convergence sector")
        if ratio < 1.0:
            tail = math.exp(mags[n]) * ratio / (1.0 - ratio)
            total = compensated_sum(terms[:n + 1])
            if tail <= max(abs_tol, 1e-14 * abs(total)):
                return ResidueSum(2j * math.pi * total, n + 1, 2 * math.pi * tail)
    raise ConvergenceError(f"residue series not converged after {len(mags)} zeros")

