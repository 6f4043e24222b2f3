"""
Adaptive quadrature on segments, rays and arcs of the complex plane.

Every integrand is called with a numpy array of complex nodes and must
return an array of the same shape.  Finite pieces use an adaptive nested
7/15-point Gauss-Kronrod rule; endpoint singularities are removed by a
tanh-sinh change of variable; half-lines are cut into panels of doubling
length; oscillatory half-lines are cut into half periods whose partial sums
are accelerated by repeated averaging.
"""
import heapq
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from typing_extensions import TypeAlias

from ..errors import ConvergenceError, DivergenceError, NonFiniteIntegrandError
from ..utils.validation import validate_quad_spec

logger = logging.getLogger(__name__)

Integrand: TypeAlias = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae and weights (QUADPACK qk15), largest node first
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_WG_HALF = np.array([0.0, WG[0], 0.0, WG[1], 0.0, WG[2], 0.0, WG[3]])

# Full 15-point rule on [-1, 1], ascending
NODES = np.concatenate([-XGK[:-1], XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([WGK[:-1], WGK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budget of one integral."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_evals: int = 2_000_000
    oscillation_hint: Optional[float] = None

    def __post_init__(self):
        validate_quad_spec(self)

    def tolerance(self, value: complex) -> float:
        """Return max(abs_tol, rel_tol*|value|)."""
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadResult:
    """Value of an integral with its error estimate and cost."""

    value: complex
    err_est: float
    evals: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.err_est + other.err_est,
            self.evals + other.evals,
            self.converged and other.converged,
        )


@dataclass(frozen=True)
class ContourSegment:
    """
    Piece of a contour in the complex plane.

    A ``segment`` runs from ``start`` to ``end`` with parameter s in [0, 1].
    A ``ray`` starts at ``start`` and runs along the unit vector
    ``direction``; its parameter is arclength.  An ``arc`` of the circle
    ``center + radius*e^{i s}`` runs from ``theta_start`` to ``theta_end``.
    """

    kind: str
    start: complex
    end: complex = 0j
    direction: complex = 1 + 0j
    center: complex = 0j
    radius: float = 0.0
    theta_start: float = 0.0
    theta_end: float = 0.0

    def __post_init__(self):
        if self.kind not in ("segment", "ray", "arc"):
            raise ValueError(f"Unknown segment kind: {self.kind}")
        if self.kind == "ray" and abs(abs(self.direction) - 1.0) > 1e-12:
            raise ValueError("Ray direction must have unit modulus")
        if self.kind == "arc" and not self.radius > 0:
            raise ValueError("Arc radius must be positive")

    @classmethod
    def segment(cls, start: complex, end: complex) -> "ContourSegment":
        return cls("segment", complex(start), end=complex(end))

    @classmethod
    def ray(cls, start: complex, direction: complex) -> "ContourSegment":
        """Ray from start towards direction (normalised here)."""
        direction = complex(direction)
        if direction == 0:
            raise ValueError("Ray direction cannot be zero")
        return cls("ray", complex(start), direction=direction / abs(direction))

    @classmethod
    def arc(cls, center: complex, radius: float, theta_start: float,
            theta_end: float) -> "ContourSegment":
        center = complex(center)
        return cls(
            "arc",
            center + radius * complex(math.cos(theta_start), math.sin(theta_start)),
            center=center,
            radius=float(radius),
            theta_start=float(theta_start),
            theta_end=float(theta_end),
        )

    @property
    def domain(self) -> Tuple[float, float]:
        """Parameter interval (the upper end is inf for rays)."""
        if self.kind == "segment":
            return 0.0, 1.0
        if self.kind == "ray":
            return 0.0, math.inf
        return self.theta_start, self.theta_end

    def point(self, s: np.ndarray) -> np.ndarray:
        if self.kind == "segment":
            return self.start + (self.end - self.start) * s
        if self.kind == "ray":
            return self.start + self.direction * s
        return self.center + self.radius * np.exp(1j * s)

    def derivative(self, s: np.ndarray) -> np.ndarray:
        if self.kind == "segment":
            return np.full(np.shape(s), self.end - self.start, dtype=complex)
        if self.kind == "ray":
            return np.full(np.shape(s), self.direction, dtype=complex)
        return 1j * self.radius * np.exp(1j * s)


def _evaluate(f: Integrand, z: np.ndarray) -> np.ndarray:
    values = np.asarray(f(z), dtype=complex)
    if values.shape != z.shape:
        values = np.broadcast_to(values, z.shape)
    finite = np.isfinite(values)
    if not finite.all():
        raise NonFiniteIntegrandError(complex(z[~finite][0]))
    return values


def _gk15(h: Integrand, a: float, b: float) -> Tuple[complex, float, float]:
    """One Gauss-Kronrod panel of a real-parameter integrand."""
    half = 0.5 * (b - a)
    s = 0.5 * (a + b) + half * NODES
    values = _evaluate(h, s)
    kronrod = half * np.dot(KRONROD_WEIGHTS, values)
    gauss = half * np.dot(GAUSS_WEIGHTS, values)
    resabs = abs(half) * float(np.dot(KRONROD_WEIGHTS, np.abs(values)))
    err = abs(kronrod - gauss)
    # Roundoff floor of the panel
    err = max(err, 50 * _EPS * resabs)
    return complex(kronrod), float(err), resabs


@dataclass
class _Adaptive:
    value: complex
    err: float
    evals: int
    converged: bool
    abs_value: float


def _adaptive(h: Integrand, a: float, b: float, rel_tol: float, abs_tol: float,
              max_evals: int, initial: int = 1) -> _Adaptive:
    """Globally adaptive subdivision of [a, b], worst panel first."""
    edges = np.linspace(a, b, initial + 1)
    heap: List[Tuple[float, int, float, float, complex, float]] = []
    total = 0j
    total_err = 0.0
    total_abs = 0.0
    evals = 0
    counter = 0
    splits = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, resabs = _gk15(h, lo, hi)
        evals += 15
        total += val
        total_err += err
        total_abs += resabs
        heapq.heappush(heap, (-err, counter, lo, hi, val, resabs))
        counter += 1

    while total_err > max(abs_tol, rel_tol * abs(total)):
        if evals + 30 > max_evals:
            logger.debug("evaluation budget exhausted on [%g, %g]", a, b)
            return _Adaptive(total, total_err, evals, False, total_abs)
        neg_err, _, lo, hi, val, resabs = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # Panel too narrow to split further
            heapq.heappush(heap, (neg_err, counter, lo, hi, val, resabs))
            return _Adaptive(total, total_err, evals, False, total_abs)
        left = _gk15(h, lo, mid)
        right = _gk15(h, mid, hi)
        evals += 30
        total += left[0] + right[0] - val
        total_err += left[1] + right[1] + neg_err
        total_abs += left[2] + right[2] - resabs
        heapq.heappush(heap, (-left[1], counter, lo, mid, left[0], left[2]))
        heapq.heappush(heap, (-right[1], counter + 1, mid, hi, right[0], right[2]))
        counter += 2
        splits += 1
        # Refresh the running error to avoid drift from repeated updates
        if splits % 64 == 0:
            total_err = sum(-item[0] for item in heap)

    return _Adaptive(total, total_err, evals, True, total_abs)


def _tanh_sinh_bound(delta: float) -> float:
    """Half-width S with 1/(1+exp(pi*sinh(S))) = delta."""
    return math.asinh(math.log(1.0 / delta) / math.pi)


def _parametrised(f: Integrand, seg: ContourSegment) -> Integrand:
    def h(s: np.ndarray) -> np.ndarray:
        return _evaluate(f, seg.point(s)) * seg.derivative(s)
    return h


def _endpoint_transformed(f: Integrand, seg: ContourSegment) -> Tuple[Integrand, float, float]:
    """
    Integrand in the tanh-sinh variable for a finite segment or arc.

    Nodes approach each end as a - distance or b + distance so endpoint
    values are never evaluated.
    """
    a, b = seg.domain
    width = b - a
    ends = (seg.point(np.array([a]))[0], seg.point(np.array([b]))[0])
    length = abs(ends[1] - ends[0]) or abs(width) * max(seg.radius, 1.0)
    deltas = [max(1e-200, 4 * _EPS * abs(end) / length) for end in ends]
    lower = -_tanh_sinh_bound(deltas[0])
    upper = _tanh_sinh_bound(deltas[1])

    def h(s: np.ndarray) -> np.ndarray:
        y = 0.5 * math.pi * np.sinh(s)
        left = 1.0 / (1.0 + np.exp(-2.0 * y))
        right = 1.0 / (1.0 + np.exp(2.0 * y))
        param = np.where(s <= 0, a + width * left, b - width * right)
        jac = width * 0.25 * math.pi * np.cosh(s) / np.cosh(y) ** 2
        return _evaluate(f, seg.point(param)) * seg.derivative(param) * jac

    return h, lower, upper


def integrate_segment(f: Integrand, seg: ContourSegment, spec: Optional[QuadSpec] = None,
                      endpoint_transform: bool = False, initial_panels: int = 1) -> QuadResult:
    """
    Integrate f along a finite segment or arc.

    Args:
        f: Vectorised integrand of the complex variable
        seg: Finite ContourSegment (segment or arc)
        spec: Tolerances; defaults to QuadSpec()
        endpoint_transform: Use the tanh-sinh substitution so integrable
            endpoint singularities are handled
        initial_panels: Number of equal panels to start from

    Returns:
        QuadResult; ``converged`` is False when the budget ran out

    Raises:
        NonFiniteIntegrandError: If f returns inf or nan at a node
    """
    spec = spec or QuadSpec()
    if seg.kind == "ray":
        raise ValueError("integrate_segment needs a finite segment or arc")
    if endpoint_transform:
        h, lo, hi = _endpoint_transformed(f, seg)
        initial_panels = max(initial_panels, 4)
    else:
        h = _parametrised(f, seg)
        lo, hi = seg.domain
    res = _adaptive(h, lo, hi, spec.rel_tol, spec.abs_tol, spec.max_evals, initial_panels)
    return QuadResult(res.value, res.err, res.evals, res.converged)


def _ray_piece(seg: ContourSegment, lo: float, hi: float) -> ContourSegment:
    return ContourSegment.segment(seg.start + seg.direction * lo,
                                  seg.start + seg.direction * hi)


def integrate_decaying_halfline(f: Integrand, ray: ContourSegment,
                                spec: Optional[QuadSpec] = None, scale: float = 1.0,
                                singular_start: bool = False) -> QuadResult:
    """
    Integrate f along a ray to infinity.

    The ray is cut into panels [0, L], [L, 2L], [2L, 4L], ... and panels are
    added until the last one is below half the tolerance and shrinking.

    Args:
        f: Vectorised integrand, decaying along the ray
        ray: ContourSegment of kind ``ray``
        spec: Tolerances
        scale: Length L of the first panel
        singular_start: Apply the endpoint transform on the first panel

    Returns:
        QuadResult

    Raises:
        DivergenceError: If |f| stops shrinking over successive doublings
    """
    spec = spec or QuadSpec()
    if ray.kind != "ray":
        raise ValueError("integrate_decaying_halfline needs a ray")
    budget = spec.max_evals
    piece = _ray_piece(ray, 0.0, scale)
    total = integrate_segment(f, piece, QuadSpec(spec.rel_tol, spec.abs_tol * 0.25, budget),
                              endpoint_transform=singular_start)
    lo, hi = scale, 2.0 * scale
    previous_abs = math.inf
    stalled = 0
    while True:
        remaining = budget - total.evals
        if remaining < 30:
            logger.warning("half-line budget exhausted at arclength %g", lo)
            return QuadResult(total.value, total.err_est, total.evals, False)
        seg = _ray_piece(ray, lo, hi)
        res = _adaptive(_parametrised(f, seg), 0.0, 1.0, spec.rel_tol,
                        spec.abs_tol * 0.25, remaining)
        total = total + QuadResult(res.value, res.err, res.evals, res.converged)
        tail_tol = 0.5 * spec.tolerance(total.value)
        if res.abs_value <= tail_tol and res.abs_value <= previous_abs:
            # Remaining tail is dominated by the last panel
            return QuadResult(total.value, total.err_est + res.abs_value,
                              total.evals, total.converged)
        if res.abs_value >= previous_abs:
            stalled += 1
        else:
            stalled = 0
        if stalled >= 4 and hi > 1e8 * scale:
            raise DivergenceError(
                f"Integrand does not decay along the ray (arclength {hi:g})"
            )
        if hi > 1e300:
            raise DivergenceError("Integrand does not decay along the ray")
        previous_abs = res.abs_value
        lo, hi = hi, 2.0 * hi


def _repeated_average(partials: List[complex], depth: int) -> complex:
    """Euler / van Wijngaarden repeated averaging of the last partial sums."""
    row = list(partials[-depth:])
    while len(row) > 1:
        row = [0.5 * (row[i] + row[i + 1]) for i in range(len(row) - 1)]
    return row[0]


def integrate_oscillatory_halfline(envelope: Integrand, phase_freq: float,
                                   ray: ContourSegment, spec: Optional[QuadSpec] = None,
                                   depth: int = 10) -> QuadResult:
    """
    Integrate envelope(z)*exp(i*phase_freq*s) along a ray, s = arclength.

    The ray is cut into half periods of length pi/|phase_freq|; the chunk
    integrals form an alternating series whose partial sums are averaged
    repeatedly until two successive accelerated values agree.

    Args:
        envelope: Vectorised envelope, eventually monotone decaying
        phase_freq: Angular frequency; 0 falls back to the decaying engine
        ray: ContourSegment of kind ``ray``
        spec: Tolerances
        depth: Number of partial sums entering the averaging

    Returns:
        QuadResult

    Raises:
        ConvergenceError: If the chunk series is not Cauchy within max_evals
    """
    spec = spec or QuadSpec()
    if phase_freq == 0:
        return integrate_decaying_halfline(envelope, ray, spec)
    if ray.kind != "ray":
        raise ValueError("integrate_oscillatory_halfline needs a ray")

    period = math.pi / abs(phase_freq)

    def integrand(s: np.ndarray) -> np.ndarray:
        return _evaluate(envelope, ray.start + ray.direction * s) * ray.direction \
            * np.exp(1j * phase_freq * s)

    partials: List[complex] = []
    running = 0j
    err = 0.0
    evals = 0
    last_estimate: Optional[complex] = None
    agreed = 0
    k = 0
    while evals + 30 <= spec.max_evals:
        res = _adaptive(integrand, k * period, (k + 1) * period, spec.rel_tol,
                        spec.abs_tol * 0.1, spec.max_evals - evals)
        evals += res.evals
        err += res.err
        running += res.value
        partials.append(running)
        k += 1
        if res.abs_value <= 0.05 * spec.tolerance(running) and k > 2:
            return QuadResult(running, err + res.abs_value, evals, True)
        if k < depth + 2:
            continue
        estimate = _repeated_average(partials, depth)
        if last_estimate is not None:
            delta = abs(estimate - last_estimate)
            if delta <= spec.tolerance(estimate):
                agreed += 1
                if agreed >= 2:
                    return QuadResult(estimate, err + delta, evals, True)
            else:
                agreed = 0
        last_estimate = estimate
    raise ConvergenceError(
        f"Oscillatory chunk series not Cauchy within {spec.max_evals} evaluations"
    )
