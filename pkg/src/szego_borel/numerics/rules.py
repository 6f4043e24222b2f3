"""
Fixed composite Gauss-Kronrod rules on contours.

A FixedRule stores nodes and weights once so that integrals whose integrand
depends on an extra parameter (P(u) for many u, H(p) for many p) become a
single matrix-vector product.  The embedded Gauss weights give an error
estimate at no extra cost.
"""
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, ContourSegment


@dataclass(frozen=True)
class FixedRule:
    """Nodes z_k with Kronrod weights w_k and Gauss weights g_k (dz included)."""

    nodes: np.ndarray
    weights: np.ndarray
    gauss_weights: np.ndarray

    def __len__(self) -> int:
        return self.nodes.size

    @classmethod
    def on_segment(cls, seg: ContourSegment, breaks: Sequence[float]) -> "FixedRule":
        """
        Composite rule on seg with one 15-point panel per pair of parameter
        breakpoints.
        """
        breaks = np.asarray(breaks, dtype=float)
        lo, hi = breaks[:-1, None], breaks[1:, None]
        half = 0.5 * (hi - lo)
        params = (0.5 * (lo + hi) + half * NODES).ravel()
        jac = (half * np.ones_like(NODES)).ravel() * seg.derivative(params)
        return cls(
            seg.point(params),
            jac * np.tile(KRONROD_WEIGHTS, len(lo)),
            jac * np.tile(GAUSS_WEIGHTS, len(lo)),
        )

    @classmethod
    def concat(cls, rules: Iterable["FixedRule"]) -> "FixedRule":
        rules = list(rules)
        return cls(
            np.concatenate([r.nodes for r in rules]),
            np.concatenate([r.weights for r in rules]),
            np.concatenate([r.gauss_weights for r in rules]),
        )

    def mapped(self, func, derivative) -> "FixedRule":
        """Rule for the image contour z -> func(z)."""
        d = derivative(self.nodes)
        return FixedRule(func(self.nodes), self.weights * d, self.gauss_weights * d)

    def integrate(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Apply the rule along the last axis of values.

        Returns:
            (Kronrod sums, |Kronrod - Gauss|)
        """
        values = np.asarray(values, dtype=complex)
        kronrod = values @ self.weights
        gauss = values @ self.gauss_weights
        return kronrod, np.abs(kronrod - gauss)


def graded_breaks(start: float, stop: float, first: float, ratio: float = 1.5,
                  largest: float = 1.0) -> np.ndarray:
    """
    Breakpoints from start to stop, panels growing geometrically from
    ``first`` up to ``largest``.
    """
    breaks = [start]
    width = first
    while breaks[-1] < stop:
        breaks.append(min(stop, breaks[-1] + width))
        width = min(largest, width * ratio)
    return np.asarray(breaks)
