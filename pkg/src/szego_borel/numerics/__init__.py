"""Numeric substrate: quadrature engines, fixed rules, special functions."""

from .quadrature import (
    ContourSegment,
    QuadResult,
    QuadSpec,
    integrate_decaying_halfline,
    integrate_oscillatory_halfline,
    integrate_segment,
)
from .rules import FixedRule, graded_breaks
from .special import (
    cancellation,
    compensated_sum,
    log_gamma,
    log_reciprocal_gamma,
    principal_power,
)

__all__ = [
    'ContourSegment',
    'FixedRule',
    'QuadResult',
    'QuadSpec',
    'cancellation',
    'compensated_sum',
    'graded_breaks',
    'integrate_decaying_halfline',
    'integrate_oscillatory_halfline',
    'integrate_segment',
    'log_gamma',
    'log_reciprocal_gamma',
    'principal_power',
]
