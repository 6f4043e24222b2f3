"""
Validation utilities for numerical arguments.
"""
import math
from numbers import Integral, Real
from typing import Any


def validate_order(m: Any) -> int:
    """
    Validate the model order m.

    Args:
        m: Candidate order

    Returns:
        m as int

    Raises:
        ValueError: If m is not an integer >= 1
    """
    if isinstance(m, bool) or not isinstance(m, Integral):
        raise ValueError(f"Invalid order type: {type(m)}. Must be int.")
    if m < 1:
        raise ValueError("Order m must be at least 1")
    return int(m)


def validate_positive(name: str, value: Any, allow_zero: bool = False) -> float:
    """
    Validate a finite positive (or nonnegative) real number.

    Raises:
        ValueError: If value is not a finite real or has the wrong sign
    """
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValueError(f"{name} must be a real number, got {type(value)}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    if allow_zero:
        if value < 0:
            raise ValueError(f"{name} cannot be negative")
    elif value <= 0:
        raise ValueError(f"{name} must be positive")
    return value


def validate_unit_interval(name: str, value: Any) -> float:
    """
    Validate a real number with |value| < 1.

    Raises:
        ValueError: If |value| >= 1
    """
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValueError(f"{name} must be a real number, got {type(value)}")
    value = float(value)
    if not abs(value) < 1.0:
        raise ValueError(f"{name} must satisfy |{name}| < 1")
    return value


def validate_quad_spec(spec: Any) -> None:
    """
    Validate the fields of a QuadSpec.

    Raises:
        ValueError: If a tolerance or the evaluation budget is out of range
    """
    validate_positive("rel_tol", spec.rel_tol)
    validate_positive("abs_tol", spec.abs_tol, allow_zero=True)
    if isinstance(spec.max_evals, bool) or not isinstance(spec.max_evals, Integral):
        raise ValueError("max_evals must be an integer")
    if spec.max_evals < 21:
        raise ValueError("max_evals must be at least 21")
    if spec.oscillation_hint is not None:
        validate_positive("oscillation_hint", spec.oscillation_hint, allow_zero=True)
