"""
Utility functions for szego_borel.
"""
from .key import generate_key, table_key
from .validation import (
    validate_order,
    validate_positive,
    validate_quad_spec,
    validate_unit_interval,
)

__all__ = [
    'generate_key',
    'table_key',
    'validate_order',
    'validate_positive',
    'validate_quad_spec',
    'validate_unit_interval',
]
