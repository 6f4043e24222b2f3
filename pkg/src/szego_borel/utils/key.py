"""
Utilities for deriving memoisation keys and table file names.
"""
from typing import Any, Dict, Tuple
import hashlib
import json


def _normalise(value: Any) -> Any:
    """Turn numbers into exact, JSON-friendly tokens."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, complex):
        return [repr(float(value.real)), repr(float(value.imag))]
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return [_normalise(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _normalise(v) for k, v in value.items()}
    # numpy scalars and small frozen dataclasses end up here
    if hasattr(value, 'item'):
        return _normalise(value.item())
    return repr(value)


def generate_key(prefix: str, func_name: str, args: Tuple[Any, ...], kwargs: Dict[str, Any]) -> str:
    """
    Generate a memoisation key from function arguments.

    Floats are encoded with ``repr`` so two keys coincide only when the
    arguments are bit-identical.

    Args:
        prefix: Key prefix
        func_name: Function name
        args: Positional arguments
        kwargs: Keyword arguments

    Returns:
        Key string
    """
    key_parts = [prefix, func_name]

    if args:
        key_parts.append(json.dumps(_normalise(args), sort_keys=True))

    if kwargs:
        key_parts.append(json.dumps(_normalise(kwargs), sort_keys=True))

    key = ":".join(key_parts)

    # long argument lists are hashed; the prefix and name stay readable
    if len(key) > 250:
        key = ":".join([prefix, func_name, hashlib.sha256(key.encode()).hexdigest()])

    return key


def table_key(m: int, count: int, rel_tol: float, abs_tol: float) -> str:
    """
    Stable key of a zero table.

    The same key is produced in every process, so it can name files.

    Args:
        m: Model order
        count: Number of zeros requested
        rel_tol: Relative tolerance of the table build
        abs_tol: Absolute tolerance of the table build

    Returns:
        Key of the form ``zeros-m<m>-n<count>-<digest>``
    """
    digest = hashlib.sha256(
        json.dumps([m, count, repr(rel_tol), repr(abs_tol)]).encode()
    ).hexdigest()[:16]
    return f"zeros-m{m}-n{count}-{digest}"
