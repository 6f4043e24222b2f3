"""
Special functions and accurate summation.
"""
import math
from numbers import Real
from typing import Iterable, Tuple, Union

import numpy as np
from scipy import special as sc
from typing_extensions import TypeAlias

from ..errors import DomainError

ArrayLike: TypeAlias = Union[float, complex, np.ndarray]


def log_gamma(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Natural logarithm of Gamma on the positive real axis.

    Args:
        x: Positive real number or array of them

    Returns:
        ln Gamma(x)

    Raises:
        DomainError: If any x <= 0
    """
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x) or not np.all(x > 0):
            raise DomainError("log_gamma requires x > 0")
        return sc.gammaln(x)
    if isinstance(x, bool) or not isinstance(x, Real) or not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return float(sc.gammaln(float(x)))


def log_reciprocal_gamma(z: ArrayLike) -> ArrayLike:
    """
    Principal logarithm of 1/Gamma(z) for complex z.

    For Re z < 1/2 the reflection identity
    1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi is used; elsewhere the
    log-gamma of z itself.  Zeros of 1/Gamma give -inf real part.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    left = z.real < 0.5
    if np.any(left):
        zl = z[left]
        with np.errstate(divide="ignore"):
            out[left] = np.log(np.sin(np.pi * zl) / np.pi) + sc.loggamma(1.0 - zl)
    if np.any(~left):
        out[~left] = -sc.loggamma(z[~left])
    return out if out.ndim else complex(out)


def compensated_sum(values: Iterable[complex]) -> complex:
    """
    Correctly rounded sum of complex terms.

    Real and imaginary parts go through math.fsum separately after sorting
    by decreasing magnitude.
    """
    terms = sorted((complex(v) for v in values), key=abs, reverse=True)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def cancellation(values: Iterable[complex]) -> Tuple[complex, float]:
    """
    Sum the terms and report the largest term magnitude.

    Returns:
        (sum, largest |term|)
    """
    terms = [complex(v) for v in values]
    largest = max((abs(t) for t in terms), default=0.0)
    return compensated_sum(terms), largest


def principal_power(z: ArrayLike, alpha: float) -> ArrayLike:
    """z**alpha on the principal branch, with 0**alpha = 0 for alpha > 0."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(z == 0, 0j, np.exp(alpha * np.log(np.where(z == 0, 1, z))))
    return out if out.ndim else complex(out)
