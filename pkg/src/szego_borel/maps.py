"""
Conformal maps between the zero sectors of 1/phi and the Borel plane.

F_plus sends the upper imaginary sector onto Re zeta > -1/4 and takes the
zero i a_j to the residue exponent f_j; G_plus is its inverse.  The minus
maps are the mirror images through the real axis of xi.
"""
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from typing_extensions import TypeAlias

from .errors import DomainError
from .numerics.special import principal_power
from .phi import ModelOrder

ArrayLike: TypeAlias = Union[complex, np.ndarray]


@dataclass(frozen=True)
class ConformalMaps:
    """F_+/F_- and their inverses G_+/G_- for one model order (m >= 2)."""

    order: ModelOrder

    def __post_init__(self):
        if self.order.m < 2:
            raise DomainError("Conformal maps need m >= 2 (c2 vanishes for m = 1)")

    @property
    def beta(self) -> float:
        return self.order.exponent

    @property
    def xi_half_angle(self) -> float:
        """Half opening of D_xi^+, (2m - 2)/(2m - 1) * pi/2."""
        m = self.order.m
        return (2 * m - 2) / (2 * m - 1) * math.pi / 2

    def in_xi_sector(self, xi: complex, sign: int = 1) -> bool:
        if xi == 0:
            return False
        return abs(np.angle(complex(xi) * (-1j * sign))) < self.xi_half_angle

    @staticmethod
    def in_zeta_domain(zeta: complex) -> bool:
        return complex(zeta).real > -0.25

    def F(self, xi: ArrayLike, sign: int = 1) -> ArrayLike:
        """c2 (-/+ i xi)^{2m/(2m-1)} - 1/4, principal branch."""
        return self.order.c2 * principal_power(-1j * sign * np.asarray(xi, dtype=complex), self.beta) - 0.25

    def G(self, zeta: ArrayLike, sign: int = 1) -> ArrayLike:
        """+/- i [(zeta + 1/4)/c2]^{(2m-1)/(2m)}, principal branch."""
        w = (np.asarray(zeta, dtype=complex) + 0.25) / self.order.c2
        return 1j * sign * principal_power(w, 1.0 / self.beta)

    def G_prime(self, zeta: ArrayLike, sign: int = 1) -> ArrayLike:
        """Derivative of G; behaves like |zeta + 1/4|^{-1/(2m)} at the vertex."""
        w = (np.asarray(zeta, dtype=complex) + 0.25) / self.order.c2
        return 1j * sign / (self.beta * self.order.c2) * principal_power(w, 1.0 / self.beta - 1.0)

    def F_plus(self, xi: ArrayLike) -> ArrayLike:
        return self.F(xi, 1)

    def F_minus(self, xi: ArrayLike) -> ArrayLike:
        return self.F(xi, -1)

    def G_plus(self, zeta: ArrayLike) -> ArrayLike:
        return self.G(zeta, 1)

    def G_minus(self, zeta: ArrayLike) -> ArrayLike:
        return self.G(zeta, -1)
