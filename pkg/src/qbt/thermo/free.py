"""Free (uncoupled) oscillator reference values and their classical forms."""
from __future__ import annotations

import math

from ..damping import PhysicalConstants
from ..errors import DomainError

__all__ = [
    "free_osc_energy",
    "free_osc_free_energy",
    "free_osc_entropy",
    "classical_energy",
    "classical_free_energy",
]

# exp(-x) is below double resolution relative to 1 beyond this
_X_SATURATE = 700.0


def _check(omega: float, T: float) -> None:
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")


def free_osc_energy(omega: float, T: float, consts: PhysicalConstants | None = None) -> float:
    """Internal energy :math:`e(\\omega,T) = (\\hbar\\omega/2)\\coth(\\beta\\hbar\\omega/2)`.

    Examples
    --------
    >>> free_osc_energy(1.0, 0.0)
    0.5
    """
    consts = consts or PhysicalConstants()
    _check(omega, T)
    hw = consts.hbar * omega
    if T == 0:
        return 0.5 * hw
    x = hw / (consts.k_B * T)
    if x > _X_SATURATE:
        return 0.5 * hw
    return 0.5 * hw + hw / math.expm1(x)


def free_osc_free_energy(omega: float, T: float, consts: PhysicalConstants | None = None) -> float:
    """Helmholtz free energy :math:`f = \\hbar\\omega/2 + \\beta^{-1}\\ln(1 - e^{-\\beta\\hbar\\omega})`."""
    consts = consts or PhysicalConstants()
    _check(omega, T)
    hw = consts.hbar * omega
    if T == 0:
        return 0.5 * hw
    kT = consts.k_B * T
    x = hw / kT
    return 0.5 * hw + kT * math.log1p(-math.exp(-x)) if x < _X_SATURATE else 0.5 * hw


def free_osc_entropy(omega: float, T: float, consts: PhysicalConstants | None = None) -> float:
    """Entropy :math:`s = k_B[x/(e^x - 1) - \\ln(1 - e^{-x})]`, :math:`x = \\beta\\hbar\\omega`."""
    consts = consts or PhysicalConstants()
    _check(omega, T)
    if T == 0:
        return 0.0
    x = consts.hbar * omega / (consts.k_B * T)
    if x > _X_SATURATE:
        return 0.0
    return consts.k_B * (x / math.expm1(x) - math.log1p(-math.exp(-x)))


def classical_energy(T: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`e_{cl} = 1/\\beta`."""
    consts = consts or PhysicalConstants()
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    return consts.k_B * T


def classical_free_energy(omega: float, T: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`f_{cl} = \\beta^{-1}\\ln(\\beta\\hbar\\omega)`; needs ``T > 0``."""
    consts = consts or PhysicalConstants()
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not T > 0:
        raise DomainError(f"classical free energy needs T > 0, got {T}")
    kT = consts.k_B * T
    return kT * math.log(consts.hbar * omega / kT)
