"""Ohmic damping: finite pieces and explicitly regularized divergent ones.

Without a cutoff the velocity variance, the energy and the coupling free
energy all grow logarithmically with the ultraviolet regulator.  Those are
returned as :class:`RegularizedValue` so a caller can never mistake a
cutoff-dependent number for a physical one.  The position variance and the
temperature-dependent part of the coupling free energy are finite.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from ..damping import PhysicalConstants
from ..errors import DomainError
from ..specfun import SeriesControl, digamma, matsubara_delta_sum, trigamma
from .free import classical_free_energy

__all__ = [
    "RegularizedValue",
    "ohmic_roots",
    "ohmic_position_variance",
    "ohmic_velocity_variance",
    "ohmic_energy",
    "ohmic_coupling_free_energy_delta",
    "ohmic_coupling_free_energy_zero_T",
    "ohmic_coupling_free_energy",
    "classical_ohmic_coupling_free_energy",
]

_TWO_PI = 2.0 * math.pi
_CONFLUENT_RTOL = 1e-5


@dataclass(frozen=True)
class RegularizedValue:
    """A quantity that diverges as its regulator is removed.

    Attributes
    ----------
    value : float
        Value at the stated regulator.
    divergent : bool
    cutoff_terms : int or None
        Number of Matsubara terms kept, for Matsubara-regularized values.
    log_slope : float or None
        Coefficient of the logarithm of the regulator.
    cutoff_frequency : float or None
        Upper frequency limit, for frequency-regularized values.
    """

    value: float
    divergent: bool
    cutoff_terms: int | None = None
    log_slope: float | None = None
    cutoff_frequency: float | None = None

    def __post_init__(self):
        if self.divergent and self.log_slope is None:
            raise DomainError("a divergent value must carry its log_slope")

    def to_dict(self) -> dict:
        d = {"divergent": self.divergent, "value_at_cutoff": self.value}
        if self.cutoff_terms is not None:
            d["cutoff_terms"] = self.cutoff_terms
        if self.cutoff_frequency is not None:
            d["cutoff_frequency"] = self.cutoff_frequency
        if self.log_slope is not None:
            d["log_slope"] = self.log_slope
        return d


def _check(omega_0: float, gamma_o: float) -> None:
    if not omega_0 > 0:
        raise DomainError(f"omega_0 must be > 0, got {omega_0}")
    if not gamma_o > 0:
        raise DomainError(f"gamma_o must be > 0, got {gamma_o}")


def ohmic_roots(omega_0: float, gamma_o: float) -> tuple[complex, complex]:
    """Rates :math:`\\omega_{1,2} = \\gamma_o/2 \\mp \\bar{\\mathbf{w}}`,
    :math:`\\bar{\\mathbf{w}} = \\sqrt{(\\gamma_o/2)^2 - \\omega_0^2}`.

    Real and positive when overdamped, a conjugate pair when underdamped.

    Examples
    --------
    >>> w1, w2 = ohmic_roots(1.0, 4.0)
    >>> round(w1.real, 12), round(w2.real, 12)
    (0.267949192431, 3.732050807569)
    """
    _check(omega_0, gamma_o)
    half = 0.5 * gamma_o
    disc = (half - omega_0) * (half + omega_0)
    if disc >= 0:
        w2 = half + math.sqrt(disc)
        # omega_1 omega_2 = omega_0^2, free of cancellation
        return complex(omega_0 * omega_0 / w2), complex(w2)
    wb = cmath.sqrt(disc)
    return half - wb, half + wb


def _pair_difference(w1: complex, w2: complex, g, dg) -> complex:
    """:math:`[g(\\omega_2) - g(\\omega_1)]/(\\omega_2 - \\omega_1)`, derivative form when confluent."""
    if abs(w2 - w1) <= _CONFLUENT_RTOL * abs(w1 + w2):
        return dg(0.5 * (w1 + w2))
    return (g(w2) - g(w1)) / (w2 - w1)


def _clog1p(x: complex) -> complex:
    """Complex ``log(1 + x)`` accurate for small ``|x|``."""
    x = complex(x)
    return complex(0.5 * math.log1p(2.0 * x.real + abs(x) ** 2), math.atan2(x.imag, 1.0 + x.real))


def _real(z: complex) -> float:
    return complex(z).real


def ohmic_position_variance(
    omega_0: float, gamma_o: float, T: float, consts: PhysicalConstants | None = None
) -> float:
    """:math:`\\langle q^2\\rangle = \\frac{1}{2\\bar{\\mathbf{w}}M}\\sum_j\\lambda_j
    \\{1/(\\beta\\omega_j) + (\\hbar/\\pi)\\psi(\\beta\\hbar\\omega_j/2\\pi)\\}`,
    :math:`\\lambda = (-1, 1)`."""
    consts = consts or PhysicalConstants()
    _check(omega_0, gamma_o)
    if not T > 0:
        raise DomainError(f"position variance needs T > 0, got {T}")
    beta = 1.0 / (consts.k_B * T)
    c = beta * consts.hbar / _TWO_PI
    hbar = consts.hbar

    def h(r):
        return 1.0 / (beta * r) + hbar / math.pi * digamma(complex(c * r))

    def dh(r):
        return -1.0 / (beta * r * r) + hbar / math.pi * c * trigamma(complex(c * r))

    w1, w2 = ohmic_roots(omega_0, gamma_o)
    return _real(_pair_difference(w1, w2, h, dh)) / consts.M


def ohmic_velocity_variance(
    omega_0: float,
    gamma_o: float,
    T: float,
    consts: PhysicalConstants | None = None,
    cutoff_terms: int = 1000,
) -> RegularizedValue:
    """Velocity variance truncated after `cutoff_terms` Matsubara frequencies.

    .. math:: \\langle\\dot q^2\\rangle_N = \\frac{1}{\\beta M}\\Big[1 + 2\\sum_{n=1}^{N}
              \\frac{\\omega_0^2 + \\nu_n\\gamma_o}{(\\nu_n + \\omega_1)(\\nu_n + \\omega_2)}\\Big]

    summed in closed form with digamma functions.  Grows like
    :math:`(\\hbar\\gamma_o/\\pi M)\\ln N`.
    """
    consts = consts or PhysicalConstants()
    _check(omega_0, gamma_o)
    if not T > 0:
        raise DomainError(f"velocity variance needs T > 0, got {T}")
    if int(cutoff_terms) < 10:
        raise DomainError(f"cutoff_terms must be >= 10, got {cutoff_terms}")
    n = int(cutoff_terms)
    beta = 1.0 / (consts.k_B * T)
    c = beta * consts.hbar / _TWO_PI

    # sum_{n<=N} w^2/(nu_n + w) = (w^2 / nu_1) [psi(N + 1 + y) - psi(1 + y)], y = w / nu_1
    def g(r):
        y = c * r
        return r * r * (digamma(complex(n + 1 + y)) - digamma(complex(1 + y)))

    def dg(r):
        y = c * r
        d = digamma(complex(n + 1 + y)) - digamma(complex(1 + y))
        return 2 * r * d + r * r * c * (trigamma(complex(n + 1 + y)) - trigamma(complex(1 + y)))

    w1, w2 = ohmic_roots(omega_0, gamma_o)
    s = _pair_difference(w1, w2, g, dg)
    value = 1.0 / (beta * consts.M) + consts.hbar / (math.pi * consts.M) * _real(s)
    return RegularizedValue(
        value=value,
        divergent=True,
        cutoff_terms=n,
        log_slope=consts.hbar * gamma_o / (math.pi * consts.M),
    )


def ohmic_energy(
    omega_0: float,
    gamma_o: float,
    T: float,
    consts: PhysicalConstants | None = None,
    cutoff_terms: int = 1000,
) -> RegularizedValue:
    """:math:`E_s = (M/2)(\\langle\\dot q^2\\rangle_N + \\omega_0^2\\langle q^2\\rangle)`, divergent in N."""
    consts = consts or PhysicalConstants()
    v = ohmic_velocity_variance(omega_0, gamma_o, T, consts, cutoff_terms)
    q2 = ohmic_position_variance(omega_0, gamma_o, T, consts)
    return RegularizedValue(
        value=0.5 * consts.M * (v.value + omega_0 * omega_0 * q2),
        divergent=True,
        cutoff_terms=v.cutoff_terms,
        log_slope=0.5 * consts.M * v.log_slope,
    )


def ohmic_coupling_free_energy_delta(
    omega_0: float,
    gamma_o: float,
    T: float,
    consts: PhysicalConstants | None = None,
    ctrl: SeriesControl | None = None,
) -> float:
    """Finite thermal part :math:`\\Delta\\mathcal F_s(T) = -\\frac{1}{\\pi\\beta}\\sum_n\\frac1n
    \\sum_j \\int_0^\\infty e^{-n\\beta\\hbar\\omega_j y}/(1+y^2)\\,dy`."""
    consts = consts or PhysicalConstants()
    _check(omega_0, gamma_o)
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 0.0
    beta = 1.0 / (consts.k_B * T)
    w1, w2 = ohmic_roots(omega_0, gamma_o)
    series, _ = matsubara_delta_sum(beta * consts.hbar, (w1, w2), (1.0, 1.0), ctrl)
    return -series.real / (math.pi * beta)


def ohmic_coupling_free_energy_zero_T(
    omega_0: float,
    gamma_o: float,
    cutoff_frequency: float,
    consts: PhysicalConstants | None = None,
) -> RegularizedValue:
    """:math:`\\mathcal F_s(0) = \\frac{\\hbar\\gamma_o}{2\\pi}\\int_0^\\Lambda
    \\frac{\\omega(\\omega^2+\\omega_0^2)}{(\\omega^2-\\omega_0^2)^2 + \\gamma_o^2\\omega^2}d\\omega`.

    With :math:`u = \\omega^2` the integrand splits over the roots,
    :math:`\\tfrac12[\\alpha\\ln(1 + \\Lambda^2/\\omega_1^2) + (1-\\alpha)\\ln(1+\\Lambda^2/\\omega_2^2)]`,
    :math:`\\alpha = (\\omega_0^2 - \\omega_1^2)/(\\omega_2^2 - \\omega_1^2)`.
    Grows like :math:`(\\hbar\\gamma_o/2\\pi)\\ln\\Lambda`.
    """
    consts = consts or PhysicalConstants()
    _check(omega_0, gamma_o)
    if not cutoff_frequency > 0:
        raise DomainError(f"cutoff_frequency must be > 0, got {cutoff_frequency}")
    lam2 = cutoff_frequency * cutoff_frequency
    w1, w2 = ohmic_roots(omega_0, gamma_o)
    a, b = w1 * w1, w2 * w2
    w02 = omega_0 * omega_0

    # alpha L(a) + (1 - alpha) L(b) = [G(b) - G(a)] / (b - a), G(u) = (u - w0^2) L(u)
    def G(u):
        return (u - w02) * _clog1p(lam2 / u)

    def dG(u):
        return _clog1p(lam2 / u) - (u - w02) * lam2 / (u * (u + lam2))

    val = 0.5 * _pair_difference(a, b, G, dG)
    return RegularizedValue(
        value=consts.hbar * gamma_o / _TWO_PI * _real(val),
        divergent=True,
        log_slope=consts.hbar * gamma_o / _TWO_PI,
        cutoff_frequency=float(cutoff_frequency),
    )


def ohmic_coupling_free_energy(
    omega_0: float,
    gamma_o: float,
    T: float,
    cutoff_frequency: float,
    consts: PhysicalConstants | None = None,
    ctrl: SeriesControl | None = None,
) -> RegularizedValue:
    """Total :math:`\\mathcal F_s(T) = \\mathcal F_s(0;\\Lambda) + \\Delta\\mathcal F_s(T)`, divergent in :math:`\\Lambda`."""
    zero = ohmic_coupling_free_energy_zero_T(omega_0, gamma_o, cutoff_frequency, consts)
    delta = ohmic_coupling_free_energy_delta(omega_0, gamma_o, T, consts, ctrl)
    return RegularizedValue(
        value=zero.value + delta,
        divergent=True,
        log_slope=zero.log_slope,
        cutoff_frequency=zero.cutoff_frequency,
    )


def classical_ohmic_coupling_free_energy(
    omega_0: float, T: float, consts: PhysicalConstants | None = None
) -> float:
    """:math:`\\hbar\\to0` limit, :math:`f_{cl}(\\omega_0, T)`."""
    return classical_free_energy(omega_0, T, consts)
