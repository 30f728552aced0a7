"""Special functions and series kernels.

Everything thermodynamic in :mod:`qbt` bottoms out here: the digamma function
(and its derivative) that resums Matsubara sums, the sine and cosine integrals,
the Laplace-type integral

.. math:: \\mathrm{aux}(a) = \\int_0^\\infty \\frac{e^{-a y}}{1 + y^2}\\,dy,

and the thermal series :math:`\\sum_n n^{-1} \\sum_\\mu \\tau_\\mu\\,
\\mathrm{aux}(n \\beta\\hbar \\underline{\\omega}_\\mu)` that carries the
temperature dependence of the coupling free energy.

Scalar kernels come from the compiled extension when it is available
(see :data:`qbt.BACKEND`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels as _k
from .errors import ConfigError, DomainError, PoleArgument

__all__ = [
    "EULER_GAMMA",
    "SeriesControl",
    "digamma",
    "trigamma",
    "digamma_asymptotic",
    "ci",
    "si_lower",
    "aux_laplace",
    "hurwitz_zeta",
    "matsubara_coth",
    "matsubara_delta_sum",
]

#: Euler's constant :math:`c_e`, 20 significant digits.
EULER_GAMMA = 0.57721566490153286061

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for infinite thermal series.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Target accuracy of the series value (the analytic tail is summed until
        its next term is below ``0.01 * (abs_tol + rel_tol * |value|)``).
    max_terms : int
        Upper bound on the number of directly summed terms.
    quad_tol : float
        Relative accuracy of each complex aux integral.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_terms: int = 1_000_000
    quad_tol: float = 1e-13

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise ConfigError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if int(self.max_terms) < 1:
            raise ConfigError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.quad_tol > 0:
            raise ConfigError(f"quad_tol must be > 0, got {self.quad_tol}")


def _check_pole(z: complex, name: str) -> None:
    if abs(z.imag) <= _POLE_TOL and z.real <= _POLE_TOL:
        if abs(z.real - round(z.real)) <= _POLE_TOL:
            raise PoleArgument(f"{name} has a pole at z={z!r}")


def _finite(z: complex, name: str) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name}: non-finite argument {z!r}")


def digamma(z):
    """Digamma function :math:`\\psi(z) = d\\ln\\Gamma(z)/dz`.

    Reflection for ``Re z < 0``, upward recurrence to ``|z| >= 10`` and the
    Bernoulli asymptotic series with ten terms.

    Parameters
    ----------
    z : float or complex
        Argument, not a non-positive integer.

    Returns
    -------
    float or complex
        Real input gives a float, complex input a complex.

    Raises
    ------
    PoleArgument
        If `z` lies within 1e-12 of a non-positive integer.
    """
    is_real = not isinstance(z, complex) and not np.iscomplexobj(z)
    zc = complex(z)
    _finite(zc, "digamma")
    _check_pole(zc, "digamma")
    val = _k.digamma(zc)
    return val.real if is_real else val


def trigamma(z):
    """Trigamma function :math:`\\psi'(z)`; same conventions as :func:`digamma`."""
    is_real = not isinstance(z, complex) and not np.iscomplexobj(z)
    zc = complex(z)
    _finite(zc, "trigamma")
    _check_pole(zc, "trigamma")
    val = _k.trigamma(zc)
    return val.real if is_real else val


def digamma_asymptotic(y: float, n_bernoulli: int) -> float:
    """Truncated asymptotic series of the digamma function.

    .. math:: \\ln y - \\frac{1}{2y} - \\sum_{k=1}^{n} \\frac{B_{2k}}{2k\\,y^{2k}}

    Parameters
    ----------
    y : float
        Positive argument.
    n_bernoulli : int
        Number of Bernoulli terms, ``0 <= n_bernoulli <= 10``.
    """
    if not y > 0:
        raise DomainError(f"digamma_asymptotic needs y > 0, got {y}")
    if not 0 <= int(n_bernoulli) <= 10:
        raise DomainError(f"n_bernoulli must lie in [0, 10], got {n_bernoulli}")
    return _k.digamma_asymptotic(float(y), int(n_bernoulli)).real


def _positive_real(x, name: str) -> float:
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{name} needs a finite x > 0, got {x}")
    return x


def ci(x: float) -> float:
    """Cosine integral :math:`\\mathrm{Ci}(x) = c_e + \\ln x + \\int_0^x (\\cos t - 1)/t\\,dt`."""
    return _k.cisi(_positive_real(x, "ci"))[0]


def si_lower(x: float) -> float:
    """Sine integral :math:`\\mathrm{si}(x) = -\\int_x^\\infty \\sin t/t\\,dt = \\mathrm{Si}(x) - \\pi/2`."""
    return _k.cisi(_positive_real(x, "si_lower"))[1]


def aux_laplace(a, quad_tol: float = 1e-13):
    """The integral :math:`\\int_0^\\infty e^{-a y}/(1+y^2)\\,dy` for ``Re a > 0``.

    Real `a` uses the closed form :math:`\\sin a\\,\\mathrm{Ci}(a) - \\cos a\\,
    \\mathrm{si}(a)`.  Complex `a` is integrated along the ray
    :math:`\\arg y = -\\arg(a)/2` (adaptive Gauss-Kronrod 7/15 on geometric
    panels with an analytic tail bound), switching to the Watson expansion
    :math:`\\sum_k (-1)^k (2k)!/a^{2k+1}` once the decay rate along that ray
    exceeds 40, where its remainder is below `quad_tol`.

    Parameters
    ----------
    a : float or complex
        Laplace variable with positive real part.
    quad_tol : float, optional
        Relative accuracy target for the complex branch.

    Returns
    -------
    float or complex
        Same kind as the input.
    """
    is_real = not isinstance(a, complex) and not np.iscomplexobj(a)
    ac = complex(a)
    _finite(ac, "aux_laplace")
    if not ac.real > 0:
        raise DomainError(f"aux_laplace diverges for Re(a) <= 0, got a={ac!r}")
    if ac.imag == 0.0:
        val = _k.aux_real(ac.real)
        return val if is_real else complex(val, 0.0)
    return _k.aux_complex(ac, float(quad_tol))


def hurwitz_zeta(s: float, q: float) -> float:
    """Hurwitz zeta :math:`\\zeta(s, q) = \\sum_{k\\ge0}(q+k)^{-s}` for ``s > 1``, ``q > 0``."""
    if not s > 1:
        raise DomainError(f"hurwitz_zeta needs s > 1, got {s}")
    if not q > 0:
        raise DomainError(f"hurwitz_zeta needs q > 0, got {q}")
    return _k.hurwitz_zeta(float(s), float(q))


def matsubara_coth(omega: float, beta_hbar: float, n_terms: int) -> float:
    """Partial sum of the Matsubara representation of :math:`\\coth(\\beta\\hbar\\omega/2)`.

    .. math:: \\frac{2}{\\beta\\hbar\\omega}\\Big(1 + 2\\sum_{n=1}^{N}
              \\frac{\\omega^2}{\\nu_n^2 + \\omega^2}\\Big), \\quad
              \\nu_n = \\frac{2\\pi n}{\\beta\\hbar}

    Only used for validation; the production formulas are resummed.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not beta_hbar > 0:
        raise DomainError(f"beta_hbar must be > 0, got {beta_hbar}")
    if int(n_terms) < 0:
        raise DomainError(f"n_terms must be >= 0, got {n_terms}")
    x = beta_hbar * omega
    n = np.arange(1, int(n_terms) + 1, dtype=float)
    nu = 2.0 * math.pi * n
    # fsum keeps the partial sums monotone in n_terms
    s = math.fsum(x * x / (nu * nu + x * x))
    return 2.0 / x * (1.0 + 2.0 * s)


def matsubara_delta_sum(
    beta_hbar: float,
    rates: Sequence[complex],
    taus: Sequence[float],
    ctrl: SeriesControl | None = None,
) -> tuple[complex, int]:
    """Thermal series :math:`\\sum_{n\\ge1} n^{-1} \\sum_\\mu \\tau_\\mu\\,
    \\mathrm{aux}(n\\beta\\hbar r_\\mu)`.

    Terms are summed directly until ``n * beta_hbar * |r| * cos(arg(r)/2) >= 40``
    for every rate; the remainder follows from the Watson expansion of ``aux``
    summed in closed form with Hurwitz zeta values.  Complex-conjugate rates
    share one quadrature.

    Parameters
    ----------
    beta_hbar : float
        :math:`\\beta\\hbar > 0`.
    rates : sequence of complex
        Decay rates with positive real part.  At most 8.
    taus : sequence of float
        Weights, same length as `rates`.
    ctrl : SeriesControl, optional

    Returns
    -------
    value : complex
    n_direct : int
        Number of directly summed terms.

    Raises
    ------
    SeriesNotConverged
        If the direct part would exceed ``ctrl.max_terms``.
    """
    ctrl = ctrl or SeriesControl()
    if not beta_hbar > 0:
        raise DomainError(f"beta_hbar must be > 0, got {beta_hbar}")
    rates = [complex(r) for r in rates]
    if len(rates) != len(taus):
        raise DomainError("rates and taus differ in length")
    if not 1 <= len(rates) <= 8:
        raise DomainError("between 1 and 8 rates are supported")
    for r in rates:
        if not r.real > 0:
            raise DomainError(f"every rate needs Re > 0, got {r!r}")
    return _k.delta_series(
        float(beta_hbar),
        rates,
        [float(t) for t in taus],
        ctrl.rel_tol,
        ctrl.abs_tol,
        int(ctrl.max_terms),
        ctrl.quad_tol,
    )
