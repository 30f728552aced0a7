"""Dynamic susceptibility, Drude pole structure and partial fractions.

With Drude damping the susceptibility

.. math:: \\tilde\\chi(\\omega) = \\frac{1}{M}\\,
          \\frac{1}{\\omega_0^2 - \\omega^2 - i\\omega\\tilde\\gamma(\\omega)}

is rational with three poles at :math:`\\omega = -i\\underline{\\omega}_l`,
:math:`\\underline{\\omega}_l \\in \\{\\Omega, z_1, z_2\\}`, and

.. math:: \\tilde\\chi_d(\\omega) = -\\frac{1}{M}\\,
          \\frac{\\omega + i\\omega_d}{(\\omega+i\\Omega)(\\omega+iz_1)(\\omega+iz_2)},
          \\qquad
          \\mathrm{Im}\\,\\tilde\\chi_d(\\omega) = -\\frac{1}{M}\\sum_l \\lambda_l\\,
          \\frac{\\omega}{\\omega^2 + \\underline{\\omega}_l^2}.

The coefficients :math:`\\lambda_l` are the residues of
:math:`H(s) = -(\\omega_d - s)/\\prod_l (s - \\underline{\\omega}_l)`, which
is what :func:`pole_sum` exploits to evaluate
:math:`\\sum_l \\lambda_l g(\\underline{\\omega}_l)` through coincident poles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .damping import Branch, DampingModel, DrudeParams, PhysicalConstants, gamma_tilde
from .errors import DegeneratePoles, DomainError, PoleArgument

__all__ = [
    "DrudePoles",
    "PartialFractionCoeffs",
    "TAUS",
    "DEGENERATE_RTOL",
    "CONFLUENT_RTOL",
    "drude_poles",
    "partial_fractions",
    "chi_tilde",
    "chi_tilde_drude_factored",
    "im_chi",
    "im_chi_partial_fractions",
    "pole_sum",
    "log_ratio_over",
]

#: Signs attached to the rates (omega_d, Omega, z1, z2) in the thermal series.
TAUS = (1.0, -1.0, -1.0, -1.0)
#: Relative pole separation below which plain partial fractions are refused.
DEGENERATE_RTOL = 1e-10
#: Relative pole separation below which :func:`pole_sum` uses the double-pole form.
CONFLUENT_RTOL = 1e-5


@dataclass(frozen=True)
class DrudePoles:
    """Decay rates of the three susceptibility poles (poles at -i * rate)."""

    Omega: complex
    z1: complex
    z2: complex
    omega_d: float

    @property
    def rates(self) -> tuple[complex, complex, complex]:
        return (self.Omega, self.z1, self.z2)

    @property
    def all_rates(self) -> tuple[complex, complex, complex, complex]:
        """``(omega_d, Omega, z1, z2)``, paired with :data:`TAUS`."""
        return (complex(self.omega_d), self.Omega, self.z1, self.z2)


@dataclass(frozen=True)
class PartialFractionCoeffs:
    """Coefficients :math:`\\lambda_l` paired with the rates ``(Omega, z1, z2)``."""

    lambdas: tuple[complex, complex, complex]
    rates: tuple[complex, complex, complex]
    omega_d: float
    taus: tuple[float, float, float, float] = TAUS

    def sum_rules(self) -> tuple[complex, complex]:
        """Return :math:`(\\sum\\lambda_l, \\sum\\lambda_l\\underline{\\omega}_l^2)`; both vanish."""
        s0 = sum(self.lambdas)
        s2 = sum(lam * r * r for lam, r in zip(self.lambdas, self.rates))
        return s0, s2


def drude_poles(p: DrudeParams) -> DrudePoles:
    """Pole rates for Drude parameters.

    Underdamped: :math:`z_{1,2} = \\gamma/2 \\pm i\\mathbf{w}_1`.  Overdamped:
    :math:`z_1 = \\gamma/2 + \\bar{\\mathbf{w}}_1` and :math:`z_2 = \\mathbf{w}_0^2/z_1`
    (the same root as :math:`\\gamma/2 - \\bar{\\mathbf{w}}_1`, without
    cancellation).  Critical: :math:`z_1 = z_2 = \\gamma/2`.
    """
    half = 0.5 * p.gamma
    w1 = p.w1
    branch = p.branch
    if branch is Branch.UNDERDAMPED:
        z1 = complex(half, w1)
        z2 = complex(half, -w1)
    elif branch is Branch.OVERDAMPED:
        z1 = complex(half + w1)
        z2 = complex(p.w0 * p.w0 / (half + w1))
    else:
        z1 = z2 = complex(half)
    return DrudePoles(Omega=complex(p.Omega), z1=z1, z2=z2, omega_d=p.omega_d)


def _rel_sep(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b))


def partial_fractions(poles: DrudePoles, rtol: float = DEGENERATE_RTOL) -> PartialFractionCoeffs:
    """Partial-fraction coefficients of the Drude susceptibility.

    .. math:: \\lambda_1 = \\frac{z_1+z_2}{(\\Omega-z_1)(z_2-\\Omega)},\\quad
              \\lambda_2 = \\frac{\\Omega+z_2}{(z_1-\\Omega)(z_2-z_1)},\\quad
              \\lambda_3 = \\frac{\\Omega+z_1}{(z_2-\\Omega)(z_1-z_2)}

    Raises
    ------
    DegeneratePoles
        If two rates agree to better than `rtol` (relative).
    """
    W, z1, z2 = poles.rates
    for a, b, names in ((W, z1, "Omega, z1"), (W, z2, "Omega, z2"), (z1, z2, "z1, z2")):
        if _rel_sep(a, b) < rtol:
            raise DegeneratePoles(f"pole rates ({names}) coincide: {a!r}, {b!r}")
    lam1 = (z1 + z2) / ((W - z1) * (z2 - W))
    lam2 = (W + z2) / ((z1 - W) * (z2 - z1))
    lam3 = (W + z1) / ((z2 - W) * (z1 - z2))
    return PartialFractionCoeffs(lambdas=(lam1, lam2, lam3), rates=(W, z1, z2), omega_d=poles.omega_d)


def chi_tilde(
    model: DampingModel, omega_0: float, omega: complex, consts: PhysicalConstants | None = None
) -> complex:
    """Susceptibility from its defining form with :math:`\\tilde\\gamma(\\omega)`.

    Raises
    ------
    PoleArgument
        If the denominator is numerically zero.
    """
    consts = consts or PhysicalConstants()
    omega = complex(omega)
    den = omega_0 * omega_0 - omega * omega - 1j * omega * gamma_tilde(model, omega)
    scale = omega_0 * omega_0 + abs(omega) ** 2
    if abs(den) < 1e-14 * scale:
        raise PoleArgument(f"chi_tilde is singular at omega={omega!r}")
    return 1.0 / (consts.M * den)


def chi_tilde_drude_factored(
    p: DrudeParams, omega: complex, consts: PhysicalConstants | None = None
) -> complex:
    """Drude susceptibility from the pole factorization."""
    consts = consts or PhysicalConstants()
    poles = drude_poles(p)
    omega = complex(omega)
    den = (omega + 1j * poles.Omega) * (omega + 1j * poles.z1) * (omega + 1j * poles.z2)
    if den == 0:
        raise PoleArgument(f"chi_tilde is singular at omega={omega!r}")
    return -(omega + 1j * p.omega_d) / (consts.M * den)


def _model_and_w0(model, omega_0):
    if isinstance(model, DrudeParams):
        return model.model, model.omega_0
    if omega_0 is None:
        raise DomainError("omega_0 is required for a bare damping model")
    return model, float(omega_0)


def im_chi(model, omega_0: float | None, omega: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`\\mathrm{Im}\\,\\tilde\\chi(\\omega + i0^+)` on the positive real axis.

    Evaluated in closed form, :math:`\\omega\\,\\mathrm{Re}\\tilde\\gamma(\\omega) /
    (M |\\omega_0^2 - \\omega^2 - i\\omega\\tilde\\gamma(\\omega)|^2)`, so no
    finite regulator enters.

    Parameters
    ----------
    model : Drude, Ohmic or DrudeParams
    omega_0 : float or None
        Bare frequency; ignored for :class:`DrudeParams`.
    omega : float
        Positive real frequency.
    """
    consts = consts or PhysicalConstants()
    if not omega > 0:
        raise DomainError(f"im_chi needs omega > 0, got {omega}")
    model, w0 = _model_and_w0(model, omega_0)
    g = gamma_tilde(model, omega)
    den = w0 * w0 - omega * omega - 1j * omega * g
    return omega * g.real / (consts.M * (den.real * den.real + den.imag * den.imag))


def im_chi_partial_fractions(
    coeffs: PartialFractionCoeffs, omega: float, consts: PhysicalConstants | None = None
) -> float:
    """Drude :math:`\\mathrm{Im}\\,\\tilde\\chi` from partial fractions."""
    consts = consts or PhysicalConstants()
    if not omega > 0:
        raise DomainError(f"im_chi needs omega > 0, got {omega}")
    s = sum(lam * omega / (omega * omega + r * r) for lam, r in zip(coeffs.lambdas, coeffs.rates))
    return -s.real / consts.M


def pole_sum(
    poles: DrudePoles,
    g: Callable[[complex], complex],
    dg: Callable[[complex], complex] | None = None,
    rtol: float = CONFLUENT_RTOL,
) -> complex:
    """Evaluate :math:`\\sum_l \\lambda_l\\, g(\\underline{\\omega}_l)`.

    For well separated rates this is the plain weighted sum.  When two rates
    agree to within `rtol` they are merged at their midpoint and the
    double-pole residue of :math:`H(s)g(s)` is used, which needs the
    derivative `dg`.

    Raises
    ------
    DegeneratePoles
        If all three rates coincide, or two coincide and `dg` is missing.
    """
    rates = list(poles.rates)
    wd = poles.omega_d
    close = [
        (i, j)
        for i in range(3)
        for j in range(i + 1, 3)
        if _rel_sep(rates[i], rates[j]) < rtol
    ]
    if not close:
        lams = partial_fractions(poles, rtol=0.0).lambdas
        return sum(lam * g(r) for lam, r in zip(lams, rates))
    if len(close) > 1:
        raise DegeneratePoles("all three pole rates coincide")
    if dg is None:
        raise DegeneratePoles("coincident pole rates need the derivative of g")
    i, j = close[0]
    (k,) = {0, 1, 2} - {i, j}
    r = 0.5 * (rates[i] + rates[j])
    rc = rates[k]
    gr = g(r)
    d = r - rc
    double = (gr - (wd - r) * dg(r)) / d + (wd - r) * gr / (d * d)
    single = -(wd - rc) * g(rc) / (d * d)
    return double + single


def log_ratio_over(x2: float, c: float) -> float:
    """:math:`\\ln((c - x)/(c + x))/x` as a function of :math:`x^2`, for real or imaginary x.

    Equals :math:`-2\\,\\mathrm{artanh}(x/c)/x` for ``x2 > 0`` and
    :math:`-2\\arctan(|x|/c)/|x|` for ``x2 < 0``; tends to :math:`-2/c`.
    """
    if x2 == 0.0:
        return -2.0 / c
    if x2 > 0.0:
        x = math.sqrt(x2)
        return -2.0 * math.atanh(x / c) / x
    x = math.sqrt(-x2)
    return -2.0 * math.atan(x / c) / x
