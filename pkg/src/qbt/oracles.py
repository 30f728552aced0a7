"""Brute-force quadrature references for the Drude closed forms.

These evaluate the defining frequency integrals directly (fluctuation
dissipation for the energy and correlations, the argument of the
susceptibility for the coupling free energy and coupling energy).  They are
slow and only accurate to about 1e-9, which is what makes them independent
checks of the resummed formulas.

Integrals run over :math:`[0, \\omega_{max}]` with
:math:`\\omega_{max} = \\max(50\\omega_d, 50/\\beta\\hbar)`; beyond that the
integrands decay like :math:`\\omega^{-3}` and the remainder is added
analytically from a two-term fit of the integrand at the cutoff.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .damping import DrudeParams, PhysicalConstants
from .errors import DomainError, QuadratureFailure
from .response import im_chi
from .thermo.free import free_osc_energy, free_osc_free_energy

__all__ = [
    "energy_quadrature",
    "coupling_free_energy_quadrature",
    "coupling_energy_quadrature",
    "position_correlation_quadrature",
    "arg_chi_derivative",
    "digamma_series",
    "system_entropy_quadrature",
]


def _coth_half(x: float) -> float:
    # coth(x/2), saturating where it is 1 to double precision
    return 1.0 if x > 40.0 else 1.0 / math.tanh(0.5 * x)


def arg_chi_derivative(p: DrudeParams, omega: float) -> float:
    """:math:`\\mathrm{Im}\\,\\frac{d}{d\\omega}\\ln\\tilde\\chi(\\omega + i0^+)` for Drude damping."""
    w0sq, wd, go = p.omega_0_sq, p.omega_d, p.gamma_o
    g = go * wd / (wd - 1j * omega)
    dg = 1j * go * wd / (wd - 1j * omega) ** 2
    den = w0sq - omega * omega - 1j * omega * g
    dden = -2.0 * omega - 1j * g - 1j * omega * dg
    return (-dden / den).imag


def _omega_max(p: DrudeParams, T: float, consts: PhysicalConstants) -> float:
    if T == 0:
        return 50.0 * p.omega_d
    return max(50.0 * p.omega_d, 50.0 * consts.k_B * T / consts.hbar)


def _integrate(fn, wmax: float, breaks, rel_tol: float) -> float:
    pts = sorted(b for b in breaks if 0.0 < b < wmax)
    val, err = integrate.quad(fn, 0.0, wmax, points=pts or None, limit=2000, epsabs=0.0, epsrel=rel_tol)
    if not math.isfinite(val) or err > 100 * rel_tol * max(abs(val), 1e-300):
        raise QuadratureFailure(f"quadrature error estimate {err:g} for value {val:g}")
    # tail: fit fn = C w^-3 + D w^-5 at wmax and 2 wmax, integrate analytically
    g1 = fn(wmax) * wmax**3
    g2 = fn(2.0 * wmax) * (2.0 * wmax) ** 3
    d = (g1 - g2) * 4.0 * wmax * wmax / 3.0
    c = g1 - d / (wmax * wmax)
    return val + c / (2.0 * wmax**2) + d / (4.0 * wmax**4)


def _breaks(p: DrudeParams, T: float, consts: PhysicalConstants) -> list[float]:
    b = [p.omega_0, p.Omega, p.omega_d, p.gamma_o, 0.5 * p.gamma]
    if T > 0:
        b.append(consts.k_B * T / consts.hbar)
    return b


def energy_quadrature(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None, rel_tol: float = 1e-11
) -> float:
    """:math:`E_s = \\frac{M\\hbar}{2\\pi}\\int_0^\\infty(\\omega_0^2+\\omega^2)
    \\coth(\\beta\\hbar\\omega/2)\\,\\mathrm{Im}\\tilde\\chi(\\omega)\\,d\\omega`."""
    consts = consts or PhysicalConstants()
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    w0sq = p.omega_0_sq
    bh = math.inf if T == 0 else consts.hbar / (consts.k_B * T)

    def fn(w):
        c = 1.0 if T == 0 else _coth_half(bh * w)
        return (w0sq + w * w) * c * im_chi(p, None, w, consts)

    val = _integrate(fn, _omega_max(p, T, consts), _breaks(p, T, consts), rel_tol)
    return consts.M * consts.hbar / (2.0 * math.pi) * val


def _arg_weighted(p: DrudeParams, T: float, consts, rel_tol: float, weight) -> float:
    def fn(w):
        return weight(w) * arg_chi_derivative(p, w)

    return _integrate(fn, _omega_max(p, T, consts), _breaks(p, T, consts), rel_tol) / math.pi


def coupling_free_energy_quadrature(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None, rel_tol: float = 1e-11
) -> float:
    """:math:`\\mathcal F_s = \\frac1\\pi\\int_0^\\infty f(\\omega,T)\\,
    \\mathrm{Im}\\frac{d}{d\\omega}\\ln\\tilde\\chi(\\omega+i0^+)\\,d\\omega`."""
    consts = consts or PhysicalConstants()
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    return _arg_weighted(p, T, consts, rel_tol, lambda w: free_osc_free_energy(w, T, consts))


def coupling_energy_quadrature(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None, rel_tol: float = 1e-11
) -> float:
    """Same integral as :func:`coupling_free_energy_quadrature` with :math:`e(\\omega,T)`."""
    consts = consts or PhysicalConstants()
    if not T >= 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    return _arg_weighted(p, T, consts, rel_tol, lambda w: free_osc_energy(w, T, consts))


def position_correlation_quadrature(
    p: DrudeParams, t: float, T: float, consts: PhysicalConstants | None = None
) -> float:
    """:math:`\\frac\\hbar\\pi\\int_0^\\infty\\coth(\\beta\\hbar\\omega/2)\\,
    \\mathrm{Im}\\tilde\\chi(\\omega)\\cos(\\omega t)\\,d\\omega` (Fourier quadrature for ``t > 0``)."""
    consts = consts or PhysicalConstants()
    if not T > 0:
        raise DomainError(f"correlation needs T > 0, got {T}")
    if not t >= 0:
        raise DomainError(f"time must be >= 0, got {t}")
    bh = consts.hbar / (consts.k_B * T)

    def fn(w):
        if w == 0.0:
            # coth(x/2) Im chi -> 2 gamma_o / (beta hbar M omega_0^4)
            return 2.0 * p.gamma_o / (bh * consts.M * p.omega_0_sq**2)
        return _coth_half(bh * w) * im_chi(p, None, w, consts)

    if t == 0:
        val, err = integrate.quad(fn, 0.0, np.inf, limit=2000, epsabs=0.0, epsrel=1e-11)
    else:
        val, err = integrate.quad(fn, 0.0, np.inf, weight="cos", wvar=t, limlst=200, limit=2000)
    if not math.isfinite(val) or err > 1e-6 * abs(val) + 1e-10:
        raise QuadratureFailure(f"correlation quadrature error {err:g} for value {val:g}")
    return consts.hbar / math.pi * val


def system_entropy_quadrature(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None, rel_tol: float = 1e-12
) -> float:
    """Entropy as a spectral average of free-oscillator entropies.

    .. math:: S_s = \\frac{M}{\\pi}\\int_0^\\infty \\frac{\\omega_0^2+\\omega^2}{\\omega}
              \\mathrm{Im}\\tilde\\chi(\\omega)\\, s(\\omega, T)\\,d\\omega,\\qquad
              s = k_B\\Big[\\frac{x}{e^x-1} - \\ln(1-e^{-x})\\Big]

    The same spectral weight reproduces :math:`E_s` from :math:`e(\\omega,T)`,
    so this is independent of the inverse-temperature construction of
    :math:`F_s`.
    """
    consts = consts or PhysicalConstants()
    if not T > 0:
        raise DomainError(f"entropy quadrature needs T > 0, got {T}")
    w0sq = p.omega_0_sq
    bh = consts.hbar / (consts.k_B * T)

    def fn(w):
        x = bh * w
        if x > 700.0:
            return 0.0
        s = x / math.expm1(x) - math.log1p(-math.exp(-x))
        return (w0sq + w * w) / w * im_chi(p, None, w, consts) * s

    pts = sorted({p.omega_0, p.Omega, p.omega_d, 0.5 * p.gamma, 1.0 / bh})
    edges = [0.0] + pts + [60.0 / bh + 50.0 * p.omega_d]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            v, e = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=1000)
            total, err = total + v, err + e
    if not math.isfinite(total) or err > 1e3 * rel_tol * abs(total) + 1e-300:
        raise QuadratureFailure(f"entropy quadrature error {err:g} for value {total:g}")
    return consts.k_B * consts.M / math.pi * total


def digamma_series(z, n_terms: int = 2000):
    """Digamma from its defining series with an asymptotic remainder.

    .. math:: \\psi(z) = -c_e + \\sum_{n=0}^{N-1}\\Big(\\frac{1}{n+1} - \\frac{1}{n+z}\\Big)
              + [\\psi(N+z) - \\psi(N+1)]

    where the bracket is evaluated from the Stirling series at large argument.
    Vectorized over `z`; ``Re z > 0`` assumed.
    """
    z = np.asarray(z, dtype=complex)
    n = np.arange(n_terms, dtype=float)
    head = np.sum(1.0 / (n[:, None] + 1.0) - 1.0 / (n[:, None] + z.ravel()[None, :]), axis=0).reshape(z.shape)

    def stirling(w):
        w2 = 1.0 / (w * w)
        # ln w - 1/(2w) - sum B_2k / (2k w^2k), k = 1..5
        s = w2 * (1 / 12 - w2 * (1 / 120 - w2 * (1 / 252 - w2 * (1 / 240 - w2 / 132))))
        return np.log(w) - 0.5 / w - s

    tail = stirling(n_terms + z) - stirling(complex(n_terms + 1))
    return -0.57721566490153286061 + head + tail
