"""Thermodynamics of an oscillator with Drude damping.

All finite-temperature quantities are sums over the pole rates
:math:`\\underline{\\omega}_l \\in \\{\\Omega, z_1, z_2\\}` weighted by the
partial-fraction coefficients :math:`\\lambda_l`, with the Matsubara sums
already resummed into digamma functions.  With :math:`y_l =
\\beta\\hbar\\underline{\\omega}_l/2\\pi` and
:math:`h_l = 1/(\\beta\\underline{\\omega}_l) + (\\hbar/\\pi)\\psi(y_l)`:

.. math::

    \\langle q^2\\rangle = \\frac{1}{M}\\sum_l \\lambda_l h_l, \\qquad
    \\langle \\dot q^2\\rangle = -\\frac{1}{M}\\sum_l \\lambda_l \\underline{\\omega}_l^2 h_l,
    \\qquad
    E_s = \\frac12 \\sum_l \\lambda_l (\\omega_0^2 - \\underline{\\omega}_l^2) h_l .

Underdamped parameters give complex-conjugate rates; sums are carried in
complex arithmetic and the real part is taken only at the end, after checking
that the imaginary part cancelled.
"""
from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from ..damping import DrudeParams, PhysicalConstants
from ..errors import DomainError, ImaginaryResidue, QuadratureFailure
from ..response import (
    TAUS,
    drude_poles,
    im_chi,
    log_ratio_over,
    partial_fractions,
    pole_sum,
)
from ..specfun import SeriesControl, digamma, hurwitz_zeta, matsubara_delta_sum, trigamma
from .free import classical_free_energy, free_osc_energy, free_osc_free_energy

__all__ = [
    "drude_energy",
    "drude_energy_zero_T",
    "drude_variances",
    "drude_position_correlation",
    "drude_coupling_free_energy",
    "drude_coupling_free_energy_zero_T",
    "drude_coupling_energy",
    "system_free_energy",
    "second_law_gap_drude",
    "classical_drude_energy",
    "classical_drude_coupling_free_energy",
    "classical_second_law_gap_drude",
]

_TWO_PI = 2.0 * math.pi
_IMAG_RTOL = 1e-10
# relative size of |w0^2 - Omega*gamma + Omega^2| below which the closed
# zero-temperature form loses digits (Omega meets z1 or z2)
_AB_SINGULAR_RTOL = 1e-5


def _real(value: complex, scale: float, what: str) -> float:
    value = complex(value)
    if abs(value.imag) > _IMAG_RTOL * max(abs(value.real), scale):
        raise ImaginaryResidue(f"{what} kept an imaginary part {value.imag!r} (real {value.real!r})")
    return value.real


def _check_T(T: float) -> None:
    if not (T >= 0 and math.isfinite(T)):
        raise DomainError(f"temperature must be finite and >= 0, got {T}")


def _h_functions(T: float, consts: PhysicalConstants) -> tuple[Callable, Callable]:
    """Return h(r) and h'(r); at T = 0 the (regularized) limit (hbar/pi) ln r."""
    hbar = consts.hbar
    if T == 0:
        return (lambda r: hbar / math.pi * np.log(r)), (lambda r: hbar / (math.pi * r))
    beta = 1.0 / (consts.k_B * T)
    c = beta * hbar / _TWO_PI

    def h(r):
        return 1.0 / (beta * r) + hbar / math.pi * digamma(complex(c * r))

    def dh(r):
        return -1.0 / (beta * r * r) + hbar / math.pi * c * trigamma(complex(c * r))

    return h, dh


def _scale(p: DrudeParams, T: float, consts: PhysicalConstants) -> float:
    return consts.hbar * p.w0 + consts.k_B * T


def drude_energy(p: DrudeParams, T: float, consts: PhysicalConstants | None = None) -> float:
    """Mean energy :math:`E_s(T) = \\langle H_s\\rangle` of the damped oscillator.

    Parameters
    ----------
    p : DrudeParams
    T : float
        Temperature, ``T >= 0``; ``T = 0`` is routed to
        :func:`drude_energy_zero_T`.
    consts : PhysicalConstants, optional

    Raises
    ------
    ImaginaryResidue
        If the conjugate-pair sum fails to be real.
    """
    consts = consts or PhysicalConstants()
    _check_T(T)
    if T == 0:
        return drude_energy_zero_T(p, consts)
    h, dh = _h_functions(T, consts)
    w02 = p.omega_0_sq

    def g(r):
        return 0.5 * (w02 - r * r) * h(r)

    def dg(r):
        return -r * h(r) + 0.5 * (w02 - r * r) * dh(r)

    return _real(pole_sum(drude_poles(p), g, dg), _scale(p, T, consts), "E_s")


def _energy_zero_T_pole_sum(p: DrudeParams, consts: PhysicalConstants) -> float:
    h, dh = _h_functions(0.0, consts)
    w02 = p.omega_0_sq

    def g(r):
        return 0.5 * (w02 - r * r) * h(r)

    def dg(r):
        return -r * h(r) + 0.5 * (w02 - r * r) * dh(r)

    return _real(pole_sum(drude_poles(p), g, dg), _scale(p, 0.0, consts), "E_s(0)")


def drude_energy_zero_T(
    p: DrudeParams, consts: PhysicalConstants | None = None, method: str = "closed"
) -> float:
    """Ground-state energy :math:`E_s(0) = (\\hbar/2\\pi)(A + B)`.

    .. math::

        A = \\frac{(\\mathbf{w}_0^2+\\Omega^2)(\\Omega\\gamma^2/4 - \\Omega\\mathbf{w}_0^2
            - \\mathbf{w}_0^2\\gamma/2) + \\Omega^2\\gamma^3/4}
            {\\bar{\\mathbf{w}}_1(\\Omega+\\gamma)(\\mathbf{w}_0^2 - \\Omega\\gamma + \\Omega^2)}
            \\ln\\frac{\\gamma/2 - \\bar{\\mathbf{w}}_1}{\\gamma/2 + \\bar{\\mathbf{w}}_1},
        \\qquad
        B = \\frac{\\Omega\\gamma(\\Omega^2 + \\Omega\\gamma - \\mathbf{w}_0^2)}
            {(\\Omega+\\gamma)(\\mathbf{w}_0^2 - \\Omega\\gamma + \\Omega^2)}
            \\ln\\frac{\\Omega}{\\mathbf{w}_0}.

    In the underdamped branch :math:`\\bar{\\mathbf{w}}_1 = i\\mathbf{w}_1` and
    the logarithm over :math:`\\bar{\\mathbf{w}}_1` becomes
    :math:`-2\\arctan(\\mathbf{w}_1/(\\gamma/2))/\\mathbf{w}_1`, which is real.

    Parameters
    ----------
    method : {"closed", "poles"}
        ``"closed"`` uses A + B (falling back to the pole sum when
        :math:`\\Omega` nearly coincides with :math:`z_1` or :math:`z_2`, where A and B
        separately blow up); ``"poles"`` uses
        :math:`(\\hbar/2\\pi)\\sum_l\\lambda_l(\\omega_0^2 - \\underline{\\omega}_l^2)\\ln\\underline{\\omega}_l`.
    """
    consts = consts or PhysicalConstants()
    if method == "poles":
        return _energy_zero_T_pole_sum(p, consts)
    if method != "closed":
        raise DomainError(f"unknown method {method!r}")
    w0, W, g = p.w0, p.Omega, p.gamma
    w02 = w0 * w0
    q = w02 - W * g + W * W
    if abs(q) < _AB_SINGULAR_RTOL * (w02 + W * W):
        return _energy_zero_T_pole_sum(p, consts)
    half = 0.5 * g
    wbar2 = (half - w0) * (half + w0)
    num_a = (w02 + W * W) * (W * g * g / 4.0 - W * w02 - w02 * half) + W * W * g**3 / 4.0
    A = num_a / ((W + g) * q) * log_ratio_over(wbar2, half)
    B = W * g * (W * W + W * g - w02) / ((W + g) * q) * math.log(W / w0)
    return consts.hbar / _TWO_PI * (A + B)


def drude_variances(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None
) -> tuple[float, float]:
    """Return :math:`(\\langle q^2\\rangle, \\langle\\dot q^2\\rangle)` in the Gibbs state."""
    consts = consts or PhysicalConstants()
    _check_T(T)
    h, dh = _h_functions(T, consts)
    poles = drude_poles(p)
    q2 = pole_sum(poles, h, dh) / consts.M
    qd2 = -pole_sum(poles, lambda r: r * r * h(r), lambda r: 2 * r * h(r) + r * r * dh(r)) / consts.M
    scale_q = consts.hbar / (consts.M * p.w0) + consts.k_B * T / (consts.M * p.omega_0_sq)
    return (
        _real(q2, scale_q, "<q^2>"),
        _real(qd2, scale_q * p.w0 * p.w0, "<qdot^2>"),
    )


def drude_position_correlation(
    p: DrudeParams,
    t: float,
    T: float,
    consts: PhysicalConstants | None = None,
    rel_tol: float = 1e-12,
) -> float:
    """Symmetrized correlation :math:`\\tfrac12\\langle q(0)q(t) + q(t)q(0)\\rangle`.

    For ``t > 0`` the Matsubara series

    .. math:: -\\frac{1}{\\beta M}\\sum_l \\lambda_l\\Big\\{\\frac{e^{-\\underline{\\omega}_l t}}{\\underline{\\omega}_l}
              + 2\\sum_{n\\ge1}\\frac{\\nu_n e^{-\\nu_n t} - \\underline{\\omega}_l e^{-\\underline{\\omega}_l t}}
              {\\nu_n^2 - \\underline{\\omega}_l^2}\\Big\\}

    is summed directly (terms pre-combined over l) until the
    :math:`\\nu_n`-exponential part is negligible; the remaining
    :math:`\\underline{\\omega}_l e^{-\\underline{\\omega}_l t}` part is closed
    with Hurwitz zeta sums.  At ``t = 0`` it equals :math:`\\langle q^2\\rangle`.
    """
    consts = consts or PhysicalConstants()
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if not T > 0:
        raise DomainError(f"correlation needs T > 0, got {T}")
    if t == 0:
        return drude_variances(p, T, consts)[0]
    poles = drude_poles(p)
    coeffs = partial_fractions(poles)
    lam = np.array(coeffs.lambdas)
    r = np.array(coeffs.rates)
    beta = 1.0 / (consts.k_B * T)
    nu1 = _TWO_PI / (beta * consts.hbar)
    er = np.exp(-r * t)
    rmax = float(np.max(np.abs(r)))
    # sum_l lam r^4 / nu^5 bounds the nu-exponential part beyond the
    # direct range; also require nu_N > 2 |r| so the tail expansion converges
    c4 = abs(np.sum(lam * r**4))
    n_dir = int(max(2.0 * rmax / nu1, (c4 / (rel_tol * nu1**5 * 1e-3 + 1e-300)) ** 0.25 / 2.0, 16))
    n_dir = min(n_dir, 5_000_000)
    n = np.arange(1, n_dir + 1, dtype=float)
    nu = nu1 * n
    terms = np.zeros(n_dir, dtype=complex)
    for lam_l, r_l, e_l in zip(lam, r, er):
        terms += lam_l * (nu * np.exp(-nu * t) - r_l * e_l) / (nu * nu - r_l * r_l)
    direct = np.sum(terms[::-1])
    # sum_{n>N} r e^{-rt}/(nu^2 - r^2) = sum_k r^(2k+1) e^{-rt} zeta(2k+2, N+1) / nu1^(2k+2)
    tail = 0j
    for lam_l, r_l, e_l in zip(lam, r, er):
        x = r_l / nu1
        pw = x / nu1
        part = 0j
        for k in range(60):
            term = pw * hurwitz_zeta(2.0 * k + 2.0, n_dir + 1.0)
            part += term
            if abs(term) <= 1e-17 * abs(part):
                break
            pw *= x * x
        tail -= lam_l * e_l * part
    base = np.sum(lam * er / r)
    val = -(base + 2.0 * (direct + tail)) / (beta * consts.M)
    scale = consts.hbar / (consts.M * p.w0) + consts.k_B * T / (consts.M * p.omega_0_sq)
    return _real(val, scale, "position correlation")


def drude_coupling_free_energy_zero_T(p: DrudeParams, consts: PhysicalConstants | None = None) -> float:
    """:math:`\\mathcal F_s(0) = (\\hbar/2\\pi)\\{(\\Omega+\\gamma)\\ln\\frac{\\Omega+\\gamma}{\\Omega}
    + \\gamma\\ln\\frac{\\Omega}{\\mathbf{w}_0} + \\bar{\\mathbf{w}}_1
    \\ln\\frac{\\gamma/2 - \\bar{\\mathbf{w}}_1}{\\gamma/2 + \\bar{\\mathbf{w}}_1}\\}`."""
    consts = consts or PhysicalConstants()
    w0, W, g = p.w0, p.Omega, p.gamma
    half = 0.5 * g
    wbar2 = (half - w0) * (half + w0)
    val = (W + g) * math.log1p(g / W) + g * math.log(W / w0) + wbar2 * log_ratio_over(wbar2, half)
    return consts.hbar / _TWO_PI * val


def drude_coupling_free_energy(
    p: DrudeParams,
    T: float,
    consts: PhysicalConstants | None = None,
    ctrl: SeriesControl | None = None,
) -> float:
    """Coupling free energy :math:`\\mathcal F_s(T)`, the minimum work to couple.

    .. math:: \\mathcal F_s(T) = \\mathcal F_s(0) + \\frac{1}{\\pi\\beta}\\sum_{n\\ge1}\\frac{1}{n}
              \\sum_{\\mu=0}^{3}\\tau_\\mu\\int_0^\\infty \\frac{e^{-n\\beta\\hbar\\underline{\\omega}_\\mu y}}{1+y^2}dy

    with rates :math:`(\\omega_d, \\Omega, z_1, z_2)` and signs
    :math:`\\tau = (1, -1, -1, -1)`.

    Raises
    ------
    SeriesNotConverged
        If more than ``ctrl.max_terms`` direct terms would be needed.
    """
    consts = consts or PhysicalConstants()
    _check_T(T)
    f0 = drude_coupling_free_energy_zero_T(p, consts)
    if T == 0:
        return f0
    beta = 1.0 / (consts.k_B * T)
    poles = drude_poles(p)
    series, _ = matsubara_delta_sum(beta * consts.hbar, poles.all_rates, TAUS, ctrl)
    return f0 + _real(series / (math.pi * beta), _scale(p, T, consts), "Delta series")


def drude_coupling_energy(p: DrudeParams, T: float, consts: PhysicalConstants | None = None) -> float:
    """Coupling energy :math:`\\mathcal E_s = \\partial(\\beta\\mathcal F_s)/\\partial\\beta`.

    .. math:: \\mathcal E_s = \\frac1\\beta + \\frac{\\hbar}{2\\pi}\\Big[\\omega_d\\,\\psi(1 + a_d)
              - \\sum_l \\underline{\\omega}_l\\,\\psi(1 + a_l)\\Big],\\quad
              a = \\beta\\hbar\\underline{\\omega}/2\\pi
    """
    consts = consts or PhysicalConstants()
    _check_T(T)
    if T == 0:
        return drude_coupling_free_energy_zero_T(p, consts)
    beta = 1.0 / (consts.k_B * T)
    c = beta * consts.hbar / _TWO_PI
    poles = drude_poles(p)
    s = p.omega_d * digamma(complex(1.0 + c * p.omega_d))
    for r in poles.rates:
        s -= r * digamma(1.0 + c * r)
    val = 1.0 / beta + consts.hbar / _TWO_PI * s
    return _real(val, _scale(p, T, consts), "coupling energy")


def system_free_energy(
    p: DrudeParams,
    T: float,
    consts: PhysicalConstants | None = None,
    quad_tol: float = 1e-11,
    beta0: float | None = None,
) -> tuple[float, float]:
    """System free energy and entropy, :math:`(F_s, S_s)`.

    Integrates the energy over inverse temperature,

    .. math:: F_s = \\frac1\\beta\\Big(\\int_{\\beta_0}^{\\beta} E_s\\,d\\beta' + \\mathcal C/k_B\\Big),
              \\qquad S_s = k_B\\beta (E_s - F_s),

    with the constant fixed by :math:`S_s \\to 0` at zero temperature,

    .. math:: \\mathcal C/k_B = \\frac{M\\hbar}{2\\pi}\\int_0^\\infty d\\omega\\,(\\omega_0^2+\\omega^2)\\,
              \\mathrm{Im}\\tilde\\chi(\\omega)\\,\\frac{2}{\\hbar\\omega}
              \\ln\\Big(2\\sinh\\frac{\\beta_0\\hbar\\omega}{2}\\Big).

    The result does not depend on the reference :math:`\\beta_0` (default
    :math:`\\beta`, which removes the first integral).

    Raises
    ------
    QuadratureFailure
        If either quadrature misses `quad_tol`.
    """
    consts = consts or PhysicalConstants()
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"system free energy needs finite T > 0, got {T}")
    beta = 1.0 / (consts.k_B * T)
    beta0 = beta if beta0 is None else float(beta0)
    if not beta0 > 0:
        raise DomainError(f"beta0 must be > 0, got {beta0}")
    hbar, M = consts.hbar, consts.M
    w02 = p.omega_0_sq
    b0h = beta0 * hbar

    # ln(2 sinh(x/2)) = x/2 + ln(1 - e^-x): the x/2 part integrates to
    # beta0 E_s(0) exactly, only the thermal remainder needs quadrature
    def integrand(w):
        x = b0h * w
        lg = math.log(-math.expm1(-x)) if x < 0.7 else math.log1p(-math.exp(-x))
        return (w02 + w * w) * im_chi(p, None, w, consts) * lg / w

    w_top = 60.0 / b0h  # e^-60 is below double precision relative to the peak
    marks = {p.w0, p.omega_0, p.omega_d, p.Omega, p.gamma, 1.0 / b0h, 10.0 / b0h}
    # bracket the resonance so a weakly damped (narrow) peak is resolved
    width = min(p.gamma, p.gamma_o)
    for centre in (p.omega_0, p.w0):
        d = width
        while d < centre:  # one breakpoint per decade of the Lorentzian tail
            marks.update((centre - d, centre + d))
            d *= 10.0
    edges = [0.0] + sorted(m for m in marks if 0.0 < m < w_top) + [w_top]
    c_int = 0.0
    err = 0.0
    with warnings.catch_warnings():
        # convergence is judged below from the summed error estimate
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=quad_tol, limit=400)
            c_int += v
            err += e
    if not math.isfinite(c_int) or err > 100 * quad_tol * abs(c_int) + 1e-300:
        raise QuadratureFailure(f"integration constant: error estimate {err:g} for value {c_int:g}")
    c_over_k = beta0 * drude_energy_zero_T(p, consts) + M / math.pi * c_int

    e_int = 0.0
    if beta0 != beta:
        v, e = integrate.quad(
            lambda b: drude_energy(p, 1.0 / (consts.k_B * b), consts),
            beta0,
            beta,
            epsabs=0.0,
            epsrel=quad_tol,
            limit=400,
        )
        if e > 100 * quad_tol * abs(v) + 1e-300:
            raise QuadratureFailure(f"beta integral: error estimate {e:g} for value {v:g}")
        e_int = v
    F = (e_int + c_over_k) / beta
    E = drude_energy(p, T, consts)
    S = consts.k_B * beta * (E - F)
    return F, S


def second_law_gap_drude(
    p: DrudeParams,
    T: float,
    consts: PhysicalConstants | None = None,
    ctrl: SeriesControl | None = None,
) -> float:
    """:math:`K_d(T) = \\mathcal F_s(T) - f(\\omega_0,T) - E_s(T) + e(\\omega_0,T)`."""
    consts = consts or PhysicalConstants()
    _check_T(T)
    w0 = p.omega_0
    return (
        drude_coupling_free_energy(p, T, consts, ctrl)
        - free_osc_free_energy(w0, T, consts)
        - drude_energy(p, T, consts)
        + free_osc_energy(w0, T, consts)
    )


def classical_drude_energy(p: DrudeParams, T: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`\\hbar\\to0` energy :math:`-\\frac{1}{2\\beta}\\sum_l\\lambda_l(\\omega_0^2-\\underline{\\omega}_l^2)/\\underline{\\omega}_l`.

    The thermal factor tends to :math:`-1/(\\beta\\underline{\\omega}_l)` because
    :math:`(\\hbar/\\pi)\\psi(y) \\to -2/(\\beta\\underline{\\omega}_l)`.
    """
    consts = consts or PhysicalConstants()
    if not T > 0:
        raise DomainError(f"classical energy needs T > 0, got {T}")
    kT = consts.k_B * T
    w02 = p.omega_0_sq
    val = pole_sum(
        drude_poles(p),
        lambda r: -0.5 * kT * (w02 - r * r) / r,
        lambda r: 0.5 * kT * (w02 / (r * r) + 1.0),
    )
    return _real(val, kT, "classical E_s")


def classical_drude_coupling_free_energy(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None
) -> float:
    """:math:`\\hbar\\to0` coupling free energy :math:`-\\frac{1}{2\\beta}\\ln\\frac{\\omega_d}{\\Omega} + f_{cl}(\\mathbf{w}_0,T)`."""
    consts = consts or PhysicalConstants()
    kT = consts.k_B * T
    return -0.5 * kT * math.log1p(p.gamma / p.Omega) + classical_free_energy(p.w0, T, consts)


def classical_second_law_gap_drude(
    p: DrudeParams, T: float, consts: PhysicalConstants | None = None
) -> float:
    """Classical :math:`K_d`; zero up to rounding."""
    consts = consts or PhysicalConstants()
    return (
        classical_drude_coupling_free_energy(p, T, consts)
        - classical_free_energy(p.omega_0, T, consts)
        - classical_drude_energy(p, T, consts)
        + consts.k_B * T
    )
