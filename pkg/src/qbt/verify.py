"""Self-verification suite behind ``qbt verify``.

``quick`` covers the special functions, sum rules, backend parity and one
quadrature cross-check.  ``full`` adds the quadrature grids, the figure1
style temperature grid, the discrete-bath ensemble, the classical and Ohmic
limits and the thermodynamic identity.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import oracles
from ._backend import BACKEND
from .damping import DrudeParams, drude_param_inverse
from .discrete_bath import (
    check_interlacing,
    coupling_energy,
    coupling_free_energy,
    energy_exact,
    energy_oracle,
    normal_modes,
    random_bath,
    second_law_gap,
)
from .response import drude_poles, partial_fractions
from .specfun import aux_laplace, digamma, digamma_asymptotic
from .thermo import (
    EvalOptions,
    drude_coupling_free_energy,
    drude_coupling_free_energy_zero_T,
    drude_energy,
    drude_energy_zero_T,
    evaluate_point,
    ohmic_coupling_free_energy_delta,
    ohmic_coupling_free_energy_zero_T,
    ohmic_velocity_variance,
    second_law_gap_drude,
    system_free_energy,
)

__all__ = ["Check", "FIGURE1_SETS", "run_checks", "format_report"]

log = logging.getLogger("qbt.verify")

#: (Omega, gamma) of the four reference curves, bottom to top, with w0 = 1.
FIGURE1_SETS = ((1.0, 1.5), (1.0, 4.0), (5.0, 1.5), (5.0, 4.0))


@dataclass(frozen=True)
class Check:
    """One verification outcome, ``measured`` compared with ``bound`` by ``op``."""

    name: str
    measured: float
    bound: float
    passed: bool
    detail: str = ""
    op: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.detail}]" if self.detail else ""
        return f"{status}  {self.name}: measured {self.measured:.3e} (required {self.op} {self.bound:.1e}){extra}"


def _at_most(name: str, measured: float, tol: float, detail: str = "") -> Check:
    measured = float(measured)
    return Check(name, measured, tol, bool(math.isfinite(measured) and measured <= tol), detail)


def _at_least(name: str, measured: float, bound: float, detail: str = "") -> Check:
    measured = float(measured)
    return Check(name, measured, bound, bool(math.isfinite(measured) and measured >= bound), detail, op=">=")


def _flag(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name, float(not ok), 0.0, bool(ok), detail)


def _sets():
    return [DrudeParams(1.0, W, g) for W, g in FIGURE1_SETS]


# quick ----------------------------------------------------------------------


def _check_digamma() -> list[Check]:
    rng = np.random.default_rng(7)
    z = rng.uniform(1e-3, 50, 200) + 1j * rng.uniform(-50, 50, 200)
    ref = oracles.digamma_series(z)
    err = max(abs(digamma(complex(a)) - b) / max(1.0, abs(b)) for a, b in zip(z, ref))
    return [
        _at_most("digamma(1) = -c_e", abs(digamma(1.0) + 0.5772156649015329), 1e-15),
        _at_most("digamma recurrence at 2.7", abs(digamma(3.7) - digamma(2.7) - 1 / 2.7), 1e-14),
        _at_most("digamma vs defining series (200 points)", err, 1e-12),
        _at_most(
            "asymptotic digamma, y=100, 3 Bernoulli terms",
            abs(digamma_asymptotic(100.0, 3) - digamma(100.0)) / abs(digamma(100.0)),
            1e-12,
        ),
    ]


def _aux_reference(a: complex) -> complex:
    def part(fn):
        return integrate.quad(lambda y: fn(np.exp(-a * y)) / (1 + y * y), 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)[0]

    return complex(part(np.real), part(np.imag))


def _check_aux() -> list[Check]:
    pts = [0.3, 2.0, 15.0, 0.5 + 0.5j, 2.0 - 3.0j, 0.2 + 1.0j]
    err = max(abs(complex(aux_laplace(a)) - _aux_reference(a)) / abs(_aux_reference(a)) for a in pts)
    return [_at_most("aux Laplace integral vs quadrature", err, 1e-10)]


def _random_params(rng, n):
    w0 = 10.0 ** rng.uniform(-1, 1, n)
    W = 10.0 ** rng.uniform(-1, 2, n)
    g = 10.0 ** rng.uniform(-1, 1.5, n)
    return [DrudeParams(*t) for t in zip(w0, W, g)]


def _check_sum_rules(n: int) -> list[Check]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for p in _random_params(rng, n):
        try:
            c = partial_fractions(drude_poles(p))
        except Exception:  # coincident poles have no plain partial fractions
            continue
        s0, s2 = c.sum_rules()
        n0 = sum(abs(x) for x in c.lambdas)
        n2 = sum(abs(x * r * r) for x, r in zip(c.lambdas, c.rates))
        worst = max(worst, abs(s0) / n0, abs(s2) / n2)
    return [_at_most(f"partial-fraction sum rules ({n} parameter sets)", worst, 1e-10)]


def _check_backends() -> list[Check]:
    from . import _kernels_py

    if BACKEND != "cython":
        return [_flag("compiled backend parity", True, "compiled extension not loaded")]
    from ._backend import kernels

    p = DrudeParams(1.0, 5.0, 1.5)
    rates = drude_poles(p).all_rates
    args = (1.0, rates, (1.0, -1.0, -1.0, -1.0), 1e-12, 1e-14, 10**6, 1e-13)
    a = kernels.delta_series(*args)[0]
    b = _kernels_py.delta_series(*args)[0]
    z = [0.3 + 0.1j, 5.0 - 2.0j, 40.0]
    d = max(abs(kernels.digamma(complex(x)) - _kernels_py.digamma(complex(x))) for x in z)
    return [_at_most("compiled vs pure-Python kernels", max(abs(a - b) / abs(b), d), 1e-13)]


def _check_one_quadrature() -> list[Check]:
    p = DrudeParams(1.0, 1.0, 4.0)
    a, b = drude_energy(p, 1.0), oracles.energy_quadrature(p, 1.0)
    return [_at_most("energy vs fluctuation-dissipation quadrature (w0=1, Omega=1, gamma=4, T=1)", abs(a - b) / abs(b), 1e-6)]


# full -----------------------------------------------------------------------


def _check_figure1() -> list[Check]:
    Ts = np.logspace(-2, math.log10(50.0), 200)
    K = np.array([[second_law_gap_drude(p, T) for T in Ts] for p in _sets()])
    k01 = [second_law_gap_drude(p, 0.1) for p in _sets()]
    ordered = all(a < b for a, b in zip(k01, k01[1:]))
    return [
        _at_least("min K_d on 200 temperatures x 4 sets", float(K.min()), -1e-8),
        _flag("K_d ordering at T=0.1 follows the reference set order", ordered, ", ".join(f"{k:.5f}" for k in k01)),
        _at_most("K_d(T=50) < 0.01", float(K[:, -1].max()), 0.01),
    ]


def _check_k0_limit() -> list[Check]:
    target = 1.5 / (2 * math.pi)
    devs = []
    for W in (50.0, 100.0, 200.0):
        devs.append(abs(second_law_gap_drude(DrudeParams(1.0, W, 1.5), 0.0) - target) / target)
    shrinking = devs[0] > devs[1] > devs[2]
    return [
        _at_most("K_d(0) -> hbar*gamma/(2 pi) at Omega=200", devs[-1], 0.05, ", ".join(f"{d:.4f}" for d in devs)),
        _flag("K_d(0) deviation shrinks with Omega", shrinking),
    ]


def _check_quadrature_grid() -> list[Check]:
    eE = eF = 0.0
    for p in _sets():
        for T in (0.05, 0.2, 1.0, 5.0, 20.0):
            a, b = drude_energy(p, T), oracles.energy_quadrature(p, T)
            eE = max(eE, abs(a - b) / abs(b))
            a, b = drude_coupling_free_energy(p, T), oracles.coupling_free_energy_quadrature(p, T)
            eF = max(eF, abs(a - b) / abs(b))
    return [
        _at_most("energy vs quadrature, 4 sets x 5 temperatures", eE, 1e-6),
        _at_most("coupling free energy vs quadrature, 4 sets x 5 temperatures", eF, 1e-6),
    ]


def _check_zero_T() -> list[Check]:
    dE = dF = 0.0
    for p in _sets():
        dE = max(dE, abs(drude_energy(p, 1e-4) - drude_energy_zero_T(p)))
        dF = max(dF, abs(drude_coupling_free_energy(p, 1e-4) - drude_coupling_free_energy_zero_T(p)))
    return [
        _at_most("|E_s(1e-4) - E_s(0)|", dE, 1e-3),
        _at_most("|F_cal(1e-4) - F_cal(0)|", dF, 1e-3),
    ]


def _check_discrete(n_baths: int = 100) -> list[Check]:
    rng = np.random.default_rng(42)
    inter = True
    eE, kmin, zero_gap, pos_gap = 0.0, math.inf, 0.0, math.inf
    for _ in range(n_baths):
        b = random_bath(int(rng.integers(1, 7)), rng)
        m = normal_modes(b)
        inter &= check_interlacing(b, m)
        for T in (0.0, 0.1, 1.0, 10.0):
            e1, e2 = energy_exact(b, T, modes=m), energy_oracle(b, T)
            eE = max(eE, abs(e1 - e2) / abs(e2))
            kmin = min(kmin, second_law_gap(b, T, modes=m))
            gap = coupling_energy(b, T, modes=m) - coupling_free_energy(b, T, modes=m)
            if T == 0:
                zero_gap = max(zero_gap, abs(gap))
            else:
                pos_gap = min(pos_gap, gap)
    return [
        _flag(f"interlacing on {n_baths} random baths", inter),
        _at_most("discrete E_s residue formula vs normal-coordinate oracle", eE, 1e-9),
        _at_least("min discrete K", kmin, -1e-9),
        _at_most("E_cal = F_cal at T=0", zero_gap, 1e-12),
        Check("min E_cal - F_cal at T>0", pos_gap, 1e-12, pos_gap > 1e-12, op=">"),
    ]


def _check_classical() -> list[Check]:
    wE = wF = wK = 0.0
    for p in _sets():
        T = 1e3 * p.w0  # beta hbar w0 = 1e-3
        beta = 1.0 / T
        wE = max(wE, abs(beta * drude_energy(p, T) - 1.0))
        wF = max(wF, abs(drude_coupling_free_energy(p, T) - T * math.log(p.omega_0 / T)) * beta)
        wK = max(wK, abs(evaluate_point(p, T, options=EvalOptions(classical=True)).K))
    return [
        _at_most("|beta E_s - 1| at beta hbar w0 = 1e-3", wE, 1e-2),
        _at_most("|F_cal - f_cl| beta at beta hbar w0 = 1e-3", wF, 1e-2),
        _at_most("classical-mode K", wK, 0.0),
    ]


def _check_ohmic() -> list[Check]:
    g, T = 1.5, 0.5
    Ns = np.array([1e3, 1e4, 1e5, 1e6])
    v = [ohmic_velocity_variance(1.0, g, T, cutoff_terms=int(n)).value for n in Ns]
    slope = np.polyfit(np.log(Ns), v, 1)[0]
    target = g / math.pi
    p = drude_param_inverse(1.0, 1e5, g)
    dd = drude_coupling_free_energy(p, T) - drude_coupling_free_energy_zero_T(p)
    do = ohmic_coupling_free_energy_delta(1.0, g, T)
    f_lo = ohmic_coupling_free_energy_zero_T(1.0, g, 1e2).value
    f_hi = ohmic_coupling_free_energy_zero_T(1.0, g, 1e4).value
    fslope = (f_hi - f_lo) / math.log(100.0)
    return [
        _at_most("Ohmic velocity variance log-slope vs hbar gamma_o/(pi M)", abs(slope - target) / target, 0.02),
        _at_most("Drude -> Ohmic thermal part, omega_d = 1e5", abs(dd - do), 1e-4),
        _at_most(
            "Ohmic F_cal(0) grows like (hbar gamma_o/2 pi) ln(cutoff)",
            abs(fslope - g / (2 * math.pi)) / (g / (2 * math.pi)),
            0.02,
        ),
    ]


def _check_identity() -> list[Check]:
    wI = 0.0
    smax = 0.0
    for p in _sets():
        for T in (0.05, 0.5, 2.0):
            F, _ = system_free_energy(p, T)
            S = oracles.system_entropy_quadrature(p, T)
            wI = max(wI, abs(drude_energy(p, T) - F - T * S))
        smax = max(smax, system_free_energy(p, 1e-3)[1])
    return [
        _at_most("E_s - F_s - T S_s (S_s from spectral quadrature)", wI, 1e-8),
        _at_most("S_s(T=1e-3)", smax, 1e-4),
    ]


_QUICK: list[Callable[[], list[Check]]] = [
    _check_digamma,
    _check_aux,
    lambda: _check_sum_rules(1000),
    _check_backends,
    _check_one_quadrature,
]
_FULL: list[Callable[[], list[Check]]] = [
    _check_figure1,
    _check_k0_limit,
    _check_quadrature_grid,
    _check_zero_T,
    _check_discrete,
    _check_classical,
    _check_ohmic,
    _check_identity,
    lambda: _check_sum_rules(10_000),
]


def run_checks(level: str = "quick") -> list[Check]:
    """Run the ``quick`` or ``full`` suite and return every outcome."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    groups = _QUICK + (_FULL if level == "full" else [])
    out = []
    for fn in groups:
        t0 = time.perf_counter()
        try:
            out.extend(fn())
        except Exception as exc:  # a crash is a failed check, not a crashed run
            out.append(Check(getattr(fn, "__name__", "check"), math.nan, 0.0, False, f"{type(exc).__name__}: {exc}"))
        log.info("%s took %.2f s", getattr(fn, "__name__", "check"), time.perf_counter() - t0)
    return out


def format_report(checks: list[Check]) -> str:
    n_fail = sum(not c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed (backend: {BACKEND})")
    return "\n".join(lines) + "\n"
