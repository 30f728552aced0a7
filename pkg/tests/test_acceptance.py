"""Acceptance criteria 1-10, one test each.

Every test records a single PASS/FAIL line with the measured quantities;
the lines are printed in the ``acceptance criteria`` section at the end of
the pytest run.
"""
import math
import time

import numpy as np
import pytest

import _reference as ref
from qbt import oracles
from qbt.damping import DrudeParams, drude_param_inverse
from qbt.discrete_bath import (
    check_interlacing,
    coupling_energy,
    coupling_free_energy,
    energy_exact,
    energy_oracle,
    normal_modes,
    random_bath,
    second_law_gap,
)
from qbt.response import drude_poles, partial_fractions
from qbt.specfun import aux_laplace, digamma
from qbt.thermo import (
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
from qbt.thermo.free import classical_free_energy

from conftest import FIG1

GRID_T = (0.05, 0.2, 1.0, 5.0, 20.0)


def _sets():
    return [DrudeParams(*s) for s in FIG1]


def _record(log, n, checks):
    """``checks`` is a list of ``(label, ok)``; the criterion passes iff all do."""
    ok = all(c for _, c in checks)
    log[n] = (ok, "; ".join(f"{label} [{'ok' if c else 'FAIL'}]" for label, c in checks))
    return ok


def test_criterion_01_figure1(acceptance_log):
    t0 = time.perf_counter()
    Ts = np.logspace(-2, math.log10(50.0), 200)
    K = np.array([[second_law_gap_drude(p, T) for T in Ts] for p in _sets()])
    k01 = [second_law_gap_drude(p, 0.1) for p in _sets()]
    elapsed = time.perf_counter() - t0
    checks = [
        (f"min K = {K.min():.3e} >= -1e-8", K.min() >= -1e-8),
        ("order at T=0.1 " + " < ".join(f"{k:.5f}" for k in k01), all(a < b for a, b in zip(k01, k01[1:]))),
        (f"max K(50) = {K[:, -1].max():.3e} < 0.01", K[:, -1].max() < 0.01),
        (f"runtime {elapsed:.1f} s < 60 s", elapsed < 60),
    ]
    assert _record(acceptance_log, 1, checks)


def test_criterion_02_zero_T_limit(acceptance_log):
    target = 1.5 / (2 * math.pi)
    devs = [abs(second_law_gap_drude(DrudeParams(1.0, W, 1.5), 0.0) - target) / target for W in (50.0, 100.0, 200.0)]
    checks = [
        ("deviations " + ", ".join(f"{d:.4f}" for d in devs) + " shrink", devs[0] > devs[1] > devs[2]),
        (f"deviation at Omega=200 {devs[-1]:.4f} < 0.05", devs[-1] < 0.05),
    ]
    assert _record(acceptance_log, 2, checks)


def test_criterion_03_energy_oracle(acceptance_log):
    err = max(
        abs(drude_energy(p, T) - oracles.energy_quadrature(p, T)) / abs(oracles.energy_quadrature(p, T))
        for p in _sets()
        for T in GRID_T
    )
    assert _record(acceptance_log, 3, [(f"max rel err {err:.2e} < 1e-6", err < 1e-6)])


def test_criterion_04_free_energy_oracle(acceptance_log):
    err = 0.0
    for p in _sets():
        for T in GRID_T:
            q = oracles.coupling_free_energy_quadrature(p, T)
            err = max(err, abs(drude_coupling_free_energy(p, T) - q) / abs(q))
    assert _record(acceptance_log, 4, [(f"max rel err {err:.2e} < 1e-6", err < 1e-6)])


def test_criterion_05_zero_T(acceptance_log):
    dE = max(abs(drude_energy(p, 1e-4) - drude_energy_zero_T(p)) for p in _sets())
    dF = max(abs(drude_coupling_free_energy(p, 1e-4) - drude_coupling_free_energy_zero_T(p)) for p in _sets())
    checks = [(f"|dE| {dE:.2e} < 1e-3", dE < 1e-3), (f"|dF| {dF:.2e} < 1e-3", dF < 1e-3)]
    assert _record(acceptance_log, 5, checks)


def test_criterion_06_discrete_bath(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    inter = True
    eE, kmin, zero_gap, pos_gap = 0.0, math.inf, 0.0, math.inf
    for _ in range(100):
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
    elapsed = time.perf_counter() - t0
    checks = [
        ("interlacing on 100 baths", inter),
        (f"E_s rel err {eE:.2e} < 1e-9", eE < 1e-9),
        (f"min K {kmin:.2e} >= -1e-9", kmin >= -1e-9),
        (f"|E_cal - F_cal| at T=0 {zero_gap:.1e} <= 1e-12", zero_gap <= 1e-12),
        (f"min E_cal - F_cal at T>0 {pos_gap:.2e} > 1e-12", pos_gap > 1e-12),
        (f"runtime {elapsed:.1f} s < 30 s", elapsed < 30),
    ]
    assert _record(acceptance_log, 6, checks)


def test_criterion_07_classical(acceptance_log):
    wE = wF = wK = 0.0
    for p in _sets():
        T = 1e3 * p.w0
        beta = 1.0 / T
        wE = max(wE, abs(beta * drude_energy(p, T) - 1.0))
        wF = max(wF, abs(drude_coupling_free_energy(p, T) - classical_free_energy(p.omega_0, T)) * beta)
        for Tc in (0.01, 1.0, T):
            wK = max(wK, abs(evaluate_point(p, Tc, options=EvalOptions(classical=True)).K))
    checks = [
        (f"|beta E - 1| {wE:.2e} < 1e-2", wE < 1e-2),
        (f"beta |F - f_cl| {wF:.2e} < 1e-2", wF < 1e-2),
        (f"classical K max |K| = {wK:g}", wK == 0.0),
    ]
    assert _record(acceptance_log, 7, checks)


def test_criterion_08_ohmic(acceptance_log):
    g, T = 1.5, 0.5
    Ns = np.array([1e3, 1e4, 1e5, 1e6])
    v = [ohmic_velocity_variance(1.0, g, T, cutoff_terms=int(n)).value for n in Ns]
    slope = np.polyfit(np.log(Ns), v, 1)[0]
    dslope = abs(slope - g / math.pi) / (g / math.pi)
    ddelta = 0.0
    for Tk in (0.1, 0.5, 2.0):
        p = drude_param_inverse(1.0, 1e5, g)
        dd = drude_coupling_free_energy(p, Tk) - drude_coupling_free_energy_zero_T(p)
        ddelta = max(ddelta, abs(dd - ohmic_coupling_free_energy_delta(1.0, g, Tk)))
    f_drude = drude_coupling_free_energy_zero_T(drude_param_inverse(1.0, 1e5, g))
    cut = [1e2, 1e3, 1e4, 1e5]
    f_ohm = [ohmic_coupling_free_energy_zero_T(1.0, g, c).value for c in cut]
    steps = np.diff(f_ohm) / math.log(10.0)
    grow = float(np.max(np.abs(steps - g / (2 * math.pi)))) / (g / (2 * math.pi))
    checks = [
        (f"velocity log-slope rel dev {dslope:.2e} < 0.02", dslope < 0.02),
        (f"Drude vs Ohmic thermal part {ddelta:.2e} < 1e-4", ddelta < 1e-4),
        (f"Drude F(0) finite ({f_drude:.4f})", math.isfinite(f_drude)),
        (f"Ohmic F(0) grows by hbar gamma/2pi per e-fold (rel dev {grow:.1e})", grow < 0.02 and all(s > 0 for s in steps)),
    ]
    assert _record(acceptance_log, 8, checks)


def test_criterion_09_special_functions(acceptance_log):
    rng = np.random.default_rng(2024)
    z = rng.uniform(-30, 50, 10_000) + 1j * rng.uniform(-50, 50, 10_000)
    series = oracles.digamma_series(z)
    e_psi = max(abs(digamma(complex(a)) - b) / max(1.0, abs(b)) for a, b in zip(z, series))
    pts = [0.05, 0.3, 2.0, 15.0, 80.0, 0.5 + 0.5j, 2.0 - 3.0j, 0.2 + 1.0j, 10.0 + 10.0j]
    e_aux = max(abs(complex(aux_laplace(a)) - ref.aux_laplace_quad(a)) / abs(ref.aux_laplace_quad(a)) for a in pts)
    w0 = 10.0 ** rng.uniform(-1, 1, 10_000)
    W = 10.0 ** rng.uniform(-1, 2, 10_000)
    g = 10.0 ** rng.uniform(-1, 1.5, 10_000)
    e_sum = 0.0
    for t in zip(w0, W, g):
        c = partial_fractions(drude_poles(DrudeParams(*t)))
        s0, s2 = c.sum_rules()
        n0 = sum(abs(x) for x in c.lambdas)
        n2 = sum(abs(x * r * r) for x, r in zip(c.lambdas, c.rates))
        e_sum = max(e_sum, abs(s0) / n0, abs(s2) / n2)
    checks = [
        (f"digamma vs series {e_psi:.1e} < 1e-12", e_psi < 1e-12),
        (f"aux vs quadrature {e_aux:.1e} < 1e-10", e_aux < 1e-10),
        (f"sum rules {e_sum:.1e} < 1e-10", e_sum < 1e-10),
    ]
    assert _record(acceptance_log, 9, checks)


def test_criterion_10_identity(acceptance_log):
    wI = 0.0
    smax = 0.0
    for p in _sets():
        for T in (0.05, 0.5, 2.0):
            F, S = system_free_energy(p, T)
            S_q = oracles.system_entropy_quadrature(p, T)
            E = drude_energy(p, T)
            wI = max(wI, abs(E - F - T * S_q), abs(E - F - T * S))
        smax = max(smax, system_free_energy(p, 1e-3)[1])
    checks = [
        (f"|E - F - T S| {wI:.1e} < 1e-8", wI < 1e-8),
        (f"max S_s(T=1e-3) {smax:.2e} < 1e-4", smax < 1e-4),
    ]
    assert _record(acceptance_log, 10, checks)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
