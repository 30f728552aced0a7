import json
import math

import numpy as np
import pytest

from qbt.damping import PhysicalConstants
from qbt.discrete_bath import (
    DiscreteBath,
    Oscillator,
    bath_from_dict,
    bath_to_dict,
    check_interlacing,
    coupling_energy,
    coupling_free_energy,
    coupling_free_energy_partition,
    energy,
    energy_exact,
    energy_oracle,
    load_bath,
    normal_modes,
    random_bath,
    save_bath,
    second_law_gap,
    secular_residual,
    stiffness_matrix,
)
from qbt.errors import ConfigError, DegenerateModes, DomainError, NotPositiveDefinite
from qbt.thermo import free_osc_energy, free_osc_free_energy

SEEDS = range(100)
TEMPS = (0.0, 0.1, 1.0, 10.0)


def _rand(seed):
    return random_bath(1 + seed % 6, seed)


def _decoupled():
    return DiscreteBath(1.0, 1.3, (Oscillator(1.0, 2.0, 0.0), Oscillator(0.5, 0.4, 0.0)))


# construction and normal modes ------------------------------------------------------


def test_oscillators_sorted():
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 3.0, 0.1), Oscillator(1.0, 0.5, 0.1)))
    assert list(b.omegas) == [0.5, 3.0]


@pytest.mark.parametrize(
    "kw", [dict(m=0.0, omega=1.0, c=0.1), dict(m=1.0, omega=-1.0, c=0.1), dict(m=1.0, omega=1.0, c=math.nan)]
)
def test_oscillator_validation(kw):
    with pytest.raises(DomainError):
        Oscillator(**kw)


def test_bath_validation():
    with pytest.raises(DomainError):
        DiscreteBath(1.0, 1.0, ())
    with pytest.raises(DomainError):
        DiscreteBath(0.0, 1.0, (Oscillator(1.0, 1.0, 0.0),))


def test_decoupled_modes():
    b = _decoupled()
    assert normal_modes(b).omega_bar == (0.4, 1.3, 2.0)
    assert b.decoupled


def test_two_by_two():
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 1.0, 0.5),))
    ref = np.sqrt(np.linalg.eigvalsh(np.array([[1.25, -0.5], [-0.5, 1.0]])))
    assert normal_modes(b).omega_bar == pytest.approx(ref, rel=1e-15)
    # 1.125 -+ sqrt(0.015625 + 0.25)
    lo, hi = 1.125 - math.sqrt(0.265625), 1.125 + math.sqrt(0.265625)
    assert normal_modes(b).omega_bar == pytest.approx([math.sqrt(lo), math.sqrt(hi)], rel=1e-15)


def test_stiffness_counter_term():
    b = DiscreteBath(2.0, 1.0, (Oscillator(0.5, 2.0, 0.3),))
    D = stiffness_matrix(b)
    assert D[0, 0] == pytest.approx(1.0 + 0.09 / (2.0 * 0.5 * 4.0))
    assert D[0, 1] == D[1, 0] == pytest.approx(-0.3)


def test_not_positive_definite():
    # a coupling without enough counter-term is impossible here; flip a sign in D via a huge mass ratio
    b = DiscreteBath(1.0, 1e-9, (Oscillator(1.0, 1e-9, 1e-300),))
    normal_modes(b)  # still positive
    # directly exercise the guard
    import qbt.discrete_bath as db

    orig = db.stiffness_matrix
    try:
        db.stiffness_matrix = lambda bath: np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NotPositiveDefinite):
            db.normal_modes(b)
        with pytest.raises(NotPositiveDefinite):
            db.energy_oracle(b, 1.0)
    finally:
        db.stiffness_matrix = orig


@pytest.mark.parametrize("seed", SEEDS)
def test_interlacing(seed):
    b = _rand(seed)
    m = normal_modes(b)
    assert check_interlacing(b, m)
    assert len(m.omega_bar) == b.N + 1
    assert all(w > 0 for w in m.omega_bar)
    assert sum(m.system_weights) == pytest.approx(1.0, rel=1e-13)


def test_interlacing_strict():
    b = random_bath(6, 3)
    wb, ws = normal_modes(b).omega_bar, b.omegas
    assert all(wb[j] < ws[j] < wb[j + 1] for j in range(b.N))


def test_interlacing_detects_violation():
    b = random_bath(3, 1)
    m = normal_modes(b)
    from qbt.discrete_bath import NormalModes

    bad = NormalModes(tuple(sorted(m.omega_bar[:-1] + (0.5 * b.omegas[-1],))), m.system_weights)
    assert not check_interlacing(b, bad)


@pytest.mark.parametrize("seed", range(50))
def test_secular_residual_backward_error(seed):
    # the absolute residual is steep near bath poles; bound it by the forward error it implies
    b = random_bath(6, seed)
    eps = np.finfo(float).eps
    for w in normal_modes(b).omega_bar:
        u = w * w
        slope = 1.0 + sum(o.c**2 / (b.M * o.m) / (o.omega**2 - u) ** 2 for o in b.oscillators)
        assert secular_residual(b, w) <= max(1e-8, 16 * eps * u * slope)


def test_secular_residual_off_root():
    b = random_bath(4, 0)
    assert secular_residual(b, 0.5 * (normal_modes(b).omega_bar[0] + b.omegas[0])) > 1e-3


# energy ------------------------------------------------------------------------------


@pytest.mark.parametrize("T", TEMPS)
def test_decoupled_thermo(T):
    b = _decoupled()
    e0, f0 = free_osc_energy(1.3, T), free_osc_free_energy(1.3, T)
    assert energy_exact(b, T) == pytest.approx(e0, rel=1e-14)
    assert energy_oracle(b, T) == pytest.approx(e0, rel=1e-14)
    assert coupling_free_energy(b, T) == pytest.approx(f0, rel=1e-14)
    assert coupling_energy(b, T) == pytest.approx(e0, rel=1e-14)
    assert abs(second_law_gap(b, T)) < 1e-14


@pytest.mark.parametrize("seed", SEEDS)
def test_energy_exact_vs_oracle(seed):
    b = _rand(seed)
    m = normal_modes(b)
    for T in TEMPS:
        assert energy_exact(b, T, modes=m) == pytest.approx(energy_oracle(b, T), rel=1e-9)


def test_energy_two_mode_by_hand():
    # M = m = 1, w0 = w1 = 1, c: modes 1 +- something, symmetric split of the system weight
    c = 0.5
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 1.0, c),))
    D = stiffness_matrix(b)
    u, U = np.linalg.eigh(D)
    w = np.sqrt(u)
    T = 0.7
    coth = 1 / np.tanh(w / (2 * T))
    q2 = np.sum(U[0] ** 2 / (2 * w) * coth)
    p2 = np.sum(U[0] ** 2 * w / 2 * coth)
    assert energy_exact(b, T) == pytest.approx(0.5 * p2 + 0.5 * q2, rel=1e-13)


def test_energy_high_T():
    b = random_bath(3, 5)
    T = 10.0
    assert energy_exact(b, T) == pytest.approx(T, rel=1e-2)


def test_energy_constants():
    b = random_bath(3, 2, M=2.0)
    c = PhysicalConstants(hbar=0.5, k_B=2.0)
    assert energy_exact(b, 0.3, c) == pytest.approx(energy_oracle(b, 0.3, c), rel=1e-10)


def test_degenerate_fallback():
    # two decoupled oscillators at the same frequency give a repeated normal mode
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 2.0, 0.0), Oscillator(1.0, 2.0, 0.0), Oscillator(1.0, 0.5, 0.3)))
    with pytest.raises(DegenerateModes):
        energy_exact(b, 0.5)
    res = energy(b, 0.5)
    assert res.used_oracle
    assert res.value == pytest.approx(energy_oracle(b, 0.5))
    assert not energy(random_bath(3, 1), 0.5).used_oracle
    assert second_law_gap(b, 0.5) >= -1e-9


def test_temperature_domain():
    b = random_bath(2, 0)
    for fn in (energy_exact, energy_oracle, coupling_free_energy, coupling_energy):
        with pytest.raises(DomainError):
            fn(b, -1.0)
    with pytest.raises(DomainError):
        coupling_free_energy_partition(b, 0.0)


# coupling free energy and the gap -------------------------------------------------------------


@pytest.mark.parametrize("seed", range(20))
def test_zero_T_free_energy(seed):
    b = _rand(seed)
    wb = normal_modes(b).omega_bar
    F0 = coupling_free_energy(b, 0.0)
    assert F0 == pytest.approx(0.5 * (sum(wb) - sum(b.omegas)), rel=1e-14)
    assert F0 >= energy_exact(b, 0.0) - 1e-12
    assert coupling_energy(b, 0.0) == pytest.approx(F0, rel=1e-14)


@pytest.mark.parametrize("seed", range(30))
def test_partition_route(seed):
    b = _rand(seed)
    for T in (0.05, 0.3, 1.0, 10.0):
        ref = coupling_free_energy(b, T)
        assert coupling_free_energy_partition(b, T) == pytest.approx(ref, rel=1e-12, abs=1e-12 * abs(free_osc_free_energy(b.omega_0, T)))


def test_partition_route_constants():
    b = random_bath(4, 8, M=3.0)
    c = PhysicalConstants(hbar=2.0, k_B=0.25)
    assert coupling_free_energy_partition(b, 0.7, c) == pytest.approx(coupling_free_energy(b, 0.7, c), rel=1e-12)


def test_high_T_free_energy():
    b = random_bath(3, 4)
    T = 1e3
    wb = normal_modes(b).omega_bar
    ref = T * (sum(math.log(w / T) for w in wb) - sum(math.log(w / T) for w in b.omegas))
    assert coupling_free_energy(b, T) == pytest.approx(ref, rel=1e-5)


@pytest.mark.parametrize("seed", SEEDS)
def test_coupling_energy_exceeds_free_energy(seed):
    b = _rand(seed)
    for T in (0.1, 1.0, 10.0):
        assert coupling_energy(b, T) - coupling_free_energy(b, T) > 1e-12


@pytest.mark.parametrize("seed", SEEDS)
def test_gap_nonnegative(seed):
    b = _rand(seed)
    for T in TEMPS:
        assert second_law_gap(b, T) >= -1e-9


@pytest.mark.parametrize("seed", range(20))
def test_gap_decays(seed):
    assert abs(second_law_gap(_rand(seed), 100.0)) < 1e-2


def test_gap_zero_T_is_positive():
    b = random_bath(4, 11)
    assert second_law_gap(b, 0.0) == pytest.approx(coupling_free_energy(b, 0.0) - energy_exact(b, 0.0), abs=1e-15)
    assert second_law_gap(b, 0.0) > 0


# generator and IO --------------------------------------------------------------------------------


def test_random_bath_reproducible():
    assert random_bath(5, 7) == random_bath(5, 7)
    assert random_bath(5, 7) != random_bath(5, 8)
    b = random_bath(6, np.random.default_rng(1))
    assert b.N == 6
    assert all(0.1 <= w <= 10 for w in b.omegas)
    counter = sum(o.c**2 / (2 * o.m * o.omega**2) for o in b.oscillators)
    assert counter <= b.M * b.omega_0**2
    with pytest.raises(DomainError):
        random_bath(0)


def test_json_round_trip(tmp_path):
    b = random_bath(4, 3)
    p = tmp_path / "bath.json"
    save_bath(b, p)
    assert load_bath(p) == b
    assert bath_from_dict(json.loads(p.read_text())) == b
    assert bath_to_dict(b)["oscillators"][0].keys() == {"m", "omega", "c"}


@pytest.mark.parametrize(
    "d,msg",
    [
        ([], "JSON object"),
        ({"omega_0": 1, "oscillators": [{"m": 1, "omega": 1, "c": 0}]}, "missing field 'M'"),
        ({"M": 1, "omega_0": 1, "oscillators": []}, "non-empty"),
        ({"M": 1, "omega_0": -1, "oscillators": [{"m": 1, "omega": 1, "c": 0}]}, "omega_0"),
        ({"M": 1, "omega_0": 1, "oscillators": [{"m": 1, "omega": "x", "c": 0}]}, r"oscillators\[0\]: field 'omega'"),
        ({"M": 1, "omega_0": 1, "oscillators": [5]}, "must be an object"),
    ],
)
def test_config_errors(d, msg):
    with pytest.raises(ConfigError, match=msg):
        bath_from_dict(d)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_bath(p)


def test_uncoupled_oscillators_keep_their_frequency():
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 2.0, 0.0), Oscillator(1.0, 0.5, 0.3)))
    wb = normal_modes(b).omega_bar
    assert 2.0 in wb
    assert wb == pytest.approx(np.sqrt(np.linalg.eigvalsh(stiffness_matrix(b))), rel=1e-14)
    assert second_law_gap(b, 0.5) >= 0


def test_identical_coupled_oscillators():
    # the antisymmetric combination decouples and sits exactly at omega_j
    b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 2.0, 0.3), Oscillator(1.0, 2.0, 0.3)))
    wb = normal_modes(b).omega_bar
    assert wb == pytest.approx(np.sqrt(np.linalg.eigvalsh(stiffness_matrix(b))), rel=1e-14)
    assert energy(b, 0.5).value == pytest.approx(energy_oracle(b, 0.5), rel=1e-9)
    assert second_law_gap(b, 0.5) >= -1e-9
