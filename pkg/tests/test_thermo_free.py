import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbt.damping import PhysicalConstants
from qbt.errors import DomainError
from qbt.thermo import (
    classical_energy,
    classical_free_energy,
    free_osc_energy,
    free_osc_entropy,
    free_osc_free_energy,
)


def test_zero_temperature():
    c = PhysicalConstants(hbar=2.0)
    assert free_osc_energy(1.5, 0.0, c) == 1.5
    assert free_osc_free_energy(1.5, 0.0, c) == 1.5
    assert free_osc_entropy(1.5, 0.0, c) == 0.0


def test_energy_at_beta_hbar_omega_two():
    w = 1.7
    T = w / 2.0
    assert free_osc_energy(w, T) == pytest.approx(0.5 * w / math.tanh(1.0), rel=1e-15)


def test_high_temperature():
    T = 1e5
    assert free_osc_energy(1.0, T) * (1 / T) == pytest.approx(1.0, rel=1e-9)
    assert free_osc_free_energy(1.0, T) == pytest.approx(classical_free_energy(1.0, T), rel=1e-9)
    assert classical_energy(T) == T


def test_identity_at_x_one():
    w, T = 1.0, 1.0
    e, f, s = free_osc_energy(w, T), free_osc_free_energy(w, T), free_osc_entropy(w, T)
    assert e - f == pytest.approx(T * s, rel=1e-15)
    assert s > 0


def test_saturated_regime_finite():
    # beta hbar omega between 700 and 745 used to overflow expm1
    for x in (690.0, 710.0, 744.0, 800.0, 1e6):
        assert free_osc_energy(x, 1.0) == pytest.approx(0.5 * x)
        assert free_osc_free_energy(x, 1.0) == pytest.approx(0.5 * x)


@settings(max_examples=200, deadline=None)
@given(w=st.floats(1e-3, 1e3), T=st.floats(1e-3, 1e3))
def test_f_below_e_and_monotone(w, T):
    assert free_osc_free_energy(w, T) <= free_osc_energy(w, T)
    assert free_osc_energy(w, T) <= free_osc_energy(w, T * 1.01) * (1 + 1e-15)
    e, f, s = free_osc_energy(w, T), free_osc_free_energy(w, T), free_osc_entropy(w, T)
    assert e - f == pytest.approx(T * s, rel=1e-9, abs=1e-12 * max(e, T))


@pytest.mark.parametrize(
    "fn,args",
    [
        (free_osc_energy, (0.0, 1.0)),
        (free_osc_free_energy, (-1.0, 1.0)),
        (free_osc_entropy, (1.0, -1.0)),
        (classical_free_energy, (1.0, 0.0)),
        (classical_energy, (-1.0,)),
    ],
)
def test_domain(fn, args):
    with pytest.raises(DomainError):
        fn(*args)
