import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from qbt.errors import ConfigError, DomainError, PoleArgument, SeriesNotConverged
from qbt.specfun import (
    EULER_GAMMA,
    SeriesControl,
    aux_laplace,
    ci,
    digamma,
    digamma_asymptotic,
    hurwitz_zeta,
    matsubara_coth,
    matsubara_delta_sum,
    si_lower,
    trigamma,
)


# digamma --------------------------------------------------------------------


def test_digamma_at_one_is_minus_euler():
    assert digamma(1.0) == pytest.approx(-0.5772156649, abs=1e-10)
    assert abs(digamma(1.0) + EULER_GAMMA) < 1e-15


def test_digamma_recurrence_example():
    assert abs(digamma(3.7) - digamma(2.7) - 1 / 2.7) < 1e-14


def test_digamma_real_input_returns_float():
    assert isinstance(digamma(2.0), float)
    assert isinstance(digamma(2.0 + 0j), complex)


def test_digamma_frozen(frozen):
    for (x, y), (re, im) in frozen["digamma"]:
        got = complex(digamma(complex(x, y)))
        ref = complex(re, im)
        assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref)), (x, y)


def test_digamma_series_oracle_at_spec_point():
    # defining series summed to 1e7 terms with an Euler-Maclaurin tail
    z = 0.5 + 3.2j
    n = np.arange(1, 10**7 + 1, dtype=float)
    head = np.sum(1.0 / n - 1.0 / (n - 1.0 + z))
    N = 1e7
    tail = np.log((N + z) / (N + 1.0)) - 0.5 * (1 / (N + z) - 1 / (N + 1.0))
    ref = -EULER_GAMMA + head + tail
    assert abs(digamma(z) - ref) < 1e-11


@pytest.mark.parametrize("z", [0.0, -1.0, -7.0, complex(-3.0, 1e-14)])
def test_digamma_poles(z):
    with pytest.raises(PoleArgument):
        digamma(z)


def test_digamma_nonfinite():
    with pytest.raises(DomainError):
        digamma(float("nan"))


def test_digamma_matches_scipy_on_real_axis():
    x = np.concatenate([np.linspace(1e-3, 5, 400), np.logspace(0, 6, 200), -np.linspace(0.05, 9.95, 100)])
    x = x[np.abs(x - np.round(x)) > 1e-3]
    got = np.array([digamma(float(v)) for v in x])
    ref = special.psi(x)
    assert np.max(np.abs(got - ref) / np.maximum(1, np.abs(ref))) < 1e-13


@settings(max_examples=300, deadline=None)
@given(
    r=st.floats(0.1, 100.0),
    th=st.floats(-math.pi, math.pi),
)
def test_digamma_recurrence_property(r, th):
    z = complex(r * math.cos(th), r * math.sin(th))
    if z.real < 0.5 and abs(z.imag) < 0.1:  # too close to the poles
        return
    lhs = digamma(z + 1) - digamma(z)
    assert abs(lhs - 1 / z) < 1e-12 * max(1.0, abs(digamma(z)))


def test_trigamma_is_derivative():
    for z in (0.3 + 0.2j, 4.0 - 2.0j, 25.0 + 1.0j):
        h = 1e-5
        fd = (digamma(z + h) - digamma(z - h)) / (2 * h)
        assert abs(trigamma(z) - fd) < 1e-8 * abs(fd)
    assert trigamma(1.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)


# asymptotic -----------------------------------------------------------------


def test_digamma_asymptotic_y100():
    assert abs(digamma_asymptotic(100.0, 3) - digamma(100.0)) / digamma(100.0) < 1e-12


def test_digamma_asymptotic_first_bernoulli_term():
    y = 7.3
    assert digamma_asymptotic(y, 1) == pytest.approx(math.log(y) - 1 / (2 * y) - 1 / (12 * y * y), rel=1e-15)


@pytest.mark.parametrize("y", [10.0, 30.0, 1e3, 1e5])
def test_digamma_asymptotic_five_terms(y):
    assert abs(digamma_asymptotic(y, 5) - digamma(y)) / abs(digamma(y)) < 1e-10


def test_digamma_asymptotic_leading_term():
    assert abs(digamma_asymptotic(1e8, 0) - math.log(1e8)) < 1e-8


@pytest.mark.parametrize("args", [(0.0, 3), (-1.0, 3), (5.0, 11), (5.0, -1)])
def test_digamma_asymptotic_domain(args):
    with pytest.raises(DomainError):
        digamma_asymptotic(*args)


# ci / si --------------------------------------------------------------------


def test_cisi_frozen(frozen):
    for x, c, s in frozen["cisi"]:
        assert abs(ci(x) - c) < 1e-12
        assert abs(si_lower(x) - s) < 1e-12


def test_si_lower_vanishes_at_infinity():
    assert abs(si_lower(1e6)) < 2e-6
    assert si_lower(3.0) + math.pi / 2 == pytest.approx(special.sici(3.0)[0], abs=1e-14)


def test_ci_small_argument():
    x = 1e-8
    assert abs(ci(x) - math.log(x) - EULER_GAMMA) < 1e-15


@pytest.mark.parametrize("fn", [ci, si_lower])
@pytest.mark.parametrize("x", [0.0, -1.0])
def test_cisi_domain(fn, x):
    with pytest.raises(DomainError):
        fn(x)


# aux Laplace integral ---------------------------------------------------------


def test_aux_small_a_limit():
    assert aux_laplace(1e-12) == pytest.approx(math.pi / 2, abs=1e-10)


def test_aux_large_a_limit():
    a = 1e4
    assert aux_laplace(a) * a == pytest.approx(1.0, abs=3e-8)


@pytest.mark.parametrize("a", [0.1, 1.0, 10.0, 100.0])
def test_aux_real_matches_cisi_form(a):
    lhs = aux_laplace(a)
    rhs = math.sin(a) * ci(a) - math.cos(a) * si_lower(a)
    assert abs(lhs - rhs) < 1e-10


def test_aux_at_two_cross_check():
    x = 2.0
    from _reference import aux_laplace_quad

    assert abs(math.sin(x) * ci(x) - math.cos(x) * si_lower(x) - aux_laplace_quad(x).real) < 1e-12


def test_aux_frozen(frozen):
    for a, (re, im) in frozen["aux"]:
        arg = complex(*a) if isinstance(a, list) else a
        ref = complex(re, im)
        assert abs(complex(aux_laplace(arg)) - ref) < 1e-10 * abs(ref), a


@settings(max_examples=60, deadline=None)
@given(re=st.floats(1e-3, 200.0), im=st.floats(-200.0, 200.0))
def test_aux_conjugate_symmetry(re, im):
    a = complex(re, im)
    assert abs(aux_laplace(a.conjugate()) - aux_laplace(a).conjugate()) <= 1e-14 * abs(aux_laplace(a))


@pytest.mark.parametrize("a", [0.0, -1.0, complex(0.0, 2.0), complex(-1.0, 1.0)])
def test_aux_domain(a):
    with pytest.raises(DomainError):
        aux_laplace(a)


# Matsubara coth ---------------------------------------------------------------


def test_matsubara_coth_converges():
    assert abs(matsubara_coth(1.0, 2.0, 10**5) - 1 / math.tanh(1.0)) < 1e-4
    assert 1 / math.tanh(1.0) == pytest.approx(1.313035, abs=1e-6)


def test_matsubara_coth_low_temperature():
    # beta hbar omega large: coth -> 1 and the partial sum approaches it from below
    val = matsubara_coth(1.0, 200.0, 10**6)
    assert 0.99 < val <= 1.0 + 1e-12


def test_matsubara_coth_classical_leading_term():
    x = 1e-4
    assert matsubara_coth(1.0, x, 10) == pytest.approx(2 / x, rel=1e-8)


def test_matsubara_coth_monotone_and_bounded():
    w, bh = 1.3, 0.8
    full = 1 / math.tanh(0.5 * bh * w)
    vals = [matsubara_coth(w, bh, n) for n in (0, 1, 2, 5, 10, 100, 1000, 10**4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < full


@pytest.mark.parametrize("args", [(0.0, 1.0, 10), (1.0, 0.0, 10), (1.0, 1.0, -1)])
def test_matsubara_coth_domain(args):
    with pytest.raises(DomainError):
        matsubara_coth(*args)


# Hurwitz zeta and the thermal series -------------------------------------------


@pytest.mark.parametrize("s,q", [(2.0, 1.0), (4.0, 0.3), (6.0, 17.5), (12.0, 2.0)])
def test_hurwitz_zeta_matches_scipy(s, q):
    assert hurwitz_zeta(s, q) == pytest.approx(special.zeta(s, q), rel=1e-14)


def test_hurwitz_zeta_domain():
    with pytest.raises(DomainError):
        hurwitz_zeta(1.0, 1.0)
    with pytest.raises(DomainError):
        hurwitz_zeta(2.0, 0.0)


def test_delta_sum_single_rate_closed_form():
    # sum_n aux(n b)/n for real b: compare with direct summation plus integral tail
    bh, r = 1.0, 0.7
    val, _ = matsubara_delta_sum(bh, [r], [1.0])
    n = np.arange(1, 200001)
    direct = sum(aux_laplace(float(k * bh * r)) / k for k in n[:2000])
    # beyond n = 2000, aux(x) = 1/x - 2/x^3 + ..., summed with Hurwitz zeta
    b = bh * r
    tail = hurwitz_zeta(2.0, 2001.0) / b - 2.0 * hurwitz_zeta(4.0, 2001.0) / b**3
    assert abs(val.real - (direct + tail)) < 1e-11


def test_delta_sum_max_terms():
    with pytest.raises(SeriesNotConverged):
        matsubara_delta_sum(1e-3, [1.0, 2.0], [1.0, -1.0], SeriesControl(max_terms=10))


@pytest.mark.parametrize(
    "kw", [{"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_terms": 0}, {"quad_tol": 0.0}]
)
def test_series_control_validation(kw):
    with pytest.raises(ConfigError):
        SeriesControl(**kw)
