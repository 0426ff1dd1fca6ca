"""Tests for the special-function kernel.

Derived expectations are frozen from independent oracles that live in
this file (a Gauss limit-product for log Gamma, finite-difference Laurent
probes for the Stieltjes constants); the dual-evaluator checks compare
zeta_em and zeta_rs against each other, never against themselves.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zml import complexfn as cf
from zml.errors import BudgetExceeded, DomainError, PoleError

# ----------------------------------------------------------------------
# oracles
# ----------------------------------------------------------------------


def log_gamma_product_oracle(z: complex, n: int = 200_000) -> complex:
    """Gauss limit product log Gamma(z) = lim_m [z log m + sum_{k<=m} log k
    - sum_{k=0}^m log(z+k)], Richardson-extrapolated twice in 1/m."""

    def approx(m: int) -> complex:
        ks = np.arange(1, m + 1, dtype=np.float64)
        s_logk = math.fsum(np.log(ks))
        lg = np.log(z + np.arange(0, m + 1, dtype=np.float64))
        return z * math.log(m) + s_logk - complex(math.fsum(lg.real), math.fsum(lg.imag))

    a1, a2, a4 = approx(n), approx(2 * n), approx(4 * n)
    b1, b2 = 2 * a2 - a1, 2 * a4 - a2
    return (4 * b2 - b1) / 3


# Frozen from log_gamma_product_oracle(1+3j) (which reproduces them to
# ~1e-9; see test_product_oracle_self_consistency).
LOG_GAMMA_1_3I = complex(-3.244144299589756, 1.0533507710686132)
LOG_GAMMA_5_3I = complex(2.244246717020218, 4.714089538904929)


def test_product_oracle_self_consistency():
    assert abs(log_gamma_product_oracle(1 + 3j, 50_000) - LOG_GAMMA_1_3I) < 1e-8


# ----------------------------------------------------------------------
# log_gamma
# ----------------------------------------------------------------------


def test_log_gamma_at_one_is_zero():
    assert abs(cf.log_gamma(1.0)) < 1e-13


def test_log_gamma_at_half_is_half_log_pi():
    assert abs(cf.log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-13


def test_log_gamma_5_3i_by_recurrence_from_oracle():
    # log Gamma(5+3i) = log Gamma(1+3i) + sum log(k+3i), k = 1..4
    expected = LOG_GAMMA_1_3I + sum(cmath.log(k + 3j) for k in (1, 2, 3, 4))
    assert abs(expected - LOG_GAMMA_5_3I) < 1e-8
    assert abs(cf.log_gamma(5 + 3j) - expected) < 1e-8
    assert abs(cf.log_gamma(5 + 3j) - LOG_GAMMA_5_3I) < 5e-13


def test_log_gamma_exp_recovers_gamma():
    # Gamma(4) = 6, Gamma(5.5) = 52.34277778455352
    assert abs(cmath.exp(cf.log_gamma(4.0)) - 6.0) < 1e-12
    assert abs(cmath.exp(cf.log_gamma(5.5)) - 52.34277778455352) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=30.0),
    st.floats(min_value=-1e4, max_value=1e4),
)
def test_log_gamma_recurrence(re, im):
    s = complex(re, im)
    lhs = cf.log_gamma(s + 1)
    rhs = cf.log_gamma(s) + cmath.log(s)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@pytest.mark.parametrize("s", [0.0, -1.0, -7.0])
def test_log_gamma_pole(s):
    with pytest.raises(PoleError):
        cf.log_gamma(s)


def test_log_gamma_conjugation():
    s = 2.3 + 41.7j
    assert cf.log_gamma(s.conjugate()) == cf.log_gamma(s).conjugate()


# ----------------------------------------------------------------------
# stirling_remainder
# ----------------------------------------------------------------------


@pytest.mark.parametrize("sigma", [1.0, 2.0, 10.0])
def test_stirling_remainder_binet_bound(sigma):
    r = cf.stirling_remainder(sigma)
    assert abs(r.imag) < 1e-15
    assert abs(r) <= 1.0 / (8.0 * sigma)


def test_stirling_remainder_at_one():
    # log Gamma(1) - (-1 + log(2 pi)/2) = 1 - log(2 pi)/2
    expected = 1.0 - 0.5 * math.log(2 * math.pi)
    assert abs(cf.stirling_remainder(1.0) - expected) < 1e-14
    assert abs(expected - 0.0810614667953273) < 1e-15


def test_stirling_remainder_vanishes_monotonically():
    sigmas = [2.0**k for k in range(11)]  # 1 .. 1024
    vals = [abs(cf.stirling_remainder(s)) for s in sigmas]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_stirling_remainder_matches_identity_route():
    for s in (3.7 + 2.2j, 0.5 + 40.0j, 12.0 - 300.0j):
        main = (s - 0.5) * cmath.log(s) - s + 0.5 * math.log(2 * math.pi)
        ident = cf.log_gamma(s) - main
        assert abs(cf.stirling_remainder(s) - ident) < 1e-13


def test_stirling_remainder_domain_error():
    with pytest.raises(DomainError):
        cf.stirling_remainder(-0.5 + 0.5j)


# ----------------------------------------------------------------------
# digamma
# ----------------------------------------------------------------------


def test_digamma_known_values():
    g = cf.EULER_GAMMA
    assert abs(cf.digamma(1.0) + g) < 1e-14
    assert abs(cf.digamma(2.0) - (1.0 - g)) < 1e-14
    assert abs(cf.digamma(0.5) + g + 2 * math.log(2)) < 1e-14


@settings(max_examples=60, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=30.0),
    st.floats(min_value=-1e4, max_value=1e4),
)
def test_digamma_recurrence(re, im):
    s = complex(re, im)
    assert abs(cf.digamma(s + 1) - cf.digamma(s) - 1.0 / s) <= 1e-12 * max(
        1.0, abs(cf.digamma(s))
    )


def test_digamma_pole():
    with pytest.raises(PoleError):
        cf.digamma(-2.0)


def test_trigamma_known_value():
    # psi'(1) = pi^2 / 6
    assert abs(cf.trigamma(1.0) - math.pi**2 / 6) < 1e-13


# ----------------------------------------------------------------------
# chi
# ----------------------------------------------------------------------


def test_chi_at_half_is_one():
    assert abs(cf.chi(0.5) - 1.0) < 1e-12


def test_chi_at_zero_is_zero():
    assert cf.chi(0.0) == 0.0


def test_chi_critical_line_modulus():
    assert abs(abs(cf.chi(0.5 + 100j)) - 1.0) < 1e-10


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-2.0, max_value=3.0),
    st.floats(min_value=-1e5, max_value=1e5),
)
def test_chi_reflection_identity(re, im):
    s = complex(re, im)
    # dodge poles of chi(s) and chi(1-s): odd integers of s and 1-s
    if abs(im) < 0.1 and (abs(re - round(re)) < 0.05 or abs(re) > 2.5):
        return
    assert abs(cf.chi(s) * cf.chi(1 - s) - 1.0) <= 1e-10


def test_chi_even_integer_values():
    assert abs(cf.chi(2.0) + 2 * math.pi**2) < 1e-11
    assert cf.chi(-2.0) == 0.0


def test_chi_overflow():
    with pytest.raises(OverflowError):
        cf.chi(complex(-300.0, 1e4))


def test_chi_functional_equation_against_zeta():
    for s in (0.3 + 25.0j, 0.7 + 400.5j):
        lhs = cf.zeta_em(1 - s)
        rhs = cf.chi(1 - s) * cf.zeta_em(s)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


# ----------------------------------------------------------------------
# zeta_em
# ----------------------------------------------------------------------


def test_zeta_em_known_values():
    assert abs(cf.zeta_em(2.0) - math.pi**2 / 6) < 1e-12
    assert abs(cf.zeta_em(0.0) + 0.5) < 1e-13
    assert abs(cf.zeta_em(-1.0) + 1.0 / 12.0) < 1e-13


def test_zeta_em_pole():
    with pytest.raises(PoleError):
        cf.zeta_em(1.0)


def test_zeta_em_budget():
    tight = cf.EvalPolicy(max_terms=16)
    with pytest.raises(BudgetExceeded):
        cf.zeta_em(0.5 + 1e4j, tight)


def test_zeta_em_vs_rs_at_1000i():
    s = 0.5 + 1000j
    assert abs(cf.zeta_em(s) - cf.zeta_rs(s)) < 1e-6


def test_zeta_em_conjugation_exact():
    s = 0.3 + 777.3j
    assert cf.zeta_em(s.conjugate()) == cf.zeta_em(s).conjugate()


# ----------------------------------------------------------------------
# zeta_rs
# ----------------------------------------------------------------------


def test_zeta_rs_vs_em_at_100i():
    s = 0.5 + 100j
    assert abs(cf.zeta_rs(s) - cf.zeta_em(s)) < 1e-8


def test_zeta_rs_first_zero():
    assert abs(cf.zeta_rs(0.5 + 14.134725j)) < 1e-4


def test_zeta_rs_off_line_vs_em():
    s = 0.75 + 5000j
    assert abs(cf.zeta_rs(s) - cf.zeta_em(s, cf.EvalPolicy(max_terms=50_000))) < 1e-6


@pytest.mark.parametrize("s", [1.2 + 100j, -0.1 + 50j, 0.5 + 5j, 0.5 + 2e7j])
def test_zeta_rs_domain_errors(s):
    with pytest.raises(DomainError):
        cf.zeta_rs(s)


def test_zeta_rs_conjugation_exact():
    s = 0.41 + 5321.77j
    assert cf.zeta_rs(s.conjugate()) == cf.zeta_rs(s).conjugate()


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=0.9),
    st.floats(min_value=10.0, max_value=1e5),
    st.booleans(),
)
def test_dual_evaluator_agreement(re, im, flip):
    s = complex(re, -im if flip else im)
    assert abs(cf.zeta_em(s) - cf.zeta_rs(s)) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=0.9),
    st.floats(min_value=10.0, max_value=1e4),
)
def test_functional_equation_relative(re, im):
    s = complex(re, im)
    lhs = cf.zeta_em(1 - s)
    rhs = cf.chi(1 - s) * cf.zeta_em(s)
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


# ----------------------------------------------------------------------
# constants and policy
# ----------------------------------------------------------------------


def test_euler_gamma_value():
    assert cf.euler_gamma() == 0.5772156649015328606


def test_euler_gamma_is_minus_digamma_one():
    assert abs(cf.euler_gamma() + cf.digamma(1.0)) < 1e-14


def test_euler_gamma_laurent_probe():
    s = 1.0 + 1e-6
    c_eff = s - 1.0  # exactly representable increment
    assert abs(cf.zeta_em(s) - 1.0 / c_eff - cf.euler_gamma()) < 1e-5


def test_stieltjes_constants_against_laurent_probe():
    # gamma_1 and gamma_2 from central differences of
    # f(c) = zeta(1+c) - 1/c - gamma = -g1 c + (g2/2) c^2 - ...
    # h is dyadic so 1 +/- h is exact; it cannot be too small because the
    # zeta_em tail target (1e-12) is divided by h^2 in the g2 probe.
    h = 1.0 / 128.0

    def f(c: float) -> float:
        return (cf.zeta_em(1.0 + c) - 1.0 / c - cf.EULER_GAMMA).real

    g1 = -(f(h) - f(-h)) / (2 * h)
    g1_fine = -(f(h / 2) - f(-h / 2)) / h
    g1_extrap = (4 * g1_fine - g1) / 3
    assert abs(g1_extrap - cf.STIELTJES_1) < 1e-8
    g2 = (f(h) + f(-h)) / (h * h)
    g2_fine = (f(h / 2) + f(-h / 2)) / (h * h / 4)
    g2_extrap = (4 * g2_fine - g2) / 3
    assert abs(g2_extrap - cf.STIELTJES_2) < 1e-6


def test_bernoulli_table():
    assert cf.bernoulli(0) == 1.0
    assert cf.bernoulli(1) == -0.5
    assert cf.bernoulli(2) == pytest.approx(1.0 / 6.0, abs=0)
    assert cf.bernoulli(12) == pytest.approx(-691.0 / 2730.0, rel=1e-15)
    assert cf.bernoulli(3) == 0.0


def test_policy_invariants():
    with pytest.raises(DomainError):
        cf.EvalPolicy(target_abs_error=0.0)
    with pytest.raises(DomainError):
        cf.EvalPolicy(max_terms=8)


def test_auto_policy_dispatch():
    s = 0.5 + 200j
    assert cf.zeta(s) == cf.zeta_rs(s)
    assert cf.zeta(2.5 + 3j) == cf.zeta_em(2.5 + 3j)


def test_selftest_green_and_fault_injection():
    results = cf.selftest()
    assert len(results) >= 10
    assert all(c.passed for c in results)
    perturbed = cf.selftest(gamma_value=0.58)
    failing = [c for c in perturbed if not c.passed]
    assert failing and any("gamma" in c.name for c in failing)
