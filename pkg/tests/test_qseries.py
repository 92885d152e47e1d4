"""q-product forms, truncated series, theta products, Jackson sums."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from qcurrents import (ParameterContext, QProductForm, TruncSeries,
                       ZeroFactorError, scalar, qpow, theta_prod, theta_ratio,
                       q_difference, jackson_integral, rational_reconstruct)
from qcurrents.noexp import qpf_equal_robust

QPF = QProductForm
F = Fraction


@pytest.fixture(scope="module")
def ctx():
    return ParameterContext(N=2, k=1, r=3, lam=(1,), T=10)


def test_linear_expansion_is_two_terms():
    s = QPF.linear("z", "w", 2).expand(("z", "w"), 6)
    assert s.coefficient(0).is_one()
    assert s.coefficient(1) == -qpow(2)
    assert s.coefficient(2).is_zero()


def test_inverse_linear_is_geometric():
    s = QPF.linear("u", "v", 1).inverse().expand(("u", "v"), 8)
    for n in range(8):
        assert s.coefficient(n) == qpow(n)


def test_expand_rejects_wrong_orientation():
    with pytest.raises(ValueError):
        QPF.pochhammer("z", "w", 1, (3,)).expand(("w", "z"), 4)


def test_pochhammer_telescopes_against_linear():
    """(q^a x; t) = (1 - q^a x)(t q^a x; t), as series to high order."""
    t = 3  # base half: t means q^6
    for a in (-2, 0, 1):
        lhs = QPF.pochhammer("z", "w", a, (t,))
        rhs = QPF.linear("z", "w", a) * QPF.pochhammer("z", "w", a + 2 * t,
                                                       (t,))
        assert lhs.expand(("z", "w"), 12) == rhs.expand(("z", "w"), 12)


def test_canonicalize_reorients_linear_factor():
    # (1 - q^a w/z) = -q^a (w/z) (1 - q^-a z/w)
    f = QPF.linear("w", "z", 2)
    g = (QPF.linear("z", "w", -2) * QPF.monomial("w", 1)
         * QPF.monomial("z", -1)).scale(-qpow(2))
    assert repr(f.canonicalize()) == repr(g.canonicalize())


def test_zero_factor_is_detected():
    """Substituting onto a double pole must refuse rather than divide."""
    f = QPF.linear("z", "w", 2).inverse()
    with pytest.raises(ZeroFactorError):
        f.substitute_pole("z", "w", 2)


def test_theta_ratio_trivial_when_shifts_agree(ctx):
    r = theta_ratio(ctx, ctx.r, F(1, 2), F(1, 2))
    ok, _ = qpf_equal_robust(r, QPF.unit(), ctx)
    assert ok


def test_theta_quasi_periodicity(ctx):
    for nu in (ctx.r, ctx.r_star):
        lhs = theta_prod(ctx, nu, F(nu) + 1, ("z", "w"))
        rhs = theta_prod(ctx, nu, F(1), ("z", "w")).scale(scalar(-1))
        ok, how = qpf_equal_robust(lhs, rhs, ctx)
        assert ok, (nu, how)


def test_q_difference_kills_constants_only():
    s = TruncSeries("x", {0: scalar(5), 2: qpow(1)}, 6)
    d = q_difference(s, 3)
    assert d.coefficient(-1).is_zero()
    assert d.coefficient(1) == qpow(1) * (qpow(6) - qpow(-6)) \
        / (qpow(1) - qpow(-1))


def test_jackson_integral_annihilates_total_difference():
    """The p-lattice sum telescopes to the (vanishing) boundary values."""
    n = 2
    with mpmath.workdps(40):
        q0 = mpmath.mpf("0.31")
        dq = q0 - 1 / q0

        def g(w):
            return w / ((1 + w) * (2 + w ** 2))

        def f(w):
            return (g(q0 ** n * w) - g(q0 ** (-n) * w)) / (dq * w)

        J = jackson_integral(f, mpmath.mpf("0.7"), n, q0, dps=35)
        assert abs(J) < mpmath.mpf("1e-30")


def test_jackson_integral_flags_divergence():
    with pytest.raises(ArithmeticError):
        jackson_integral(lambda w: 1 / w, mpmath.mpf("1.0"), 1,
                         mpmath.mpf("0.31"), dps=20, L=40)


def test_rational_reconstruct_round_trip():
    # series of q x /(1 - q^2 x): geometric with offset 1
    coeffs = {F(m): qpow(2 * m - 1) for m in range(1, 10)}
    s = TruncSeries("x", coeffs, 10)
    out = rational_reconstruct(s, 1)
    assert out is not None
    off, P, Q = out
    assert off == 1
    assert P == {0: qpow(1)}
    assert Q[1] == -qpow(2)


def test_rational_reconstruct_needs_enough_window():
    s = TruncSeries("x", {0: scalar(1), 1: scalar(1)}, 2)
    assert rational_reconstruct(s, 3) is None


@settings(max_examples=20)
@given(st.integers(min_value=-4, max_value=4),
       st.integers(min_value=-4, max_value=4))
def test_monomial_group_law(a, b):
    f = QPF.monomial("z", a) * QPF.monomial("z", b)
    g = QPF.monomial("z", a + b)
    assert repr(f.canonicalize()) == repr(g.canonicalize())


def test_evaluate_exact_fractional_exponents():
    """Exponents like 1/3 must not lose precision to binary floats."""
    with mpmath.workdps(45):
        q0 = mpmath.mpf("0.31")
        f = QPF.monomial("z", F(1, 3))
        got = f.evaluate({"z": mpmath.mpf("0.83")}, q0, 40)
        want = mpmath.power(mpmath.mpf("0.83"), mpmath.mpf(1) / 3)
        assert abs(got - want) < mpmath.mpf("1e-38")
