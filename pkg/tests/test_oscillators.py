"""Oscillator kernels, mode-coefficient algebra, zero-mode brackets."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qcurrents import (ParameterContext, CommutatorTable, gid, LogForm,
                       ModeCoefficient, StructureError, verify_cartan_inverse)
from qcurrents.oscillators import (mc_bracket, mc_inv_bracket, mc_n,
                                   zero_mode_exchange)


@pytest.fixture(scope="module")
def table3():
    return CommutatorTable(ParameterContext(N=3, k=1, r=3, lam=(1, 1), T=6))


def _base_gids(ctx):
    out = [gid("a", i) for i in range(1, ctx.N)]
    for fam in ("b", "c"):
        for i in range(1, ctx.N):
            for j in range(i + 1, ctx.N + 1):
                out.append(gid(fam, i, j))
    return out


def test_all_base_kernels_antisymmetric(table3):
    gens = _base_gids(table3.ctx)
    for g1 in gens:
        for g2 in gens:
            assert table3.check_antisymmetry(g1, g2), (g1, g2)


def test_aa_kernel_value(table3):
    got = table3.kernel(gid("a", 1), gid("a", 2))
    want = mc_bracket(table3.ctx.kh) * mc_bracket(-1) * mc_n(-1)
    assert (got - want).is_zero()
    assert table3.kernel(gid("a", 1), gid("b", 1, 2)).is_strictly_zero()


def test_bb_and_cc_kernels_are_opposite(table3):
    b = table3.kernel(gid("b", 1, 3), gid("b", 1, 3))
    c = table3.kernel(gid("c", 1, 3), gid("c", 1, 3))
    assert (b + c).is_zero()
    assert table3.kernel(gid("b", 1, 2), gid("b", 1, 3)).is_strictly_zero()


def test_mode_coefficient_eval_matches_bracket(table3):
    # [L] * [1]^-1 evaluated at n agrees with the q-integer structure
    from qcurrents import qint, qpow
    mc = mc_bracket(3) * mc_inv_bracket(1)
    for n in (1, 2, 5):
        got = mc.eval_at(n)
        want = (qpow(3 * n) - qpow(-3 * n)) / (qpow(n) - qpow(-n))
        assert got == want
    assert qint(3) == mc.eval_at(1)


@given(st.integers(min_value=-3, max_value=3),
       st.integers(min_value=-3, max_value=3))
def test_mode_coefficient_linearity(x, y):
    a = mc_bracket(2).scale(x) + mc_bracket(2).scale(y)
    b = mc_bracket(2).scale(x + y)
    assert (a - b).is_zero()


def test_reflect_is_an_involution(table3):
    K = table3.kernel(gid("a", 1), gid("a", 1))
    assert (K.reflect().reflect() - K).is_zero()


def test_zbracket_sign_conventions(table3):
    pa, qa = gid("pa", 1), gid("qa", 2)
    assert table3.zbracket(pa, qa) == Fraction(-1 * table3.ctx.kh)
    assert table3.zbracket(qa, pa) == -table3.zbracket(pa, qa)
    pb, qb = gid("pb", 1, 2), gid("qb", 1, 2)
    assert table3.zbracket(pb, qb) == Fraction(-1)
    pc, qc = gid("pc", 1, 2), gid("qc", 1, 2)
    assert table3.zbracket(pc, qc) == Fraction(1)
    assert table3.zbracket(pb, qc) == 0


def test_zero_mode_exchange_yields_monomial(table3):
    w1 = {gid("qa", 1): LogForm(cv={"z": Fraction(1)})}
    w2 = {gid("pa", 1): LogForm(cv={"w": Fraction(1)})}
    with pytest.raises(StructureError):
        zero_mode_exchange(w1, w2, table3)  # log x log has no monomial form
    w2 = {gid("pa", 1): LogForm(c0=Fraction(1, 2))}
    cq, cv = zero_mode_exchange(w1, w2, table3)
    assert cq == 0
    br = -Fraction(table3.ctx.cartan(1, 1) * table3.ctx.kh)  # [qa, pa]
    assert cv == {"z": br / 2}


def test_derived_generator_rejects_unknown(table3):
    with pytest.raises(StructureError):
        table3.derived_generator("bogus", [(gid("b", 5, 9),
                                            ModeCoefficient.const(1))])


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_cartan_inverse_identity(N):
    """The bracket-weighted inverse Cartan sum is exactly delta_ij in y."""
    for i in range(1, N):
        for j in range(1, N):
            ok, residual = verify_cartan_inverse(N, i, j)
            assert ok, (N, i, j, residual)
