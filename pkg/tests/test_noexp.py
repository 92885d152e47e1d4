"""Normal-ordered operator calculus: Wick products, exchange ratios,
delta extraction, Serre sums, and p -> 0 limits."""

from fractions import Fraction

import pytest

from qcurrents import QProductForm, StructureError, scalar, qpow
from qcurrents.noexp import (wick_pair, exchange_ratio, commutator_delta,
                             collapse_delta_terms, serre_check, p_limit,
                             qpf_equal_robust, qpf_unit_verdict,
                             qpf_shift_var, DeltaTerm)

QPF = QProductForm


def _same_expression(A, B, ctx):
    if len(A.terms) != len(B.terms):
        return False
    for ta, tb in zip(A.terms, B.terms):
        if not ta.same_kernel(tb):
            return False
        ok, _ = qpf_equal_robust(ta.pref, tb.pref, ctx)
        if not ok:
            return False
    return True


def test_wick_requires_disjoint_variables(cat2):
    A = cat2.psi(1, +1, "z").terms[0]
    with pytest.raises(StructureError):
        wick_pair(A, A, cat2.table)


def test_cartan_exchange_ratio(cat2):
    """Same-sign pairs commute on the nose; mixed signs pick up a
    well-defined rational ratio."""
    ctx = cat2.ctx
    for s in (+1, -1):
        R = exchange_ratio(cat2.psi(1, s, "z"), cat2.psi(1, s, "w"),
                           cat2.table, ctx)
        assert R is not None
        ok, how = qpf_unit_verdict(R, ctx)
        assert ok, (s, how)
    R = exchange_ratio(cat2.psi(1, +1, "z"), cat2.psi(1, -1, "w"),
                       cat2.table, ctx)
    assert R is not None
    ok, _ = qpf_unit_verdict(R, ctx)
    assert not ok


def test_ladder_commutator_delta_shifts(cat2):
    """[e, f] is supported on z = q^{+-k} w only."""
    ctx = cat2.ctx
    terms = collapse_delta_terms(
        commutator_delta(cat2.e_plus(1, "z"), cat2.e_minus(1, "w"),
                         cat2.table, ctx), ctx)
    assert {dt.shift for dt in terms} == {Fraction(ctx.k), Fraction(-ctx.k)}


def test_collapse_cancels_opposite_residues(cat2):
    ctx = cat2.ctx
    terms = commutator_delta(cat2.e_plus(1, "z"), cat2.e_minus(1, "w"),
                             cat2.table, ctx)
    doubled = terms + [DeltaTerm(dt.shift, dt.payload.scaled(scalar(-1)))
                       for dt in terms]
    assert collapse_delta_terms(doubled, ctx) == []


def test_serre_sum_vanishes_for_adjacent_raising(cat3):
    ctx = cat3.ctx
    ok, wit = serre_check(cat3.e_plus(1, "z"), cat3.e_plus(2, "w"),
                          cat3.table, ctx, W=4)
    assert ok, wit


def test_serre_sum_rejects_mixed_ladders(cat3):
    # e against f has delta-supported commutators; the cubic sum cannot close
    ctx = cat3.ctx
    try:
        ok, _ = serre_check(cat3.e_plus(1, "z"), cat3.e_minus(2, "w"),
                            cat3.table, ctx, W=3)
    except StructureError:
        ok = False
    assert not ok


def test_p_limit_validates_branch(cat2):
    with pytest.raises(ValueError):
        p_limit(cat2.e_ell(1, "z"), "bogus")


def test_p_limit_principal_recovers_undressed(cat2):
    got = p_limit(cat2.e_ell(1, "z"), "principal")
    assert _same_expression(got, cat2.e_plus(1, "z"), cat2.ctx)


def test_p_limit_commutes_with_exchange(cat2):
    """Exchange ratios of the degenerated currents match the undressed
    ratios directly."""
    ctx = cat2.ctx
    A = p_limit(cat2.Psi(1, +1, "z"), "principal")
    B = p_limit(cat2.Psi(1, -1, "w"), "principal")
    R_lim = exchange_ratio(A, B, cat2.table, ctx)
    R_trig = exchange_ratio(cat2.psi(1, +1, "z"), cat2.psi(1, -1, "w"),
                            cat2.table, ctx)
    assert R_lim is not None and R_trig is not None
    ok, how = qpf_equal_robust(R_lim, R_trig, ctx)
    assert ok, how


def test_shift_var_scales_monomials(cat2):
    ctx = cat2.ctx
    f = qpf_shift_var(QPF.monomial("z", 2), "z", Fraction(1))
    g = QPF.monomial("z", 2).scale(qpow(2))
    ok, _ = qpf_equal_robust(f, g, ctx)
    assert ok


def test_equal_robust_detects_difference(cat2):
    ok, how = qpf_equal_robust(QPF.unit(), QPF.monomial("z", 1), cat2.ctx)
    assert not ok
