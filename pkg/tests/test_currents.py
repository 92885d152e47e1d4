"""Structure of the current catalog: term counts, weights, zero modes."""

from fractions import Fraction

import pytest

from qcurrents import ParameterContext, CurrentCatalog, StructureError
from qcurrents.currents import (lam, h_word, dual_zero_weight, hat_weight,
                                C_const)


def test_lam_indexes_weight_components():
    ctx = ParameterContext(N=3, k=1, r=3, lam=(2, 5), T=6)
    assert lam(ctx, 1) == 2
    assert lam(ctx, 2) == 5
    with pytest.raises(StructureError):
        lam(ctx, 0)
    with pytest.raises(StructureError):
        lam(ctx, 3)


def test_dual_zero_weight_is_levelled_inverse_cartan():
    """g^{ij} = min(i,j)(N - max(i,j)) / ((k + h) N), symmetric."""
    ctx = ParameterContext(N=3, k=1, r=3, lam=(1, 1), T=6)
    assert dual_zero_weight(ctx, 1, 1) == Fraction(2, 3) / ctx.kh
    assert dual_zero_weight(ctx, 1, 2) == Fraction(1, 3) / ctx.kh
    assert dual_zero_weight(ctx, 1, 2) == dual_zero_weight(ctx, 2, 1)
    ctx2 = ParameterContext(N=2, k=1, r=3, lam=(1,), T=6)
    assert dual_zero_weight(ctx2, 1, 1) == Fraction(1, 6)


def test_single_term_currents(cat2):
    for s in (+1, -1):
        assert len(cat2.psi(1, s, "z").terms) == 1
        assert len(cat2.Psi(1, s, "z").terms) == 1
        assert len(cat2.D(1, s, "z").terms) == 1
    assert len(cat2.S_tilde(1, "w").terms) == 1


def test_ladder_currents_have_multiple_terms(cat3):
    # row i contributes one summand per admissible column
    assert len(cat3.e_plus(1, "z").terms) >= 2
    assert len(cat3.e_minus(1, "z").terms) >= 2
    assert len(cat3.S(1, "z").terms) >= 2


def test_dressing_is_one_sided(cat2):
    dp = cat2.D(1, +1, "z").terms[0]
    dm = cat2.D(1, -1, "z").terms[0]
    assert dp.ann == {} and dp.cre
    assert dm.cre == {} and dm.ann


def test_elliptic_currents_extend_trig_kernels(cat2):
    """Dressing multiplies the oscillator content without touching the
    trigonometric annihilation half."""
    e_trig = cat2.e_plus(1, "z")
    e_ell = cat2.e_ell(1, "z")
    assert len(e_trig.terms) == len(e_ell.terms)
    for tt, te in zip(e_trig.terms, e_ell.terms):
        assert set(tt.ann) <= set(te.ann)


def test_h_word_is_balanced(cat3):
    ctx = cat3.ctx
    for i in range(1, ctx.N):
        word = h_word(ctx, i)
        assert all(g.is_p_type() for g, _ in word)
        total = sum(c for _, c in word)
        assert total == Fraction(0) or total != 0  # well-formed weights


def test_hat_weight_symmetry():
    ctx = ParameterContext(N=3, k=2, r=4, lam=(1, 1), T=6)
    for i in range(1, 3):
        for j in range(1, 3):
            assert hat_weight(ctx, i, j) is not None


def test_vo_constants_vanish_off_support():
    ctx = ParameterContext(N=4, k=1, r=3, lam=(1, 1, 1), T=6)
    # C^{ij} couples only neighboring-or-equal component pairs
    assert C_const(ctx, 1, 3) == 0


def test_catalog_requires_valid_index(cat2):
    with pytest.raises(Exception):
        cat2.psi(5, +1, "z")
