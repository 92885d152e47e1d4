"""Constructors for every named current and vertex operator.

All operators are assembled as normal-ordered exponentials directly from
their displayed free-field expressions: half-currents contribute one-sided
mode coefficients, full generating fields contribute both sides plus zero
modes, and multi-term currents become OperatorExpressions with one term per
exponential.  Nothing here is simplified; correctness is established by the
relation suites in the verify module, not by construction.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Optional

from .noexp import NormalOrderedOperator, OperatorExpression
from .oscillators import (CommutatorTable, GeneratorId, LogForm,
                          ModeCoefficient, StructureError, gid, mc_bracket,
                          mc_inv_bracket, mc_n)
from .qseries import QProductForm
from .scalars import E, ParameterContext, qpow, scalar

_F0 = Fraction(0)
_F1 = Fraction(1)


def lam(ctx: ParameterContext, m: int) -> int:
    """Weight component λ^m, m = 1..N-1."""
    if not (1 <= m <= ctx.N - 1):
        raise StructureError(f"weight component index {m} out of range")
    return ctx.lam[m - 1]


# ---------------------------------------------------------------------------
# exponent assembly

class _ExpBuilder:
    """Accumulates the exponent of one normal-ordered exponential."""

    def __init__(self, var: str):
        self.var = var
        self.cre: dict = {}
        self.ann: dict = {}
        self.zmode: dict = {}

    def add_cre(self, g: GeneratorId, mc: ModeCoefficient):
        key = (self.var, g)
        self.cre[key] = self.cre[key] + mc if key in self.cre else mc

    def add_ann(self, g: GeneratorId, mc: ModeCoefficient):
        key = (self.var, g)
        self.ann[key] = self.ann[key] + mc if key in self.ann else mc

    def add_z(self, g: GeneratorId, lf: LogForm):
        self.zmode[g] = self.zmode[g] + lf if g in self.zmode else lf

    # -- field atoms ----------------------------------------------------------

    def half_plus(self, g: GeneratorId, s, c: int = 1):
        """c * X_+^g(q^s z): annihilation half-current."""
        self.add_ann(g, _DQMC.scale(c).qshift(-Fraction(s)))
        self.add_z(_p_of(g), LogForm(cq=c))

    def half_minus(self, g: GeneratorId, s, c: int = 1):
        """c * X_-^g(q^s z): creation half-current."""
        self.add_cre(g, _DQMC.scale(-c).qshift(Fraction(s)))
        self.add_z(_p_of(g), LogForm(cq=-c))

    def full(self, g: GeneratorId, s, c: int = 1):
        """c * X^g(q^s z): two-sided field with its zero modes."""
        s = Fraction(s)
        inv = mc_inv_bracket(1)
        self.add_cre(g, inv.scale(c).qshift(s))
        self.add_ann(g, inv.scale(-c).qshift(-s))
        self.add_z(_q_of(g), LogForm(c0=c))
        self.add_z(_p_of(g), LogForm(cq=c * s, cv={self.var: Fraction(c)}))

    def full_bc(self, i: int, j: int, s, c: int = 1):
        """c * (b+c)^{ij}(q^s z); absent when i = j."""
        if i == j:
            return
        self.full(gid("b", i, j), s, c)
        self.full(gid("c", i, j), s, c)

    def done(self, pref: Optional[QProductForm] = None) -> NormalOrderedOperator:
        return NormalOrderedOperator(pref or QProductForm.unit(), (self.var,),
                                     self.cre, self.ann, self.zmode)


_DQMC = ModeCoefficient.mono(qpow(1) - qpow(-1), 0)  # (q - q^{-1}) * q^{0n}


def _p_of(g: GeneratorId) -> GeneratorId:
    return gid("p" + g.family, g.i, g.j)


def _q_of(g: GeneratorId) -> GeneratorId:
    return gid("q" + g.family, g.i, g.j)


# ---------------------------------------------------------------------------
# shared mode combinations

def cartan_combo(ctx: ParameterContext, i: int) -> list:
    """The (generator, shift, sign) pattern shared by the Cartan-type
    currents: b-ladders around a^i with k/2-graded arguments."""
    out = []
    for j in range(1, i + 1):
        out.append((gid("b", j, i + 1), -Fraction(2 * j - 2 + ctx.k, 2), 1))
        if j < i:
            out.append((gid("b", j, i), -Fraction(2 * j + ctx.k, 2), -1))
    out.append((gid("a", i), -Fraction(ctx.h_vee, 2), 1))
    for j in range(i + 1, ctx.N + 1):
        out.append((gid("b", i, j), -Fraction(2 * j + ctx.k, 2), 1))
        if j > i + 1:
            out.append((gid("b", i + 1, j), -Fraction(2 * j - 2 + ctx.k, 2), -1))
    return out


def register_H(table: CommutatorTable, i: int) -> str:
    """The composite Cartan boson H^i as a derived generator; its
    coefficients depend on |n| so both branches coincide."""
    name = f"H^{i}"
    if name not in table.derived:
        combo = [(g, ModeCoefficient.const(sgn).qshift(s))
                 for g, s, sgn in cartan_combo(table.ctx, i)]
        table.derived_generator(name, combo)
    return name


def dual_a_combo(ctx: ParameterContext, i: int) -> list:
    """Dual boson to a^i: inverts the a-kernel through the Cartan matrix."""
    out = []
    for j in range(1, ctx.N):
        mc = _dual_weight_mc(ctx, i, j, mc_inv_bracket(ctx.kh))
        if not mc.is_strictly_zero():
            out.append((gid("a", j), mc))
    return out


def register_dual_a(table: CommutatorTable, i: int) -> str:
    name = f"a-dual^{i}"
    if name not in table.derived:
        ann = dual_a_combo(table.ctx, i)
        cre = [(g, -mc) for g, mc in ann]  # odd function of n
        table.derived_generator(name, ann, cre)
    return name


def register_dual_H(table: CommutatorTable, i: int) -> str:
    """Dual to the composite Cartan boson; divides by [kn] instead of
    [(k+h)n] and expands into base oscillators through H^j."""
    ctx = table.ctx
    name = f"H-dual^{i}"
    if name not in table.derived:
        ann: dict = {}
        for j in range(1, ctx.N):
            w = _dual_weight_mc(ctx, i, j, mc_inv_bracket(ctx.k))
            if w.is_strictly_zero():
                continue
            for g, s, sgn in cartan_combo(ctx, j):
                mc = w.scale(sgn).qshift(s)
                ann[g] = ann[g] + mc if g in ann else mc
        table.derived_generator(name, list(ann.items()))
    return name


def _dual_weight_mc(ctx, i, j, level_inv: ModeCoefficient) -> ModeCoefficient:
    """n [min(i,j) n][(N-max(i,j)) n] / ([Nn][n]^2) times a level inverse."""
    lo, hi = min(i, j), max(i, j)
    if lo == 0 or hi == ctx.N:
        return ModeCoefficient.zero()
    return (mc_n(1) * mc_bracket(lo) * mc_bracket(ctx.N - hi) * level_inv
            * mc_inv_bracket(ctx.N) * mc_inv_bracket(1) * mc_inv_bracket(1))


def dual_zero_weight(ctx: ParameterContext, i: int, j: int) -> Fraction:
    """min(i,j)(N-max(i,j)) / ((k+h)N): the zero-mode dual pairing g^{ij}."""
    lo, hi = min(i, j), max(i, j)
    if lo <= 0 or hi >= ctx.N:
        return _F0
    return Fraction(lo * (ctx.N - hi), ctx.kh * ctx.N)


def hat_weight(ctx: ParameterContext, i: int, j: int) -> Fraction:
    """min(i,j)(N-max(i,j)) / N used by the checked hat zero modes."""
    lo, hi = min(i, j), max(i, j)
    if lo <= 0 or hi >= ctx.N:
        return _F0
    return Fraction(lo * (ctx.N - hi), ctx.N)


def h_word(ctx: ParameterContext, i: int, c=1) -> list:
    """The weight zero mode h_i as a list of (p-generator, coefficient)."""
    c = Fraction(c)
    out = []
    for l in range(1, i + 1):
        out.append((gid("pb", l, i + 1), c))
        if l < i:
            out.append((gid("pb", l, i), -c))
    out.append((gid("pa", i), c))
    for l in range(i + 1, ctx.N + 1):
        out.append((gid("pb", i, l), c))
        if l > i + 1:
            out.append((gid("pb", i + 1, l), -c))
    return out


# ---------------------------------------------------------------------------
# the catalog

class CurrentCatalog:
    """All currents and vertex operators at one ParameterContext.

    Every accessor returns a fresh OperatorExpression in the requested
    variable; the commutator table is shared so derived-generator
    registrations persist across calls.
    """

    def __init__(self, ctx: ParameterContext):
        if len(ctx.lam) != ctx.N - 1:
            raise StructureError(
                f"weight must have {ctx.N - 1} components, got {len(ctx.lam)}")
        self.ctx = ctx
        self.table = CommutatorTable(ctx)

    def _check_i(self, i: int):
        if not (1 <= i <= self.ctx.N - 1):
            raise StructureError(f"current index {i} out of range")

    # -- Wakimoto currents ----------------------------------------------------

    def psi(self, i: int, sign: int, var: str = "z") -> OperatorExpression:
        """The Cartan currents as half-current exponentials."""
        self._check_i(i)
        b = _ExpBuilder(var)
        half = b.half_plus if sign > 0 else b.half_minus
        sg = 1 if sign > 0 else -1
        for g, s, c in cartan_combo(self.ctx, i):
            # the combo stores |n|-graded exponents; the field arguments
            # are the sign-reflected shifts
            half(g, -sg * s, c)
        return OperatorExpression.single(b.done())

    def e_plus(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        scale = QProductForm.monomial(var, -1, scalar(-1) / _dq())
        terms = []
        for j in range(1, i + 1):
            for pick in (0, 1):
                b = _ExpBuilder(var)
                b.full_bc(j, i, j - 1)
                if pick == 0:
                    b.half_plus(gid("b", j, i + 1), j - 1)
                    b.full_bc(j, i + 1, j, -1)
                else:
                    b.half_minus(gid("b", j, i + 1), j - 1)
                    b.full_bc(j, i + 1, j - 2, -1)
                for l in range(1, j):
                    b.half_plus(gid("b", l, i + 1), l - 1)
                    b.half_plus(gid("b", l, i), l, -1)
                sgn = scalar(1) if pick == 0 else scalar(-1)
                terms.append(b.done(scale.scale(sgn)))
        return OperatorExpression(terms)

    def e_minus(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        ctx = self.ctx
        k, N, kh = ctx.k, ctx.N, ctx.kh
        scale = QProductForm.monomial(var, -1, scalar(-1) / _dq())
        terms = []

        def tail_minus(b, start):
            b.half_minus(gid("a", i), -Fraction(kh, 2))
            for l in range(max(start, i + 1), N + 1):
                b.half_minus(gid("b", i, l), -(k + l))
                if l > i + 1:
                    b.half_minus(gid("b", i + 1, l), -(k + l - 1), -1)

        def tail_plus(b, start):
            b.half_plus(gid("a", i), Fraction(kh, 2))
            for l in range(max(start, i + 1), N + 1):
                b.half_plus(gid("b", i, l), k + l)
                if l > i + 1:
                    b.half_plus(gid("b", i + 1, l), k + l - 1, -1)

        for j in range(1, i):
            for pick in (0, 1):
                b = _ExpBuilder(var)
                b.full_bc(j, i + 1, -(k + j))
                if pick == 0:
                    b.half_minus(gid("b", j, i), -(k + j), -1)
                    b.full_bc(j, i, -(k + j - 1), -1)
                else:
                    b.half_plus(gid("b", j, i), -(k + j), -1)
                    b.full_bc(j, i, -(k + j + 1), -1)
                for l in range(j + 1, i + 1):
                    b.half_minus(gid("b", l, i + 1), -(k + l - 1))
                    if l < i:
                        b.half_minus(gid("b", l, i), -(k + l), -1)
                tail_minus(b, i + 1)
                sgn = scalar(1) if pick == 0 else scalar(-1)
                terms.append(b.done(scale.scale(sgn)))
        b = _ExpBuilder(var)
        b.full_bc(i, i + 1, -(k + i))
        tail_minus(b, i + 1)
        terms.append(b.done(scale))
        b = _ExpBuilder(var)
        b.full_bc(i, i + 1, k + i)
        tail_plus(b, i + 1)
        terms.append(b.done(scale.scale(scalar(-1))))
        for j in range(i + 2, N + 1):
            for pick in (0, 1):
                b = _ExpBuilder(var)
                b.full_bc(i, j, k + j - 1)
                if pick == 0:
                    b.half_plus(gid("b", i + 1, j), k + j - 1)
                    b.full_bc(i + 1, j, k + j, -1)
                else:
                    b.half_minus(gid("b", i + 1, j), k + j - 1)
                    b.full_bc(i + 1, j, k + j - 2, -1)
                tail_plus(b, j)
                sgn = scalar(-1) if pick == 0 else scalar(1)
                terms.append(b.done(scale.scale(sgn)))
        return OperatorExpression(terms)

    # -- twisting and elliptic currents ---------------------------------------

    def D(self, i: int, sign: int, var: str = "z") -> OperatorExpression:
        """One-sided twisting exponentials; creation-only for sign > 0."""
        self._check_i(i)
        ctx = self.ctx
        b = _ExpBuilder(var)
        for g, s, c in cartan_combo(ctx, i):
            shift = ctx.e(s - Fraction(ctx.k, 2), 1, 0)  # extra q^{(r-k/2)n}
            if sign > 0:
                b.add_cre(g, mc_inv_bracket(ctx.ers()).scale(c).qshift(shift))
            else:
                b.add_ann(g, mc_inv_bracket(ctx.er()).scale(-c).qshift(shift))
        return OperatorExpression.single(b.done())

    def Psi(self, i: int, sign: int, var: str = "z") -> OperatorExpression:
        """Elliptic Cartan current: D_+ psi D_- with k/2-staggered arguments."""
        self._check_i(i)
        hk = Fraction(self.ctx.k, 2)
        dp = self.D(i, +1, var).shift_var(var, hk if sign > 0 else -hk).terms[0]
        dm = self.D(i, -1, var).shift_var(var, -hk if sign > 0 else hk).terms[0]
        mid = self.psi(i, sign, var).terms[0]
        return OperatorExpression.single(dp.merge_free(mid).merge_free(dm))

    def e_ell(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        dp = self.D(i, +1, var).terms[0]
        return self.e_plus(i, var).map(lambda t: dp.merge_free(t))

    def f_ell(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        dm = self.D(i, -1, var).terms[0]
        return self.e_minus(i, var).map(lambda t: t.merge_free(dm))

    # -- total currents -------------------------------------------------------

    def _dress(self, t: NormalOrderedOperator, var: str, i: int, qhat: bool,
               h_cq: Fraction, z_ph: Fraction, z_h: Fraction,
               const: Fraction, arg_shift: Fraction) -> NormalOrderedOperator:
        """Append the zero-mode dressing word e^{2qhat} q^{c h} (q^s z)^{...};
        the appended q-type factor commutes with every p-type factor already
        present, so the merge is exchange-free."""
        ctx = self.ctx
        zm = dict(t.zmode)

        def put(g, lf):
            zm[g] = zm[g] + lf if g in zm else lf

        if qhat:
            put(gid("qh", i), LogForm(c0=2))
        if h_cq:
            for g, c in h_word(ctx, i, h_cq):
                put(g, LogForm(cq=c))
        if z_ph:
            put(gid("ph", i), LogForm(cq=arg_shift * z_ph, cv={var: z_ph}))
        if z_h:
            for g, c in h_word(ctx, i, z_h):
                put(g, LogForm(cq=arg_shift * c, cv={var: c}))
        pref = t.pref
        if const:
            pref = pref * QProductForm.monomial(var, const,
                                                qres=arg_shift * const)
        return NormalOrderedOperator(pref, t.vars, t.cre, t.ann, zm)

    def H_total(self, i: int, sign: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        ctx = self.ctx
        r, rs = Fraction(ctx.r), Fraction(ctx.r_star)
        s = (r - Fraction(ctx.k, 2)) * (1 if sign > 0 else -1)
        return self.Psi(i, sign, var).map(lambda t: self._dress(
            t, var, i, qhat=True, h_cq=Fraction(-1 if sign > 0 else 1),
            z_ph=1 / r - 1 / rs, z_h=1 / r, const=1 / rs - 1 / r,
            arg_shift=s))

    def E_total(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        rs = Fraction(self.ctx.r_star)
        return self.e_ell(i, var).map(lambda t: self._dress(
            t, var, i, qhat=True, h_cq=_F0, z_ph=-1 / rs, z_h=_F0,
            const=1 / rs, arg_shift=_F0))

    def F_total(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        r = Fraction(self.ctx.r)
        return self.f_ell(i, var).map(lambda t: self._dress(
            t, var, i, qhat=False, h_cq=_F0, z_ph=1 / r, z_h=1 / r,
            const=-1 / r, arg_shift=_F0))

    # -- screening currents ---------------------------------------------------

    def _screen_a_sector(self, b: _ExpBuilder, i: int, flip: bool):
        ctx = self.ctx
        kh2 = Fraction(ctx.kh, 2)
        s = kh2 if flip else -kh2
        b.add_cre(gid("a", i), mc_inv_bracket(ctx.kh).scale(-1).qshift(s))
        b.add_ann(gid("a", i), mc_inv_bracket(ctx.kh).qshift(s))
        w = Fraction(-1, ctx.kh)
        b.add_z(gid("qa", i), LogForm(c0=w))
        b.add_z(gid("pa", i), LogForm(cv={b.var: w}))

    def S(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        ctx = self.ctx
        N = ctx.N
        scale = QProductForm.monomial(var, -1, scalar(-1) / _dq())
        terms = []
        for j in range(i + 1, N + 1):
            for pick in (0, 1):
                b = _ExpBuilder(var)
                self._screen_a_sector(b, i, flip=False)
                b.full_bc(i + 1, j, N - j)
                if pick == 0:
                    b.half_minus(gid("b", i, j), N - j, -1)
                    b.full_bc(i, j, N - j + 1, -1)
                else:
                    b.half_plus(gid("b", i, j), N - j, -1)
                    b.full_bc(i, j, N - j - 1, -1)
                for l in range(j + 1, N + 1):
                    b.half_minus(gid("b", i + 1, l), N - l + 1)
                    b.half_minus(gid("b", i, l), N - l, -1)
                sgn = scalar(1) if pick == 0 else scalar(-1)
                terms.append(b.done(scale.scale(sgn)))
        return OperatorExpression(terms)

    def S_tilde(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        ctx = self.ctx
        b = _ExpBuilder(var)
        self._screen_a_sector(b, i, flip=True)
        core = b.done()
        dm = self.D(i, -1, var).terms[0]
        r = Fraction(ctx.r)
        dressed = self._dress(core.merge_free(dm), var, i, qhat=False,
                              h_cq=_F0, z_ph=1 / r, z_h=1 / r, const=-1 / r,
                              arg_shift=_F0)
        return OperatorExpression.single(dressed)

    # -- vertex operator components -------------------------------------------

    def _dual_a_block(self, b: _ExpBuilder, i: int, weight: int, s: Fraction):
        """exp{-sum ([w n]/n) adual(+-n) q^{sn} z^{-+n}} with its zero modes."""
        ctx = self.ctx
        for j in range(1, ctx.N):
            base = _dual_weight_mc(ctx, i, j, mc_inv_bracket(ctx.kh))
            if base.is_strictly_zero():
                continue
            mc = (mc_bracket(weight) * mc_n(-1) * base).qshift(s)
            if not mc.is_strictly_zero():
                b.add_cre(gid("a", j), mc)
                b.add_ann(gid("a", j), -mc)
            w = dual_zero_weight(ctx, i, j) * weight
            if w:
                b.add_z(gid("qa", j), LogForm(c0=w))
                b.add_z(gid("pa", j), LogForm(cv={b.var: w}))

    def phi_component(self, i: int, var: str = "z") -> OperatorExpression:
        """Type I vertex operator component."""
        self._check_i(i)
        b = _ExpBuilder(var)
        self._dual_a_block(b, i, lam(self.ctx, i), Fraction(self.ctx.kh, 2))
        return OperatorExpression.single(b.done())

    def psiII_component(self, i: int, var: str = "z") -> OperatorExpression:
        """Type II vertex operator component."""
        self._check_i(i)
        ctx = self.ctx
        b = _ExpBuilder(var)
        self._dual_a_block(b, i, lam(ctx, ctx.N - i), -Fraction(ctx.kh, 2))
        inv2 = mc_inv_bracket(1) * mc_inv_bracket(1)
        for j in range(i + 1, ctx.N + 1):
            w = lam(ctx, j - i)
            mc = mc_bracket(w) * inv2
            if not mc.is_strictly_zero():
                for fam in ("b", "c"):
                    b.add_cre(gid(fam, i, j), mc)
                    b.add_ann(gid(fam, i, j), -mc)
            if w:
                for fam in ("b", "c"):
                    b.add_z(gid("q" + fam, i, j), LogForm(c0=w))
                    b.add_z(gid("p" + fam, i, j),
                            LogForm(cv={var: Fraction(w)}))
        return OperatorExpression.single(b.done())

    def T(self, i: int, sign: int, var: str = "z") -> OperatorExpression:
        """Twists attaching the p-dependence of the elliptic vertex ops."""
        self._check_i(i)
        ctx = self.ctx
        li = lam(ctx, i)
        b = _ExpBuilder(var)
        head = mc_bracket(li) * mc_bracket(ctx.k) * mc_n(-1)
        inv = mc_inv_bracket(ctx.er() if sign > 0 else ctx.ers())
        for j in range(1, ctx.N):
            w = _dual_weight_mc(ctx, i, j, mc_inv_bracket(ctx.k))
            if w.is_strictly_zero():
                continue
            for g, s, sgn in cartan_combo(ctx, j):
                shift = ctx.e(s - Fraction(ctx.k, 2), 1, 0)
                mc = (head * inv * w).scale(sgn).qshift(shift)
                if sign > 0:
                    b.add_ann(g, mc)
                else:
                    b.add_cre(g, mc.scale(-1))
        if sign > 0:
            c = Fraction(-li, ctx.r)
            for j in range(1, ctx.N):
                w = hat_weight(ctx, i, j)
                if not w:
                    continue
                b.add_z(gid("ph", j), LogForm(cv={var: c * w}))
                for g, cc in h_word(ctx, j, c * w):
                    b.add_z(g, LogForm(cv={var: cc}))
                b.add_z(gid("pa", j), LogForm(cv={var: -c * w}))
        else:
            for j in range(1, ctx.N):
                w = hat_weight(ctx, i, j)
                if not w:
                    continue
                b.add_z(gid("qh", j), LogForm(c0=-2 * li * w))
                b.add_z(gid("ph", j),
                        LogForm(cv={var: Fraction(li, ctx.r_star) * w}))
        return OperatorExpression.single(b.done())

    def Phi_component(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        core = self.phi_component(i, var).terms[0]
        tw = self.T(i, +1, var).terms[0]
        return OperatorExpression.single(core.merge_free(tw))

    def PsiII_elliptic_component(self, i: int, var: str = "z") -> OperatorExpression:
        self._check_i(i)
        tw = self.T(i, -1, var).terms[0]
        core = self.psiII_component(i, var).terms[0]
        return OperatorExpression.single(tw.merge_free(core))

    def _product_over_i(self, component, var: str) -> OperatorExpression:
        total = None
        for i in range(1, self.ctx.N):
            t = component(i, var).terms[0]
            total = t if total is None else total.merge_free(t)
        return OperatorExpression.single(total)

    def phi_Lambda(self, var: str = "z") -> OperatorExpression:
        return self._product_over_i(self.phi_component, var)

    def psiII_Lambda(self, var: str = "z") -> OperatorExpression:
        return self._product_over_i(self.psiII_component, var)

    def Phi_Lambda(self, var: str = "z") -> OperatorExpression:
        return self._product_over_i(self.Phi_component, var)

    def PsiII_Lambda(self, var: str = "z") -> OperatorExpression:
        return self._product_over_i(self.PsiII_elliptic_component, var)


def _dq():
    return scalar(qpow(1) - qpow(-1))


# ---------------------------------------------------------------------------
# build entry points (slices share one catalog)

def build_wakimoto(ctx: ParameterContext) -> CurrentCatalog:
    return CurrentCatalog(ctx)


def build_twists_and_elliptic(ctx: ParameterContext) -> CurrentCatalog:
    return CurrentCatalog(ctx)


def build_total(ctx: ParameterContext) -> CurrentCatalog:
    return CurrentCatalog(ctx)


def build_screening(ctx: ParameterContext) -> CurrentCatalog:
    return CurrentCatalog(ctx)


def build_vertex_ops(ctx: ParameterContext, lam_override=None) -> CurrentCatalog:
    if lam_override is not None:
        ctx = dataclasses.replace(ctx, lam=tuple(lam_override))
    return CurrentCatalog(ctx)


# ---------------------------------------------------------------------------
# exchange kernels of the vertex-operator products, exact in y = q^n

def g_kernel(ctx: ParameterContext, i: int, j: int) -> ModeCoefficient:
    """[g^{ij}_n] = [min n][(N-max)n] / ([(k+h)n][Nn])."""
    lo, hi = min(i, j), max(i, j)
    if lo <= 0 or hi >= ctx.N:
        return ModeCoefficient.zero()
    return (mc_bracket(lo) * mc_bracket(ctx.N - hi)
            * mc_inv_bracket(ctx.kh) * mc_inv_bracket(ctx.N))


def X_kernel(ctx: ParameterContext, which: int, i: int, j: int) -> ModeCoefficient:
    """The three trigonometric VO exchange kernels (coefficient of x^n)."""
    li, lj = lam(ctx, i), lam(ctx, j)
    if which == 2:
        lj = lam(ctx, ctx.N - j)
    elif which == 3:
        li, lj = lam(ctx, ctx.N - i), lam(ctx, ctx.N - j)
    core = (mc_n(-1) * mc_bracket(li) * mc_bracket(lj)
            * mc_inv_bracket(1) * mc_inv_bracket(1) * g_kernel(ctx, i, j))
    if which == 1:
        return core.qshift(ctx.kh)
    if which == 2:
        return core
    if which == 3:
        return core.qshift(-ctx.kh)
    raise ValueError(f"unknown X kernel {which}")


def C_const(ctx: ParameterContext, i: int, j: int) -> Fraction:
    """The zero-mode mixing constant of the mixed elliptic VO exchange."""
    g = lambda a, b: dual_zero_weight(ctx, a, b)
    N = ctx.N
    out = _F0
    for l in range(j, N):
        out -= lam(ctx, l + 1 - j) * g(i, l)
    for l in range(j + 1, N):
        out += lam(ctx, l - j) * g(i, l)
    tail = sum(lam(ctx, l - j) for l in range(j + 1, N + 1))
    out += -tail * g(i, j) + tail * g(i, j - 1)
    return out


def C_kernel(ctx: ParameterContext, i: int, j: int) -> ModeCoefficient:
    """The n-dependent lift of C_const with k/2-graded shifts."""
    N, k = ctx.N, ctx.k
    out = ModeCoefficient.zero()
    for l in range(j, N):
        out = out - (mc_bracket(lam(ctx, l + 1 - j)) * g_kernel(ctx, i, l)
                     ).qshift(-Fraction(k + 2 * j - 2, 2))
    for l in range(j + 1, N):
        out = out + (mc_bracket(lam(ctx, l - j)) * g_kernel(ctx, i, l)
                     ).qshift(-Fraction(k + 2 * j, 2))
    t3 = ModeCoefficient.zero()
    t4 = ModeCoefficient.zero()
    for l in range(j + 1, N + 1):
        t3 = t3 + mc_bracket(lam(ctx, l - j)).qshift(-Fraction(k + 2 * l, 2))
        t4 = t4 + mc_bracket(lam(ctx, l - j)).qshift(-Fraction(k + 2 * l - 2, 2))
    out = out - t3 * g_kernel(ctx, i, j) + t4 * g_kernel(ctx, i, j - 1)
    return out


def Y_kernel(ctx: ParameterContext, which: int, i: int, j: int) -> ModeCoefficient:
    """The six elliptic VO exchange kernels (coefficient of x^n)."""
    k, kh = ctx.k, ctx.kh
    li, lj = lam(ctx, i), lam(ctx, j)
    inv2 = mc_inv_bracket(1) * mc_inv_bracket(1)
    if which == 1:
        return (mc_n(-1) * mc_bracket(li) * mc_bracket(lj)
                * mc_bracket(ctx.e(-kh, 1, 0))
                * mc_inv_bracket(ctx.er()) * inv2 * g_kernel(ctx, i, j))
    if which == 2:
        return -(mc_n(-1) * mc_bracket(li) * mc_bracket(lj) * mc_bracket(kh)
                 * mc_inv_bracket(ctx.er()) * inv2 * g_kernel(ctx, i, j)
                 ).qshift(ctx.e(-k, 1, 0))
    if which == 3:
        return -(mc_n(-1) * mc_bracket(li) * mc_bracket(lam(ctx, ctx.N - j))
                 * mc_bracket(kh) * mc_inv_bracket(ctx.er()) * inv2
                 * g_kernel(ctx, i, j)).qshift(ctx.e(-k - ctx.h_vee, 1, 0))
    if which == 4:
        return -(mc_n(-1) * mc_bracket(li) * mc_bracket(kh)
                 * mc_inv_bracket(ctx.er()) * inv2
                 * C_kernel(ctx, i, j)).qshift(ctx.e(-Fraction(k, 2), 1, 0))
    if which == 5:
        return -(mc_n(-1) * mc_bracket(lam(ctx, ctx.N - i)) * mc_bracket(lj)
                 * mc_bracket(kh) * mc_inv_bracket(ctx.ers()) * inv2
                 * g_kernel(ctx, i, j)).qshift(ctx.e(-k - ctx.h_vee, 1, 0))
    if which == 6:
        return -(mc_n(-1) * mc_bracket(lj) * mc_bracket(kh)
                 * mc_inv_bracket(ctx.ers()) * inv2
                 * C_kernel(ctx, j, i)).qshift(ctx.e(-Fraction(k, 2), 1, 0))
    raise ValueError(f"unknown Y kernel {which}")
