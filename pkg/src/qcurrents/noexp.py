"""Calculus of normal-ordered exponential operators.

A NormalOrderedOperator is :exp(creation part) * zero modes * exp(annihilation
part): with a scalar QProductForm prefactor.  Products are computed by Wick
reordering: every (annihilation, creation) pair across the two operators
contributes exp(sum_{n>0} pairing(n) x^n), which exponentiates in closed form
to Pochhammer/linear factors because every pairing is log-type; zero-mode
words exchange through central commutators into pure monomials.

Region convention: in any product the leftmost variable is largest, so all
contraction factors are one-sided in (right variable)/(left variable) and all
series manipulations stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import mpmath

from .oscillators import (CommutatorTable, GeneratorId, LogForm,
                          ModeCoefficient, StructureError, kernel_pairing,
                          zero_mode_exchange)
from .qseries import (DeltaTerm, QProductForm, TruncSeries, ZeroFactorError,
                      _lin_series, _poch_series)
from .scalars import E, Scalar, qpow, scalar

_F0 = Fraction(0)


# ---------------------------------------------------------------------------
# QProductForm variable plumbing

def qpf_shift_var(f: QProductForm, var: str, s) -> QProductForm:
    """Substitute v -> q^s v inside a form."""
    s = Fraction(s)
    if not s:
        return f
    qres = f.qres + s * f.monos.get(var, _F0)

    def keyshift(a, b, al):
        if a == var:
            al = al + s
        if b == var:
            al = al - s
        return al

    lin = {(a, b, keyshift(a, b, al)): m for (a, b, al), m in f.lin.items()}
    poch = {(a, b, keyshift(a, b, al), bs): m
            for (a, b, al, bs), m in f.poch.items()}
    return QProductForm(f.c, qres, f.monos, lin, poch, f.cpoch, f.clin)


def qpf_rename_shift(f: QProductForm, old: str, new: str, s) -> QProductForm:
    """Substitute v_old -> q^s v_new; old must appear in monomials only."""
    for (a, b, *_rest) in list(f.lin) + list(f.poch):
        if old in (a, b):
            raise StructureError(f"cannot rename {old}: bound in a factor")
    s = Fraction(s)
    monos = dict(f.monos)
    e = monos.pop(old, _F0)
    qres = f.qres + s * e
    if e:
        monos[new] = monos.get(new, _F0) + e
        if not monos[new]:
            del monos[new]
    return QProductForm(f.c, qres, monos, f.lin, f.poch, f.cpoch, f.clin)


def qpf_vars(f: QProductForm) -> set:
    vs = set(f.monos)
    for (a, b, *_r) in list(f.lin) + list(f.poch):
        vs.add(a)
        vs.add(b)
    return vs


def qpf_unit_verdict(f: QProductForm, ctx) -> tuple:
    """(is_unit, method) with canonical-form first, numeric sampling last."""
    try:
        if f.is_unit():
            return True, "closed-form"
        g = f.canonicalize()
        if not (g.lin or g.poch or g.cpoch or g.clin or g.monos or g.qres):
            return g.c.is_one(), "closed-form"
    except ZeroFactorError:
        pass
    # canonicalization could not decide (theta-type rearrangement or pole):
    # sample numerically on generic points
    q0 = ctx.numeric_q()
    tol = mpmath.mpf("1e-10")
    vs = sorted(qpf_vars(f))
    with mpmath.workdps(ctx.dps + 10):
        for trial, xs in enumerate(((mpmath.mpf("0.83"), mpmath.mpf("0.29")),
                                    (mpmath.mpf("1.07"), mpmath.mpf("0.41")),
                                    (mpmath.mpf("0.67"), mpmath.mpf("0.53")))):
            assign = {}
            for idx, v in enumerate(vs):
                assign[v] = xs[0] * xs[1] ** idx
            try:
                val = f.evaluate(assign, q0, ctx.dps)
            except ZeroDivisionError:
                continue
            if abs(val - 1) > tol:
                return False, "numeric"
        return True, "numeric"


def qpf_equal_robust(f: QProductForm, g: QProductForm, ctx) -> tuple:
    return qpf_unit_verdict(f / g, ctx)


# ---------------------------------------------------------------------------
# operators

class NormalOrderedOperator:
    """pref * :exp(cre) zmodes exp(ann): over an ordered variable tuple."""

    __slots__ = ("pref", "vars", "cre", "ann", "zmode")

    def __init__(self, pref: QProductForm, vars: tuple, cre: dict, ann: dict,
                 zmode: dict):
        self.pref = pref
        self.vars = tuple(vars)
        self.cre = {k: v for k, v in cre.items() if not v.is_strictly_zero()}
        self.ann = {k: v for k, v in ann.items() if not v.is_strictly_zero()}
        self.zmode = {k: v for k, v in zmode.items() if not v.is_zero()}

    @staticmethod
    def identity(var: str) -> "NormalOrderedOperator":
        return NormalOrderedOperator(QProductForm.unit(), (var,), {}, {}, {})

    def scaled(self, factor) -> "NormalOrderedOperator":
        if isinstance(factor, QProductForm):
            pref = self.pref * factor
        else:
            pref = self.pref * scalar(factor)
        return NormalOrderedOperator(pref, self.vars, self.cre, self.ann,
                                     self.zmode)

    def shift_var(self, var: str, s) -> "NormalOrderedOperator":
        """Evaluate at q^s var instead of var."""
        s = Fraction(s)
        if not s:
            return self
        cre = {(v, g): (mc.qshift(s) if v == var else mc)
               for (v, g), mc in self.cre.items()}
        ann = {(v, g): (mc.qshift(-s) if v == var else mc)
               for (v, g), mc in self.ann.items()}
        zmode = {}
        for g, f in self.zmode.items():
            e = f.cv.get(var, _F0)
            zmode[g] = LogForm(f.c0, f.cq + e * s, f.cv) if e else f
        return NormalOrderedOperator(qpf_shift_var(self.pref, var, s),
                                     self.vars, cre, ann, zmode)

    def rename_var(self, old: str, new: str, s=0) -> "NormalOrderedOperator":
        """Substitute v_old = q^s v_new throughout."""
        s = Fraction(s)
        cre = {}
        for (v, g), mc in self.cre.items():
            if v == old:
                mc = mc.qshift(s) if s else mc
                key = (new, g)
            else:
                key = (v, g)
            cre[key] = cre[key] + mc if key in cre else mc
        ann = {}
        for (v, g), mc in self.ann.items():
            if v == old:
                mc = mc.qshift(-s) if s else mc
                key = (new, g)
            else:
                key = (v, g)
            ann[key] = ann[key] + mc if key in ann else mc
        zmode = {}
        for g, f in self.zmode.items():
            e = f.cv.get(old, _F0)
            if e:
                cv = dict(f.cv)
                del cv[old]
                cv[new] = cv.get(new, _F0) + e
                f = LogForm(f.c0, f.cq + e * s, cv)
            zmode[g] = f
        vars = tuple(new if v == old else v for v in self.vars)
        # drop duplicates, keep first occurrence
        seen, vs = set(), []
        for v in vars:
            if v not in seen:
                seen.add(v)
                vs.append(v)
        return NormalOrderedOperator(qpf_rename_shift(self.pref, old, new, s),
                                     tuple(vs), cre, ann, zmode)

    def merge_free(self, other: "NormalOrderedOperator") -> "NormalOrderedOperator":
        """Exponent-adding merge with no contraction (same-colon product)."""
        cre = dict(self.cre)
        for k, mc in other.cre.items():
            cre[k] = cre[k] + mc if k in cre else mc
        ann = dict(self.ann)
        for k, mc in other.ann.items():
            ann[k] = ann[k] + mc if k in ann else mc
        zmode = dict(self.zmode)
        for g, f in other.zmode.items():
            s = zmode[g] + f if g in zmode else f
            if s.is_zero():
                zmode.pop(g, None)
            else:
                zmode[g] = s
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return NormalOrderedOperator(self.pref * other.pref, vars, cre, ann,
                                     zmode)

    def inverse_exponential(self) -> "NormalOrderedOperator":
        """Formal inverse of a pure exponential (unit prefactor)."""
        return NormalOrderedOperator(self.pref.inverse(), self.vars,
                                     {k: -v for k, v in self.cre.items()},
                                     {k: -v for k, v in self.ann.items()},
                                     {g: -f for g, f in self.zmode.items()})

    def signature(self):
        """Hashable key identifying the normal-ordered kernel."""
        return (frozenset((v, g, mc) for (v, g), mc in self.cre.items()),
                frozenset((v, g, mc) for (v, g), mc in self.ann.items()),
                frozenset((g, f.key()) for g, f in self.zmode.items()))

    def same_kernel(self, other: "NormalOrderedOperator") -> bool:
        if set(self.zmode) != set(other.zmode):
            return False
        if any(self.zmode[g] != other.zmode[g] for g in self.zmode):
            return False
        for mine, theirs in ((self.cre, other.cre), (self.ann, other.ann)):
            keys = set(mine) | set(theirs)
            for k in keys:
                a = mine.get(k, ModeCoefficient.zero())
                b = theirs.get(k, ModeCoefficient.zero())
                if a != b:
                    return False
        return True

    def __repr__(self):
        return (f"NOO[{self.pref!r}; vars={self.vars}; "
                f"#cre={len(self.cre)} #ann={len(self.ann)} "
                f"#z={len(self.zmode)}]")


class OperatorExpression:
    """A finite sum of normal-ordered operators over shared variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[NormalOrderedOperator]):
        self.terms = [t for t in terms if not t.pref.is_zero()]

    @staticmethod
    def single(t: NormalOrderedOperator) -> "OperatorExpression":
        return OperatorExpression([t])

    def __add__(self, other: "OperatorExpression") -> "OperatorExpression":
        return OperatorExpression(self.terms + other.terms)

    def map(self, fn: Callable) -> "OperatorExpression":
        return OperatorExpression([fn(t) for t in self.terms])

    def scaled(self, factor) -> "OperatorExpression":
        return self.map(lambda t: t.scaled(factor))

    def shift_var(self, var: str, s) -> "OperatorExpression":
        return self.map(lambda t: t.shift_var(var, s))

    def rename_var(self, old: str, new: str, s=0) -> "OperatorExpression":
        return self.map(lambda t: t.rename_var(old, new, s))

    def grouped(self) -> dict:
        """Terms grouped by kernel signature."""
        out: dict = {}
        for t in self.terms:
            out.setdefault(t.signature(), []).append(t)
        return out

    def __repr__(self):
        return f"OpExpr[{len(self.terms)} terms]"


def shift(A: OperatorExpression, s, var: Optional[str] = None) -> OperatorExpression:
    """Evaluate a single-variable expression at q^s z."""
    if var is None:
        vs = {v for t in A.terms for v in t.vars}
        if len(vs) != 1:
            raise StructureError("shift needs an explicit variable for "
                                 "multi-variable expressions")
        (var,) = vs
    return A.shift_var(var, s)


# ---------------------------------------------------------------------------
# Wick products

def _exponentiate_pairing(P: ModeCoefficient, small: str, large: str) -> QProductForm:
    """exp(sum_{n>0} P(n) (v_small/v_large)^n) in closed product form."""
    out = QProductForm.unit()
    for c, alpha, bases in P.log_atoms():
        if bases:
            bs = []
            for M in bases:
                if M.conc.denominator != 1 or M.conc <= 0:
                    raise StructureError(f"non-integral pochhammer base {M}")
                bs.append(int(M.conc))
            out = out * QProductForm.pochhammer(small, large, alpha, bs, -c)
        else:
            out = out * QProductForm.linear(small, large, alpha, -c)
    return out


def _merge_zwords(wA: dict, wB: dict, table: CommutatorTable):
    """Reorder word_A word_B into canonical order; only A's p-type factors
    moving right past B's q-type factors produce exchange monomials."""
    cq, cv = _F0, {}
    for z1, f1 in wA.items():
        if not z1.is_p_type():
            continue
        for z2, f2 in wB.items():
            if not z2.is_q_type():
                continue
            br = table.zbracket(z1, z2)
            if not br:
                continue
            dq, dv = zero_mode_exchange({z1: f1}, {z2: f2}, table)
            cq += dq
            for v, e in dv.items():
                cv[v] = cv.get(v, _F0) + e
    merged = dict(wA)
    for g, f in wB.items():
        merged[g] = merged[g] + f if g in merged else f
    return QProductForm(qres=cq, monos={v: e for v, e in cv.items() if e}), merged


def wick_pair(A: NormalOrderedOperator, B: NormalOrderedOperator,
              table: CommutatorTable) -> NormalOrderedOperator:
    """A * B with every A-variable larger than every B-variable."""
    if set(A.vars) & set(B.vars):
        raise StructureError("wick product requires disjoint variables")
    # sum all pairings per variable pair before exponentiating: individual
    # generator pairings need not be log-type, only their total is
    pairings: dict = {}
    for (va, g1), cA in A.ann.items():
        for (vb, g2), cB in B.cre.items():
            K = table.kernel(g1, g2)
            if K.is_strictly_zero():
                continue
            P = kernel_pairing(cA, cB, K)
            key = (vb, va)
            pairings[key] = pairings[key] + P if key in pairings else P
    contraction = QProductForm.unit()
    for (vb, va), P in pairings.items():
        contraction = contraction * _exponentiate_pairing(P, vb, va)
    zfactor, zmode = _merge_zwords(A.zmode, B.zmode, table)
    cre = dict(A.cre)
    for k, mc in B.cre.items():
        cre[k] = cre[k] + mc if k in cre else mc
    ann = dict(A.ann)
    for k, mc in B.ann.items():
        ann[k] = ann[k] + mc if k in ann else mc
    pref = A.pref * B.pref * contraction * zfactor
    return NormalOrderedOperator(pref, A.vars + B.vars, cre, ann, zmode)


def wick_product(A: OperatorExpression, B: OperatorExpression,
                 table: CommutatorTable) -> OperatorExpression:
    return OperatorExpression([wick_pair(ta, tb, table)
                               for ta in A.terms for tb in B.terms])


# ---------------------------------------------------------------------------
# exchange ratios and commutator deltas

def _match_terms(AB: OperatorExpression, BA: OperatorExpression) -> list:
    """Pair off terms of the two products by normal-ordered kernel."""
    gb = BA.grouped()
    pairs = []
    for ta in AB.terms:
        sig = ta.signature()
        bucket = gb.get(sig)
        if not bucket:
            return []
        # signatures are value-based, any representative works; prefactors of
        # same-kernel duplicates are compared pairwise by the caller
        pairs.append((ta, bucket[0]))
    return pairs


def exchange_ratio(A: OperatorExpression, B: OperatorExpression,
                   table: CommutatorTable, ctx) -> Optional[QProductForm]:
    """R with A(z)B(w) = R * B(w)A(z), or None when kernels do not match."""
    AB = wick_product(A, B, table)
    BA = wick_product(B, A, table)
    pairs = _match_terms(AB, BA)
    if not pairs or len(AB.terms) != len(BA.terms):
        return None
    ratios = [ta.pref / tb.pref for ta, tb in pairs]
    first = ratios[0]
    for r in ratios[1:]:
        ok, _ = qpf_equal_robust(r, first, ctx)
        if not ok:
            return None
    return first


def commutator_delta(A: OperatorExpression, B: OperatorExpression,
                     table: CommutatorTable, ctx,
                     lvar: str = "z", rvar: str = "w") -> list:
    """[A(z), B(w)] as a list of DeltaTerm(shift, payload operator in w).

    Requires the two region expansions to agree as rational functions with
    simple poles; each pole x = w/z = q^{-s} contributes
    residue * delta(q^s w/z) with the merged operator evaluated on z = q^s w.
    """
    AB = wick_product(A, B, table)
    BA = wick_product(B, A, table)
    pairs = _match_terms(AB, BA)
    if not pairs or len(AB.terms) != len(BA.terms):
        raise StructureError("commutator kernels do not match term-by-term")
    out = []
    for ta, tb in pairs:
        FA = ta.pref.canonicalize()
        ok, _ = qpf_equal_robust(FA, tb.pref, ctx)
        if not ok:
            raise StructureError("two-sided expansions disagree as functions")
        for (a, b, alpha), m in FA.lin.items():
            if m >= 0:
                continue
            if m <= -2:
                raise StructureError(f"higher-order pole (1-q^{alpha})^{m}")
            # pole at v_a = q^{-alpha} v_b
            s_delta = alpha if (a, b) == (rvar, lvar) else -alpha
            c_pole = (FA * QProductForm.linear(a, b, alpha)
                      ).substitute_pole(a, b, alpha)
            if b == lvar:
                # on the delta support v_l = q^{s} v_r
                c_pole = qpf_rename_shift(c_pole, lvar, rvar, s_delta.conc)
            payload = NormalOrderedOperator(c_pole, (rvar,), ta.cre, ta.ann,
                                            ta.zmode)
            payload = payload.rename_var(lvar, rvar, s_delta.conc)
            out.append(DeltaTerm(s_delta.conc, payload))
    return out


def collapse_delta_terms(terms: list, ctx) -> list:
    """Group delta terms by (shift, kernel) and sum the residue prefactors.

    Within a group all payloads share a kernel, so their prefactors differ by
    scalar factors in the field; the sum is reattached to a representative.
    """
    groups: dict = {}
    order = []
    for dt in terms:
        key = (dt.shift, dt.payload.signature())
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(dt.payload)
    out = []
    for key in order:
        ops = groups[key]
        ref = ops[0]
        total = scalar(0)
        extra = None
        for op in ops:
            ratio = (op.pref / ref.pref).canonicalize()
            if ratio.constant_only() and not (ratio.cpoch or ratio.clin
                                              or ratio.qres):
                total = total + ratio.c
            else:
                raise StructureError("delta residues are not commensurable")
        if total.is_zero():
            continue
        out.append(DeltaTerm(key[0], NormalOrderedOperator(
            ref.pref * total, ref.vars, ref.cre, ref.ann, ref.zmode)))
    return out


# ---------------------------------------------------------------------------
# multivariate exact expansion (Serre checks)

def _mono_mul(acc: dict, series: dict, direction: tuple) -> dict:
    out: dict = {}
    for e1, c1 in acc.items():
        for n, c2 in series.items():
            e = tuple(x + n * d for x, d in zip(e1, direction))
            s = out.get(e, scalar(0)) + c1 * c2
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


def expand_pref_multi(f: QProductForm, order: tuple, M: int) -> dict:
    """Exact coefficients of a product form as a Laurent polynomial in the
    given variables, each factor expanded in its own (ordered) region, all
    factor series cut at order M."""
    f = f.canonicalize()
    if f.clin or f.cpoch:
        raise StructureError("constant product content in a series expansion")
    idx = {v: i for i, v in enumerate(order)}
    nv = len(order)
    if (2 * f.qres).denominator != 1:
        raise StructureError(f"non-half-integral residual power q^{f.qres}")
    e0 = [Fraction(0)] * nv
    for v, e in f.monos.items():
        e0[idx[v]] = e
    acc = {tuple(e0): f.c * qpow(f.qres)}
    for (a, b, alpha, bs), m in f.poch.items():
        if idx[a] < idx[b]:
            raise StructureError("pochhammer oriented against the region")
        ser = _poch_series("x", alpha.conc, tuple(int(M_.conc) for M_ in bs),
                           m, M)
        direction = tuple(1 if i == idx[a] else (-1 if i == idx[b] else 0)
                          for i in range(nv))
        acc = _mono_mul(acc, {e: c for e, c in ser.coeffs.items()}, direction)
    for (a, b, alpha), m in f.lin.items():
        small, big, al, mm = (a, b, alpha, m) if idx[a] > idx[b] else \
            (b, a, -alpha, m)
        if idx[a] < idx[b]:
            # (1-q^al a/b)^m = (-q^al a/b)^m (1-q^{-al} b/a)^m toward the region
            ser = _lin_series("x", al.conc, mm, M)
            extra = (-qpow(alpha.conc)) ** m
            shifted = {e - mm: c * extra for e, c in ser.coeffs.items()}
            # (1-q^al a/b) = -q^al (a/b) (1-q^{-al} b/a)
            ser_coeffs = shifted
        else:
            ser_coeffs = dict(_lin_series("x", al.conc, mm, M).coeffs)
        direction = tuple(1 if i == idx[small] else (-1 if i == idx[big] else 0)
                          for i in range(nv))
        acc = _mono_mul(acc, ser_coeffs, direction)
    return acc


def serre_check(Ai: OperatorExpression, Aj: OperatorExpression,
                table: CommutatorTable, ctx, W: int,
                prefactor=None) -> tuple:
    """The symmetrized Serre sum for the pair (A_i, A_i, A_j):

        X(z1)X(z2)Y(w) - [2] X(z1)Y(w)X(z2) + Y(w)X(z1)X(z2)
                                               + (z1 <-> z2)  =  0,

    checked coefficientwise per normal-ordered kernel on the exact window
    |exponent| <= W in each trailing variable.  Optional prefactor(order)
    returns extra QProductForm weights per ordering (elliptic variants).
    Returns (ok, witness)."""
    X1 = Ai.rename_var(_one_var(Ai), "z1")
    X2 = Ai.rename_var(_one_var(Ai), "z2")
    Y = Aj.rename_var(_one_var(Aj), "w")
    two = scalar(qpow(1) + qpow(-1))
    orderings = [
        (("z1", "z2", "w"), scalar(1)),
        (("z1", "w", "z2"), -two),
        (("w", "z1", "z2"), scalar(1)),
        (("z2", "z1", "w"), scalar(1)),
        (("z2", "w", "z1"), -two),
        (("w", "z2", "z1"), scalar(1)),
    ]
    ops = {"z1": X1, "z2": X2, "w": Y}
    # first pass: group terms by kernel and collect pole positions per group;
    # multiplying a group by the polynomial vanishing at every pole kills the
    # delta-supported region discrepancies, after which the six expansions
    # must cancel coefficientwise
    groups: dict = {}
    for order, coef in orderings:
        prod = wick_product(wick_product(ops[order[0]], ops[order[1]], table),
                            ops[order[2]], table)
        for t in prod.terms:
            pref = t.pref
            if prefactor is not None:
                pref = pref * prefactor(order)
            groups.setdefault(t.signature(), []).append((order, coef, pref))
    clear: dict = {}
    for sig, members in groups.items():
        poles: dict = {}
        for _, _, pref in members:
            for (a, b, alpha), m in pref.canonicalize().lin.items():
                if m >= 0:
                    continue
                key = (a, b, alpha) if a < b else (b, a, -alpha)
                poles[key] = max(poles.get(key, 0), -m)
        C = QProductForm.unit()
        for (a, b, alpha), mult in poles.items():
            C = C * QProductForm.linear(a, b, alpha, mult)
        clear[sig] = C
    totals: dict = {}
    for sig, members in groups.items():
        box = totals.setdefault(sig, {})
        for order, coef, pref in members:
            pref = pref * clear[sig]
            slack = (sum(abs(e) for e in pref.canonicalize().monos.values())
                     + sum(clear[sig].lin.values()))
            # chained ratio orders: o(mid/first) <= |e_mid| + o(last/mid)
            # <= (W + slack) + (W + slack)
            M = 2 * W + 2 * int(slack) + 2
            coeffs = expand_pref_multi(pref, order, M)
            for evec_ordered, c in coeffs.items():
                # re-index exponents to the fixed (z1, z2, w) frame
                evec = {v: e for v, e in zip(order, evec_ordered)}
                key = (evec["z1"], evec["z2"], evec["w"])
                s = box.get(key, scalar(0)) + c * coef
                if s.is_zero():
                    box.pop(key, None)
                else:
                    box[key] = s
    for sig, box in totals.items():
        for (e1, e2, e3), c in box.items():
            if abs(e2) <= W and abs(e3) <= W and not c.is_zero():
                return False, {"kernel": sig, "exponents": (e1, e2, e3),
                               "coefficient": repr(c)}
    return True, None


def _one_var(A: OperatorExpression) -> str:
    vs = {v for t in A.terms for v in t.vars}
    if len(vs) != 1:
        raise StructureError("expected a single-variable expression")
    return next(iter(vs))


# ---------------------------------------------------------------------------
# p -> 0 limits

def _mc_p_limit(mc: ModeCoefficient, branch: str) -> ModeCoefficient:
    def weight(e: E) -> Fraction:
        return e.cr + e.crs

    num = dict(mc.num)
    bases = []
    for M in mc.bases:
        w = weight(M)
        if w == 0:
            bases.append(M)
        elif w > 0:
            if branch == "alternate":
                # 1/(1 - q^{2Mn}) ~ -q^{-2Mn} on the inverted reading
                num = {k - 2 * M: v * scalar(-1) for k, v in num.items()}
            # principal: the factor tends to 1
        else:
            raise StructureError(f"divergent base q^{{2({M})n}} at p -> 0")
    out: dict = {}
    # the two branches read the surviving monomials in opposite regimes
    drop = 1 if branch == "principal" else -1
    for k, v in num.items():
        w = weight(k)
        if w * drop > 0:
            continue
        if w != 0:
            raise StructureError(f"divergent term q^{{({k})n}} at p -> 0")
        kk = E.plain(k.conc)
        s = out.get(kk, scalar(0)) + v
        if s.is_zero():
            out.pop(kk, None)
        else:
            out[kk] = s
    return ModeCoefficient(out, tuple(bases), mc.npow)


def p_limit(A: OperatorExpression, branch: str = "principal") -> OperatorExpression:
    """The p -> 0 (r -> infinity) limit of an expression.

    branch='principal' takes every r/r*-based geometric factor to 1 and every
    positive power of p to 0; branch='alternate' instead reads the geometric
    factors through their inverted expansion, which is the reading under
    which the dressed currents degenerate to inverse undressed ones.
    """
    if branch not in ("principal", "alternate"):
        raise ValueError(f"unknown branch {branch!r}")
    out = []
    for t in A.terms:
        f = t.pref.canonicalize()
        if f.poch or f.cpoch or f.clin:
            raise StructureError("prefactor with product content has no "
                                 "atom-level p-limit; take limits factorwise")
        cre = {k: _mc_p_limit(mc, branch) for k, mc in t.cre.items()}
        ann = {k: _mc_p_limit(mc, branch) for k, mc in t.ann.items()}
        out.append(NormalOrderedOperator(f, t.vars, cre, ann, t.zmode))
    return OperatorExpression(out)
