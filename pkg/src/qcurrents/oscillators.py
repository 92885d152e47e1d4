"""Bosonic mode registry: coefficient functions of the mode index and the
exact commutator kernels between generator families.

A ModeCoefficient is a function of the (positive) mode index n of the shape

    n^d * (sum_alpha c_alpha q^{alpha n}) / prod_j (1 - q^{2 M_j n}),

kept over a single common denominator so that addition, the Wick pairing
product, and exact cancellation against bracket numerators are all plain
polynomial operations in the group ring Q(q)[q^{(.)n}].  Exponents alpha and
base halves M are E-values from scalars, so the r/r* content of every atom
stays visible for limit-taking even at concrete parameters.

Zero modes are handled separately: their exponents are rational linear forms
in {1, ln q, ln v} and all their pairwise commutators are rational constants,
so exchanging two zero-mode words always produces a monomial q^x * prod v^e.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .scalars import E, ParameterContext, Scalar, qint, qpow, scalar

_F0 = Fraction(0)
_E0 = E.plain(0)
_DQ = qpow(1) - qpow(-1)


class StructureError(Exception):
    """An operator or kernel violated a structural precondition."""


def _as_E(x) -> E:
    return x if isinstance(x, E) else E.plain(Fraction(x))


def _ekey(e: E):
    return e.sortkey()


# ---------------------------------------------------------------------------
# generator identities

_OSC_FAMILIES = ("a", "b", "c")
_P_FAMILIES = frozenset({"pa", "pb", "pc", "ph"})
_Q_FAMILIES = frozenset({"qa", "qb", "qc", "qh"})


@dataclass(frozen=True, order=True)
class GeneratorId:
    """A labelled boson family member: a^i, b^{ij}, c^{ij} or a zero mode."""

    family: str
    i: int
    j: int = 0

    def is_oscillator(self) -> bool:
        return self.family in _OSC_FAMILIES

    def is_p_type(self) -> bool:
        return self.family in _P_FAMILIES

    def is_q_type(self) -> bool:
        return self.family in _Q_FAMILIES

    def valid_for(self, ctx: ParameterContext) -> bool:
        N = ctx.N
        if self.family in ("a", "pa", "qa", "ph", "qh"):
            return 1 <= self.i <= N - 1 and self.j == 0
        if self.family in ("b", "c", "pb", "qb", "pc", "qc"):
            return 1 <= self.i < self.j <= N
        return False

    def __repr__(self):
        if self.j:
            return f"{self.family}^{{{self.i},{self.j}}}"
        return f"{self.family}^{self.i}"


def gid(family: str, i: int, j: int = 0) -> GeneratorId:
    return GeneratorId(family, i, j)


# ---------------------------------------------------------------------------
# mode coefficients

class ModeCoefficient:
    """n^npow * num / prod(1 - q^{2Mn}); num a Laurent sum of q^{alpha n}."""

    __slots__ = ("num", "bases", "npow")

    def __init__(self, num: Optional[dict] = None, bases=(), npow: int = 0):
        self.num = {k: v for k, v in (num or {}).items() if not v.is_zero()}
        if self.num:
            self.bases = tuple(sorted(bases, key=_ekey))
            self.npow = npow
        else:
            self.bases = ()
            self.npow = 0

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero() -> "ModeCoefficient":
        return ModeCoefficient()

    @staticmethod
    def const(c) -> "ModeCoefficient":
        return ModeCoefficient({_E0: scalar(c)})

    @staticmethod
    def mono(c, alpha, npow: int = 0, bases=()) -> "ModeCoefficient":
        return ModeCoefficient({_as_E(alpha): scalar(c)},
                               tuple(_as_E(b) for b in bases), npow)

    # -- structure ------------------------------------------------------------

    def is_strictly_zero(self) -> bool:
        return not self.num

    def is_zero(self) -> bool:
        """Zero as a function of n (concrete exponents decide)."""
        acc: dict = {}
        for k, c in self.num.items():
            acc[k.conc] = acc.get(k.conc, scalar(0)) + c
        return all(v.is_zero() for v in acc.values())

    def scale(self, c) -> "ModeCoefficient":
        c = scalar(c)
        if c.is_zero():
            return ModeCoefficient()
        return ModeCoefficient({k: v * c for k, v in self.num.items()},
                               self.bases, self.npow)

    def __neg__(self) -> "ModeCoefficient":
        return self.scale(-1)

    def qshift(self, alpha) -> "ModeCoefficient":
        """Multiply by q^{alpha n}."""
        alpha = _as_E(alpha)
        return ModeCoefficient({k + alpha: v for k, v in self.num.items()},
                               self.bases, self.npow)

    def __add__(self, other: "ModeCoefficient") -> "ModeCoefficient":
        if not self.num:
            return other
        if not other.num:
            return self
        if self.npow != other.npow:
            raise StructureError(
                f"mode-coefficient sum with mixed n-powers "
                f"{self.npow} vs {other.npow}")
        cs, co = Counter(self.bases), Counter(other.bases)
        union = cs | co
        na = _extend(self.num, union - cs)
        nb = _extend(other.num, union - co)
        out = dict(na)
        for k, v in nb.items():
            s = out.get(k, scalar(0)) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return ModeCoefficient(out, tuple(union.elements()), self.npow)

    def __sub__(self, other: "ModeCoefficient") -> "ModeCoefficient":
        return self + (-other)

    def __mul__(self, other: "ModeCoefficient") -> "ModeCoefficient":
        if not self.num or not other.num:
            return ModeCoefficient()
        return ModeCoefficient(_conv(self.num, other.num),
                               self.bases + other.bases,
                               self.npow + other.npow)

    def reflect(self) -> "ModeCoefficient":
        """The same coefficient as a function of -n, re-expressed at n > 0."""
        num = {-k: v for k, v in self.num.items()}
        sgn = -1 if self.npow % 2 else 1
        for M in self.bases:
            # 1/(1 - q^{-2Mn}) = -q^{2Mn}/(1 - q^{2Mn})
            num = {k + 2 * M: v * scalar(-1) for k, v in num.items()}
        if sgn < 0:
            num = {k: -v for k, v in num.items()}
        return ModeCoefficient(num, self.bases, self.npow)

    def simplify(self) -> "ModeCoefficient":
        """Cancel denominator bases dividing the numerator exactly."""
        num = dict(self.num)
        keep = []
        for M in self.bases:
            f = {_E0: scalar(1), 2 * M: scalar(-1)}
            q = _div_exact(num, f)
            if q is None:
                keep.append(M)
            else:
                num = q
        return ModeCoefficient(num, tuple(keep), self.npow)

    def concretize(self) -> "ModeCoefficient":
        num: dict = {}
        for k, c in self.num.items():
            kk = k.concretize()
            s = num.get(kk, scalar(0)) + c
            if s.is_zero():
                num.pop(kk, None)
            else:
                num[kk] = s
        return ModeCoefficient(num, tuple(b.concretize() for b in self.bases),
                               self.npow)

    def fold_monomials(self) -> "ModeCoefficient":
        """Move pure q-power content of coefficients into the exponent keys."""
        num: dict = {}
        for k, c in self.num.items():
            e = None
            if not c.den and len(c.num) == 1:
                (e,) = c.num
            if e:
                kk = k + Fraction(e, 2)
                c = Scalar({0: c.num[e]})
            else:
                kk = k
            s = num.get(kk, scalar(0)) + c
            if s.is_zero():
                num.pop(kk, None)
            else:
                num[kk] = s
        return ModeCoefficient(num, self.bases, self.npow)

    # -- evaluation / comparison ----------------------------------------------

    def eval_at(self, n: int) -> Scalar:
        if n == 0:
            raise ValueError("mode coefficients live at n != 0")
        v = scalar(0)
        for k, c in self.num.items():
            v = v + c * qpow(k.conc * n)
        for M in self.bases:
            v = v / (scalar(1) - qpow(2 * M.conc * n))
        if self.npow:
            v = v * scalar(Fraction(n) ** self.npow)
        return v

    def __eq__(self, other):
        if not isinstance(other, ModeCoefficient):
            return NotImplemented
        if self.npow != other.npow:
            return self.is_zero() and other.is_zero()
        return (self - other).is_zero()

    def __hash__(self):
        if self.is_zero():
            return hash(("MC", 0))
        return hash(("MC", self.eval_at(1), self.eval_at(2), self.eval_at(3)))

    def log_atoms(self) -> list:
        """Decompose a log-type (npow = -1) coefficient into exponentiable
        atoms (c: int, alpha: E, bases): c * q^{alpha n}/(n * prod(1-q^{2Mn})).
        """
        mc = self.simplify().fold_monomials()
        if mc.is_strictly_zero():
            return []
        if mc.npow != -1:
            raise StructureError(f"pairing is not log-type: n^{mc.npow}")
        out = []
        retry = False
        for k, c in mc.num.items():
            ci = c.as_integer()
            if ci is None:
                retry = True
                break
            out.append((ci, k, mc.bases))
        if not retry:
            return out
        mc2 = self.concretize().simplify().fold_monomials()
        out = []
        for k, c in mc2.num.items():
            ci = c.as_integer()
            if ci is None:
                raise StructureError(
                    f"non-integer multiplicity {c!r} at q^{k} in pairing")
            out.append((ci, k, mc2.bases))
        return out

    def __repr__(self):
        terms = " + ".join(f"{c!r}*q^({k})n" for k, c in
                           sorted(self.num.items(), key=lambda kv: _ekey(kv[0])))
        s = f"({terms or '0'})"
        if self.npow:
            s += f"*n^{self.npow}"
        for M in self.bases:
            s += f"/(1-q^(2({M}))n)"
        return f"MC[{s}]"


def _conv(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            s = out.get(k, scalar(0)) + ca * cb
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
    return out


def _extend(num: dict, missing: Counter) -> dict:
    for M, mult in missing.items():
        f = {_E0: scalar(1), 2 * M: scalar(-1)}
        for _ in range(mult):
            num = _conv(num, f)
    return num


def _div_exact(a: dict, f: dict) -> Optional[dict]:
    """Exact division in Q(q)[q^{(.)n}] using the sortkey group order."""
    if not a:
        return {}
    kf = max(f, key=_ekey)
    cf = f[kf]
    ftail = [(k, c) for k, c in f.items() if _ekey(k) != _ekey(kf)]
    floor = min(a, key=_ekey) - min(f, key=_ekey)
    rem = dict(a)
    quo: dict = {}
    guard = 0
    while rem:
        guard += 1
        if guard > 20000:
            return None
        kr = max(rem, key=_ekey)
        d = kr - kf
        if d < floor:
            return None
        c = rem.pop(kr) / cf
        s = quo.get(d, scalar(0)) + c
        if s.is_zero():
            quo.pop(d, None)
        else:
            quo[d] = s
        for kt, ct in ftail:
            k = d + kt
            s = rem.get(k, scalar(0)) - c * ct
            if s.is_zero():
                rem.pop(k, None)
            else:
                rem[k] = s
    return quo


def mc_bracket(L) -> ModeCoefficient:
    """[L n] = (q^{Ln} - q^{-Ln})/(q - q^{-1}) as a coefficient function."""
    L = _as_E(L)
    if L.conc == 0 and L.is_plain():
        return ModeCoefficient()
    inv = scalar(1) / _DQ
    return ModeCoefficient({L: inv, -L: -inv})


def mc_inv_bracket(M) -> ModeCoefficient:
    """1/[M n] for M with positive concrete value."""
    M = _as_E(M)
    if M.conc <= 0:
        raise ValueError(f"inverse bracket base must be positive, got {M}")
    return ModeCoefficient({M: -_DQ}, (M,))


def mc_n(npow: int) -> ModeCoefficient:
    return ModeCoefficient({_E0: scalar(1)}, (), npow)


# ---------------------------------------------------------------------------
# zero-mode linear forms

class LogForm:
    """A coefficient c0 + cq*ln q + sum_v cv*ln v with rational entries."""

    __slots__ = ("c0", "cq", "cv")

    def __init__(self, c0=0, cq=0, cv: Optional[dict] = None):
        self.c0 = Fraction(c0)
        self.cq = Fraction(cq)
        self.cv = {v: Fraction(e) for v, e in (cv or {}).items() if e}

    def __add__(self, o: "LogForm") -> "LogForm":
        cv = dict(self.cv)
        for v, e in o.cv.items():
            s = cv.get(v, _F0) + e
            if s:
                cv[v] = s
            else:
                cv.pop(v, None)
        return LogForm(self.c0 + o.c0, self.cq + o.cq, cv)

    def scale(self, c) -> "LogForm":
        c = Fraction(c)
        return LogForm(self.c0 * c, self.cq * c,
                       {v: e * c for v, e in self.cv.items()})

    def __neg__(self):
        return self.scale(-1)

    def is_zero(self) -> bool:
        return not (self.c0 or self.cq or self.cv)

    def is_const(self) -> bool:
        return not (self.cq or self.cv)

    def rename(self, old: str, new: str) -> "LogForm":
        if old not in self.cv:
            return self
        cv = dict(self.cv)
        e = cv.pop(old)
        cv[new] = cv.get(new, _F0) + e
        return LogForm(self.c0, self.cq, cv)

    def key(self):
        return (self.c0, self.cq, tuple(sorted(self.cv.items())))

    def __eq__(self, o):
        return isinstance(o, LogForm) and self.key() == o.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        bits = []
        if self.c0:
            bits.append(str(self.c0))
        if self.cq:
            bits.append(f"{self.cq}*lnq")
        for v, e in sorted(self.cv.items()):
            bits.append(f"{e}*ln{v}")
        return "LF(" + (" + ".join(bits) or "0") + ")"


def _logform_product(f1: LogForm, f2: LogForm):
    """(c0, cq, cv) of f1*f2; fails when both factors carry log parts."""
    if not f1.is_const() and not f2.is_const():
        raise StructureError("zero-mode commutator with a log-squared part")
    if f1.is_const():
        c, f = f1.c0, f2
    else:
        c, f = f2.c0, f1
    return f.scale(c)


# ---------------------------------------------------------------------------
# the commutator table

class CommutatorTable:
    """Kernels [g_n, g'_m] = K(n) delta_{n+m,0} and zero-mode constants."""

    def __init__(self, ctx: ParameterContext):
        self.ctx = ctx
        self.derived: dict = {}

    # -- base oscillators -----------------------------------------------------

    def kernel(self, g1: GeneratorId, g2: GeneratorId) -> ModeCoefficient:
        ctx = self.ctx
        if g1.family == "a" and g2.family == "a":
            aij = ctx.cartan(g1.i, g2.i)
            if aij == 0:
                return ModeCoefficient()
            return mc_bracket(ctx.kh) * mc_bracket(aij) * mc_n(-1)
        if g1.family == "b" and g2.family == "b":
            if (g1.i, g1.j) != (g2.i, g2.j):
                return ModeCoefficient()
            return -(mc_bracket(1) * mc_bracket(1) * mc_n(-1))
        if g1.family == "c" and g2.family == "c":
            if (g1.i, g1.j) != (g2.i, g2.j):
                return ModeCoefficient()
            return mc_bracket(1) * mc_bracket(1) * mc_n(-1)
        return ModeCoefficient()

    def zbracket(self, z1: GeneratorId, z2: GeneratorId) -> Fraction:
        ctx = self.ctx
        fam = (z1.family, z2.family)
        if fam == ("pa", "qa"):
            return Fraction(ctx.cartan(z1.i, z2.i) * ctx.kh)
        if fam == ("qa", "pa"):
            return -self.zbracket(z2, z1)
        if fam == ("pb", "qb"):
            return Fraction(-1) if (z1.i, z1.j) == (z2.i, z2.j) else _F0
        if fam == ("qb", "pb"):
            return -self.zbracket(z2, z1)
        if fam == ("pc", "qc"):
            return Fraction(1) if (z1.i, z1.j) == (z2.i, z2.j) else _F0
        if fam == ("qc", "pc"):
            return -self.zbracket(z2, z1)
        if fam == ("qh", "ph"):
            return Fraction(ctx.cartan(z1.i, z2.i), 2)
        if fam == ("ph", "qh"):
            return -self.zbracket(z2, z1)
        return _F0

    # -- derived generators ---------------------------------------------------

    def derived_generator(self, name: str, ann_combo: list,
                          cre_combo: Optional[list] = None) -> str:
        """Register d with d_n = sum c_g(n) g_n (n>0 branch) and
        d_{-n} = sum c'_g(n) g_{-n}; base constituents only."""
        for g, _ in ann_combo + (cre_combo or []):
            if not (g.is_oscillator() and g.valid_for(self.ctx)):
                raise StructureError(f"unknown constituent {g}")
        self.derived[name] = (ann_combo, cre_combo or ann_combo)
        return name

    def _resolve(self, d, branch: str) -> list:
        if isinstance(d, GeneratorId):
            return [(d, ModeCoefficient.const(1))]
        ann, cre = self.derived[d]
        return ann if branch == "ann" else cre

    def pair_ann_cre(self, d1, d2) -> ModeCoefficient:
        """[d1_n, d2_{-n}] as a function of n > 0."""
        out = ModeCoefficient()
        for g1, c1 in self._resolve(d1, "ann"):
            for g2, c2 in self._resolve(d2, "cre"):
                K = self.kernel(g1, g2)
                if K.is_strictly_zero():
                    continue
                out = out + c1 * c2 * K
        return out

    def pair_cre_ann(self, d1, d2) -> ModeCoefficient:
        """[d1_{-n}, d2_n] as a function of n > 0."""
        out = ModeCoefficient()
        for g1, c1 in self._resolve(d1, "cre"):
            for g2, c2 in self._resolve(d2, "ann"):
                K = self.kernel(g1, g2).reflect()
                if K.is_strictly_zero():
                    continue
                out = out + c1 * c2 * K
        return out

    def check_antisymmetry(self, g1: GeneratorId, g2: GeneratorId) -> bool:
        """kernel(g1,g2)(n) = -kernel(g2,g1)(-n)."""
        return self.kernel(g1, g2) == -(self.kernel(g2, g1).reflect())


def verify_cartan_inverse(N: int, i: int, j: int):
    """sum_l [a_il n][min(l,j)n][(N-max(l,j))n] / ([Nn][n]^2) = delta_ij,
    exactly in y = q^n.  Returns (ok, residual coefficient)."""
    def cart(x, y):
        return 2 if x == y else (-1 if abs(x - y) == 1 else 0)
    total = ModeCoefficient()
    inv = mc_inv_bracket(N) * mc_inv_bracket(1) * mc_inv_bracket(1)
    for l in range(1, N):
        a_il = cart(i, l)
        if a_il == 0:
            continue
        term = (mc_bracket(a_il) * mc_bracket(min(l, j))
                * mc_bracket(N - max(l, j)) * inv)
        total = total + term
    want = ModeCoefficient.const(1 if i == j else 0)
    residual = total - want
    return residual.is_zero(), residual


def zero_mode_exchange(w1: dict, w2: dict, table: CommutatorTable):
    """exp(X) exp(Y) = exp([X,Y]) exp(Y) exp(X) for zero-mode words.

    Words map GeneratorId -> LogForm.  Returns (qres, monos) with the
    exchange scalar q^qres * prod v^monos[v]; a nonzero constant part
    (which would be a non-monomial factor e^c) is a structural error.
    """
    c0, cq = _F0, _F0
    cv: dict = {}
    for z1, f1 in w1.items():
        for z2, f2 in w2.items():
            br = table.zbracket(z1, z2)
            if not br:
                continue
            prod = _logform_product(f1, f2).scale(br)
            c0 += prod.c0
            cq += prod.cq
            for v, e in prod.cv.items():
                cv[v] = cv.get(v, _F0) + e
    if c0:
        raise StructureError(f"non-monomial zero-mode exchange e^{c0}")
    return cq, {v: e for v, e in cv.items() if e}


def kernel_pairing(cA: ModeCoefficient, cB: ModeCoefficient,
                   kernel: ModeCoefficient) -> ModeCoefficient:
    """The Wick pairing coefficient cA(n) * kernel(n) * cB(n), n > 0.

    The caller passes cB already on the creation branch; the result must be
    log-type, which log_atoms() will enforce at exponentiation time.
    """
    return cA * kernel * cB
