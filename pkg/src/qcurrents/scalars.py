"""Exact coefficient arithmetic for the free-field engine.

Everything downstream is linear algebra over the field Q(q).  Because the
currents live at arguments like q^(k/2+j-1) z with k odd, contraction
exponents pick up half-integer multiples of the mode index, so internally we
work in Q(t) with t = q^(1/2); all public q-exponents are Fractions with
denominator dividing 2.

A Scalar is a fraction num/den where num is a sparse Laurent polynomial in t
with rational coefficients and den is a multiset of *factored* denominators,
mostly binomials (1 - t^m).  Keeping the denominator factored means the
cancellations that dominate this computation (q-brackets against geometric
denominators) reduce to exact polynomial division by a binomial, which is
linear-time, and no general gcd is ever required.  Equality goes through a
modular fingerprint (cheap, value-determined) confirmed by an exact
cross-multiplied subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath
from gmpy2 import mpq

_FPP = (1 << 61) - 1          # Mersenne prime for fingerprints
_FPT = 1220703125212890625 % _FPP   # fixed generic evaluation point t0


# ---------------------------------------------------------------------------
# sparse Laurent polynomials in t:  dict exponent -> mpq (no zero values)

def _lp_add(a: dict, b: dict) -> dict:
    if len(b) > len(a):
        a, b = b, a
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _lp_neg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def _lp_mul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(b) > len(a):
        a, b = b, a
    out: dict = {}
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = ea + eb
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _lp_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {e: v * c for e, v in a.items()}


def _lp_tshift(a: dict, s: int) -> dict:
    return {e + s: c for e, c in a.items()} if s else dict(a)


def _lp_div_exact(a: dict, b: dict) -> Optional[dict]:
    """Exact Laurent division a/b, or None when the division has a remainder."""
    if not a:
        return {}
    eb = max(b)
    cb = b[eb]
    btail = [(e, c) for e, c in b.items() if e != eb]
    # quotient exponents lie in [min(a)-min(b), max(a)-max(b)] when exact
    dfloor = min(a) - min(b)
    rem = dict(a)
    quo: dict = {}
    while rem:
        er = max(rem)
        d = er - eb
        if d < dfloor:
            return None
        c = rem.pop(er) / cb
        quo[d] = quo.get(d, 0) + c
        for et, ct in btail:
            e = d + et
            s = rem.get(e, 0) - c * ct
            if s:
                rem[e] = s
            else:
                rem.pop(e, None)
    return quo


def _lp_eval_mod(a: dict) -> int:
    v = 0
    for e, c in a.items():
        ci = (int(c.numerator) * pow(int(c.denominator), -1, _FPP)) % _FPP
        v = (v + ci * pow(_FPT, e, _FPP)) % _FPP
    return v


def _factor_poly(key) -> dict:
    if key[0] == "B":
        return {0: mpq(1), key[1]: mpq(-1)}
    return {e: mpq(n, d) for e, n, d in key[1]}


def _factor_eval_mod(key) -> int:
    if key[0] == "B":
        return (1 - pow(_FPT, key[1], _FPP)) % _FPP
    return _lp_eval_mod(_factor_poly(key))


class Scalar:
    """An element of Q(t), t = q^(1/2), with factored denominator."""

    __slots__ = ("num", "den", "_fp")

    def __init__(self, num: dict, den: tuple = (), normalized: bool = False):
        if not num:
            den = ()
        elif den and not normalized:
            num, den = _cancel(num, den)
        self.num = num
        self.den = den
        self._fp = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_fraction(x) -> "Scalar":
        q = mpq(x.numerator, x.denominator) if isinstance(x, Fraction) else mpq(x)
        return Scalar({0: q} if q else {})

    @staticmethod
    def tpow(e: int, coef=1) -> "Scalar":
        c = mpq(coef.numerator, coef.denominator) if isinstance(coef, Fraction) else mpq(coef)
        return Scalar({e: c} if c else {})

    @staticmethod
    def qpow(a) -> "Scalar":
        """q^a for a rational a with denominator dividing 2."""
        a = Fraction(a)
        e = 2 * a
        if e.denominator != 1:
            raise ValueError(f"q-exponent {a} not in (1/2)Z")
        return Scalar.tpow(int(e))

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return not self.den and self.num == {0: 1}

    def as_integer(self) -> Optional[int]:
        """The value as a plain integer when it is one, else None."""
        if not self.num:
            return 0
        if self.den or len(self.num) != 1 or 0 not in self.num:
            return None
        c = self.num[0]
        return int(c) if c.denominator == 1 else None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return Scalar(_lp_add(self.num, other.num), self.den)
        an, bn, den = _common_den(self, other)
        return Scalar(_lp_add(an, bn), den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return Scalar(_lp_add(self.num, _lp_neg(other.num)), self.den)
        an, bn, den = _common_den(self, other)
        return Scalar(_lp_add(an, _lp_neg(bn)), den)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Scalar(_lp_neg(self.num), self.den, normalized=True)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return _ZERO
        den = _merge_dens(self.den, other.den)
        return Scalar(_lp_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return _ONE
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("division by zero Scalar")
        num: dict = {0: mpq(1)}
        for key, mult in self.den:
            f = _factor_poly(key)
            for _ in range(mult):
                num = _lp_mul(num, f)
        den_counter: dict = {}
        rest = self.num
        # peel unit monomial content, then classify what remains
        emin = min(rest)
        if len(rest) == 1:
            num = _lp_scale(_lp_tshift(num, -emin), 1 / rest[emin])
            return Scalar(num, ())
        c0 = rest[emin]
        num = _lp_scale(_lp_tshift(num, -emin), 1 / c0)
        rest = {e - emin: c / c0 for e, c in rest.items()}  # now rest(0) = 1
        if len(rest) == 2:
            m = max(rest)
            cm = rest[m]
            if cm == -1:                      # 1 - t^m
                den_counter[("B", m)] = 1
                return Scalar(num, _den_tuple(den_counter))
            if cm == 1:                       # 1 + t^m = (1-t^2m)/(1-t^m)
                num = _lp_mul(num, {0: mpq(1), m: mpq(-1)})
                den_counter[("B", 2 * m)] = 1
                return Scalar(num, _den_tuple(den_counter))
        key = ("G", tuple(sorted((e, int(c.numerator), int(c.denominator))
                                 for e, c in rest.items())))
        den_counter[key] = 1
        return Scalar(num, _den_tuple(den_counter))

    # -- equality / hashing -------------------------------------------------

    def fingerprint(self) -> int:
        if self._fp is None:
            n = _lp_eval_mod(self.num)
            d = 1
            for key, mult in self.den:
                d = (d * pow(_factor_eval_mod(key), mult, _FPP)) % _FPP
            if d == 0:
                raise ArithmeticError("fingerprint point hit a denominator zero")
            self._fp = (n * pow(d, -1, _FPP)) % _FPP
        return self._fp

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.fingerprint() != other.fingerprint():
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash(("Scalar", self.fingerprint()))

    # -- numerics / display -------------------------------------------------

    def evaluate(self, q0, dps: int = 50):
        """Numeric value at q = q0 (|q0| < 1 recommended)."""
        with mpmath.workdps(dps + 10):
            t = mpmath.sqrt(mpmath.mpmathify(q0))
            if t == 0:
                raise ZeroDivisionError("q0 = 0 not supported")
            n = mpmath.mpf(0)
            for e, c in self.num.items():
                n += mpmath.mpf(int(c.numerator)) / int(c.denominator) * t ** e
            d = mpmath.mpf(1)
            for key, mult in self.den:
                f = mpmath.mpf(0)
                for e, c in _factor_poly(key).items():
                    f += mpmath.mpf(int(c.numerator)) / int(c.denominator) * t ** e
                d *= f ** mult
            if d == 0:
                raise ZeroDivisionError("pole at q0")
            v = n / d
        return +v

    def __repr__(self):
        if not self.num:
            return "Scalar(0)"
        terms = []
        for e in sorted(self.num):
            c = self.num[e]
            if e == 0:
                terms.append(f"{c}")
            elif e % 2 == 0:
                terms.append(f"{c}*q^{e // 2}" if c != 1 else f"q^{e // 2}")
            else:
                terms.append(f"{c}*q^({e}/2)" if c != 1 else f"q^({e}/2)")
        s = " + ".join(terms)
        if self.den:
            dfs = []
            for key, mult in self.den:
                base = f"(1-q^({key[1]}/2))" if key[0] == "B" else f"G{key[1]}"
                dfs.append(base + (f"^{mult}" if mult > 1 else ""))
            s = f"({s})/({'*'.join(dfs)})"
        return f"Scalar[{s}]"


def _coerce(x) -> Union[Scalar, type(NotImplemented)]:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(mpq(1)):
        return Scalar.from_fraction(x)
    return NotImplemented


def _den_tuple(counter: dict) -> tuple:
    return tuple(sorted(counter.items()))


def _merge_dens(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    c = dict(a)
    for k, m in b:
        c[k] = c.get(k, 0) + m
    return _den_tuple(c)


def _cancel(num: dict, den: tuple):
    counter = dict(den)
    for key in list(counter):
        f = _factor_poly(key)
        while counter.get(key, 0) > 0:
            q = _lp_div_exact(num, f)
            if q is None:
                break
            num = q
            counter[key] -= 1
            if not counter[key]:
                del counter[key]
    return num, _den_tuple(counter)


def _common_den(a: Scalar, b: Scalar):
    merged = dict(a.den)
    for k, m in b.den:
        if merged.get(k, 0) < m:
            merged[k] = m
    an, bn = a.num, b.num
    for k, m in merged.items():
        f = _factor_poly(k)
        da = m - dict(a.den).get(k, 0)
        db = m - dict(b.den).get(k, 0)
        for _ in range(da):
            an = _lp_mul(an, f)
        for _ in range(db):
            bn = _lp_mul(bn, f)
    return an, bn, _den_tuple(merged)


_ZERO = Scalar({})
_ONE = Scalar({0: mpq(1)})


# ---------------------------------------------------------------------------
# module-level field helpers

def scalar(x) -> Scalar:
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot coerce {x!r} to Scalar")
    return s


def qpow(a) -> Scalar:
    return Scalar.qpow(a)


def qint(n: int) -> Scalar:
    """[n] = (q^n - q^-n)/(q - q^-1)."""
    if n == 0:
        return _ZERO
    s = _ONE if n > 0 else -_ONE
    n = abs(n)
    # (t^2n - t^-2n)/(t^2 - t^-2) = t^(-2n+2) (1-t^4n)/(1-t^4)
    num = _lp_div_exact({0: mpq(1), 4 * n: mpq(-1)}, {0: mpq(1), 4: mpq(-1)})
    return s * Scalar(_lp_tshift(num, -2 * n + 2))


def qnum(n: int) -> Scalar:
    """q^n - q^-n, the bracket without its [1] normalization."""
    return qpow(n) - qpow(-n)


# ---------------------------------------------------------------------------
# exponents linear in the elliptic parameters

class E:
    """A q-exponent a0 + cr*r + crs*r*, with the symbolic split retained.

    Comparisons that feed canonical forms use the concrete value; the (cr,
    crs) tags exist so the p -> 0 limit can classify atoms even though r is a
    concrete integer in any given context.
    """

    __slots__ = ("a0", "cr", "crs", "conc")

    def __init__(self, a0, cr=0, crs=0, _conc=None):
        self.a0 = Fraction(a0)
        self.cr = Fraction(cr)
        self.crs = Fraction(crs)
        self.conc = _conc if _conc is not None else self.a0

    @staticmethod
    def make(a0, cr, crs, r: int, rs: int) -> "E":
        a0, cr, crs = Fraction(a0), Fraction(cr), Fraction(crs)
        return E(a0, cr, crs, a0 + cr * r + crs * rs)

    @staticmethod
    def plain(x) -> "E":
        return E(Fraction(x))

    def __add__(self, o):
        o = o if isinstance(o, E) else E.plain(o)
        return E(self.a0 + o.a0, self.cr + o.cr, self.crs + o.crs,
                 self.conc + o.conc)

    __radd__ = __add__

    def __sub__(self, o):
        o = o if isinstance(o, E) else E.plain(o)
        return E(self.a0 - o.a0, self.cr - o.cr, self.crs - o.crs,
                 self.conc - o.conc)

    def __rsub__(self, o):
        return E.plain(o) - self

    def __neg__(self):
        return E(-self.a0, -self.cr, -self.crs, -self.conc)

    def __mul__(self, c):
        c = Fraction(c)
        return E(self.a0 * c, self.cr * c, self.crs * c, self.conc * c)

    __rmul__ = __mul__

    def key(self):
        return (self.a0, self.cr, self.crs)

    def sortkey(self):
        return (self.conc, self.a0, self.cr, self.crs)

    def __eq__(self, o):
        if not isinstance(o, E):
            o = E.plain(o)
        return self.key() == o.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, o):
        o = o if isinstance(o, E) else E.plain(o)
        return self.sortkey() < o.sortkey()

    def __le__(self, o):
        o = o if isinstance(o, E) else E.plain(o)
        return self.sortkey() <= o.sortkey()

    def __gt__(self, o):
        return not self <= o

    def __ge__(self, o):
        return not self < o

    def is_plain(self) -> bool:
        return self.cr == 0 and self.crs == 0

    def concretize(self) -> "E":
        return E(self.conc, 0, 0, self.conc)

    def __repr__(self):
        parts = []
        if self.a0 or not (self.cr or self.crs):
            parts.append(str(self.a0))
        if self.cr:
            parts.append(f"{self.cr}r")
        if self.crs:
            parts.append(f"{self.crs}r*")
        return "+".join(parts).replace("+-", "-")


# ---------------------------------------------------------------------------
# parameter regime

@dataclass(frozen=True)
class ParameterContext:
    """The discrete parameters every construction is instantiated at."""

    N: int = 2
    k: int = 1
    r: int = 3
    lam: tuple = (1,)
    T: int = 12
    backend: str = "exact"
    q0: str = "0.31"
    dps: int = 50

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.k < 1:
            raise ValueError("level k must be a positive integer")
        if self.r - self.k < 1:
            raise ValueError("need r > k so that r* = r - k > 0")
        if len(self.lam) != self.N - 1 or any(x < 0 for x in self.lam):
            raise ValueError("lambda must be N-1 nonnegative integers")
        if self.T < 1:
            raise ValueError("truncation order T must be >= 1")
        if self.backend not in ("exact", "numeric"):
            raise ValueError("backend must be 'exact' or 'numeric'")

    @property
    def h_vee(self) -> int:
        return self.N

    @property
    def r_star(self) -> int:
        return self.r - self.k

    @property
    def kh(self) -> int:
        """k + h_vee, the level-shifted dual Coxeter number."""
        return self.k + self.N

    def cartan(self, i: int, j: int) -> int:
        if not (1 <= i <= self.N - 1 and 1 <= j <= self.N - 1):
            raise IndexError(f"Cartan index out of range: ({i},{j})")
        if i == j:
            return 2
        if abs(i - j) == 1:
            return -1
        return 0

    # exponent factories carrying the r/r* tags
    def e(self, a0=0, cr=0, crs=0) -> E:
        return E.make(a0, cr, crs, self.r, self.r_star)

    def er(self, mult=1) -> E:
        return E.make(0, mult, 0, self.r, self.r_star)

    def ers(self, mult=1) -> E:
        return E.make(0, 0, mult, self.r, self.r_star)

    def numeric_q(self):
        return mpmath.mpf(self.q0)

    def tol(self):
        return mpmath.mpf("1e-10")
