"""Rational functions of one variable in partial-fraction normal form.

A RatZ is a sparse sum  sum c_{a,m} (z-a)^m  with exact pole locations a in
the field tower, m in Z, and m >= 0 only for a = 0 (the polynomial part is
written in powers of z).  This basis makes products, residues, derivatives,
affine substitutions and Laurent expansions exact and cheap.  Coefficients are
FieldElem or ConstVal (mixed freely via operator dispatch).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .field import FieldElem, fe

__all__ = ["RatZ", "rz_zero", "rz_one", "rz_mono", "rz_const", "rz_var"]


def _binom(k, j):
    """Generalized binomial C(k, j) for integer k (possibly negative), j >= 0."""
    num = 1
    for i in range(j):
        num *= (k - i)
    den = 1
    for i in range(2, j + 1):
        den *= i
    return Fraction(num, den)


class RatZ:
    """Immutable partial-fraction rational function."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = c
        self._hash = None

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def const(c) -> "RatZ":
        c = fe(c) if isinstance(c, (int, Fraction)) else c
        return RatZ({(fe(0), 0): c})

    @staticmethod
    def mono(a, m: int, coeff=1) -> "RatZ":
        """coeff * (z - a)^m, re-expanded into the basis when needed."""
        a = fe(a)
        coeff = fe(coeff) if isinstance(coeff, (int, Fraction)) else coeff
        if m >= 0 and not a.is_zero():
            out = {}
            for i in range(m + 1):
                c = _binom(m, i) * ((-a) ** (m - i))
                key = (fe(0), i)
                out[key] = out.get(key, 0) + c * coeff
            return RatZ(out)
        return RatZ({(a, m): coeff})

    # -- basics ------------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self):
        return all(k == (fe(0), 0) for k in self.terms)

    def const_value(self):
        if not self.terms:
            return fe(0)
        if not self.is_const():
            raise ValueError("not constant: %s" % (self,))
        return self.terms[(fe(0), 0)]

    def __eq__(self, other):
        if not isinstance(other, RatZ):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(not (c - other.terms[k]) for k, c in self.terms.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset((k, _h(c)) for k, c in self.terms.items()))
        return self._hash

    # -- ring ops ----------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            other = RatZ.const(other)
        if not isinstance(other, RatZ):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            nc = out.get(k)
            nc = c if nc is None else nc + c
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
        return RatZ(out)

    __radd__ = __add__

    def __neg__(self):
        return RatZ({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            other = RatZ.const(other)
        if not isinstance(other, RatZ):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if not c:
            return RatZ()
        return RatZ({k: cc * c for k, cc in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            return self.scale(fe(other) if isinstance(other, (int, Fraction)) else other)
        if not isinstance(other, RatZ):
            return NotImplemented
        out = {}
        for (a, m), ca in self.terms.items():
            for (b, n), cb in other.terms.items():
                c = ca * cb
                if not c:
                    continue
                for (p, k), w in _basis_mul(a, m, b, n).terms.items():
                    nc = out.get((p, k))
                    add = w * c
                    nc = add if nc is None else nc + add
                    if nc:
                        out[(p, k)] = nc
                    else:
                        out.pop((p, k), None)
        return RatZ(out)

    __rmul__ = __mul__

    # -- calculus -----------------------------------------------------------------

    def deriv(self) -> "RatZ":
        out = {}
        for (a, m), c in self.terms.items():
            if m == 0:
                continue
            key = (a, m - 1)
            nc = out.get(key)
            add = c * m
            nc = add if nc is None else nc + add
            if nc:
                out[key] = nc
        return RatZ(out)

    def residue_at(self, a) -> object:
        a = fe(a)
        return self.terms.get((a, -1), fe(0))

    def poles(self):
        return sorted({a for (a, m) in self.terms if m < 0},
                      key=lambda x: str(x))

    def has_pole_at(self, a) -> bool:
        a = fe(a)
        return any(p == a and m < 0 for (p, m) in self.terms)

    def pole_order(self, a) -> int:
        a = fe(a)
        return -min((m for (p, m) in self.terms if p == a and m < 0), default=0)

    def eval_at(self, p):
        """Exact value at z = p; raises on a pole."""
        p = fe(p)
        total = fe(0)
        for (a, m), c in self.terms.items():
            base = p - a
            if base.is_zero():
                if m < 0:
                    raise ZeroDivisionError("pole at %s" % (p,))
                total = total + (c if m == 0 else fe(0))
                continue
            total = total + c * (base ** m)
        return total

    def subs_translate(self, b) -> "RatZ":
        """z -> z + b."""
        b = fe(b)
        if b.is_zero():
            return self
        out = RatZ()
        for (a, m), c in self.terms.items():
            out = out + RatZ.mono(a - b, m, c)
        return out

    def subs_scale(self, s) -> "RatZ":
        """z -> s*z (s != 0)."""
        s = fe(s)
        out = RatZ()
        for (a, m), c in self.terms.items():
            out = out + RatZ.mono(a / s, m, c * (s ** m))
        return out

    def subs_invert(self) -> "RatZ":
        """z -> 1/z."""
        out = RatZ()
        for (a, m), c in self.terms.items():
            if a.is_zero():
                out = out + RatZ({(fe(0), -m): c})
            else:
                # (1/z - a)^m = (-a)^m z^{-m} (z - 1/a)^m
                piece = RatZ({(fe(0), -m): c * ((-a) ** m)})
                out = out + piece * RatZ.mono(fe(1) / a, m)
        return out

    def laurent_at(self, a, order: int):
        """dict m -> coeff of (z-a)^m for m <= order (exact truncation)."""
        a = fe(a)
        out = {}
        for (b, k), c in self.terms.items():
            if b == a:
                if k <= order:
                    out[k] = out.get(k, 0) + c
                continue
            base = a - b  # (z-b) = (z-a) + (a-b)
            if k >= 0:
                for j in range(min(k, order) + 1):
                    out[j] = out.get(j, 0) + c * _binom(k, j) * (base ** (k - j))
            else:
                for j in range(0, order + 1):
                    out[j] = out.get(j, 0) + c * _binom(k, j) * (base ** (k - j))
        return {m: c for m, c in out.items() if c}

    def laurent_at_inf(self, order: int):
        """Coefficients of u^m (u = 1/z) for m <= order."""
        out = {}
        for (b, k), c in self.terms.items():
            if b.is_zero():
                if -k <= order:
                    out[-k] = out.get(-k, 0) + c
                continue
            # (z-b)^k = u^{-k} (1 - b u)^k
            for j in range(0, order + k + 1):
                m = j - k
                if m > order:
                    break
                out[m] = out.get(m, 0) + c * _binom(k, j) * ((-b) ** j)
        return {m: c for m, c in out.items() if c}

    def min_pole_key(self):
        return min(((a, m) for (a, m) in self.terms if m < 0),
                   default=None, key=lambda km: km[1])

    def __repr__(self):
        if not self.terms:
            return "RatZ(0)"
        bits = []
        for (a, m) in sorted(self.terms, key=lambda k: (str(k[0]), k[1])):
            c = self.terms[(a, m)]
            if m == 0:
                bits.append("(%s)" % (c,))
            elif a.is_zero():
                bits.append("(%s)*z^%d" % (c, m))
            else:
                bits.append("(%s)*(z-(%s))^%d" % (c, a, m))
        return " + ".join(bits)


def _h(c):
    return c


@lru_cache(maxsize=None)
def _basis_mul(a: FieldElem, m: int, b: FieldElem, n: int) -> RatZ:
    """(z-a)^m * (z-b)^n in the basis (coefficients FieldElem)."""
    if m == 0:
        return RatZ({(b, n): fe(1)})
    if n == 0:
        return RatZ({(a, m): fe(1)})
    if a == b:
        return RatZ.mono(a, m + n) if (m + n >= 0 and not a.is_zero()) \
            else RatZ({(a, m + n): fe(1)})
    if m >= 0 and n >= 0:
        # both a, b = 0 handled above; positive powers only exist at pole 0
        return RatZ.mono(a, m) * RatZ.mono(b, n)  # pragma: no cover
    if m >= 0:
        return _poly_times_pole(a, m, b, n)
    if n >= 0:
        return _poly_times_pole(b, n, a, m)
    # both negative, distinct poles: pf recursion
    inv = fe(1) / (a - b)
    return (_basis_mul(a, m, b, n + 1) - _basis_mul(a, m + 1, b, n)).scale(inv)


def _poly_times_pole(a: FieldElem, m: int, b: FieldElem, n: int) -> RatZ:
    """z^m-style (a=0, m>=0) times (z-b)^n (n<0)."""
    assert a.is_zero() and m >= 0 and n < 0
    if b.is_zero():
        k = m + n
        return RatZ.mono(fe(0), k) if k >= 0 else RatZ({(fe(0), k): fe(1)})
    # z^m = ((z-b) + b)^m
    out = RatZ()
    for j in range(m + 1):
        c = _binom(m, j) * (b ** (m - j))
        k = j + n
        if k < 0:
            out = out + RatZ({(b, k): c})
        else:
            out = out + RatZ.mono(b, k, c)
    return out


def rz_zero() -> RatZ:
    return RatZ()


def rz_one() -> RatZ:
    return RatZ.const(1)


def rz_const(c) -> RatZ:
    return RatZ.const(c)


def rz_var() -> RatZ:
    return RatZ({(fe(0), 1): fe(1)})


def rz_mono(a, m, coeff=1) -> RatZ:
    return RatZ.mono(a, m, coeff)
