"""Two-variable rational coefficients in partial-fraction normal form:

    sum over (beta, m) of  (z - beta(zbar))^m * r(zbar)

with beta an Flt in zbar, m < 0 unless beta == 0 (z-powers), and r a RatZ in
zbar over ConstVal/FieldElem.  Products of distinct pole factors split through
the FLT difference factorization, which may extend the field tower.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .field import FieldElem, fe
from .flt import Flt, compose, const_flt, difference_factor
from .ratz import RatZ, rz_mono

__all__ = ["RatFunc", "ZFLT", "flt_to_ratz", "flt_recip_ratz", "rf_const",
           "rf_pole", "rf_zbar", "flt_translate", "flt_scale_arg"]

ZFLT = const_flt(fe(0))


@lru_cache(maxsize=None)
def flt_to_ratz(b: Flt) -> RatZ:
    """beta(zbar) as a RatZ in zbar (error for the constant infinity)."""
    a, bb, c, d = b.a, b.b, b.c, b.d
    if c.is_zero():
        if d.is_zero():
            raise ZeroDivisionError("FLT with identically infinite value")
        out = RatZ.const(bb / d)
        if not a.is_zero():
            out = out + rz_mono(0, 1, a / d)
        return out
    # (a t + b)/(c t + d) = a/c + (bc - ad)/c^2 * 1/(t + d/c)
    out = RatZ.const(a / c)
    num = (bb * c - a * d) / (c * c)
    if not num.is_zero():
        out = out + rz_mono(-d / c, -1, num)
    return out


@lru_cache(maxsize=None)
def flt_recip_ratz(b: Flt) -> RatZ:
    """1/beta(zbar) as a RatZ (beta not identically zero)."""
    if b.is_zero_const():
        raise ZeroDivisionError("reciprocal of the zero FLT")
    return flt_to_ratz(Flt(b.c, b.d, b.a, b.b))


@lru_cache(maxsize=None)
def _flt_pow(b: Flt, k: int) -> RatZ:
    """beta(zbar)^k as a RatZ (k any integer)."""
    if k == 0:
        return RatZ.const(1)
    base = flt_to_ratz(b) if k > 0 else flt_recip_ratz(b)
    out = base
    for _ in range(abs(k) - 1):
        out = out * base
    return out


def flt_translate(b: Flt, shift: FieldElem) -> Flt:
    """t -> t + shift composed into beta: beta(t + shift)."""
    return compose(b, Flt(fe(1), shift, fe(0), fe(1)))


def flt_scale_arg(b: Flt, s: FieldElem) -> Flt:
    """beta(s*t)."""
    return compose(b, Flt(s, fe(0), fe(0), fe(1)))


def flt_sub_const(b: Flt, a) -> Flt:
    """beta(t) - a as an Flt."""
    a = fe(a)
    return Flt(b.a - a * b.c, b.b - a * b.d, b.c, b.d)


@lru_cache(maxsize=None)
def _recip_diff(b1: Flt, b2: Flt) -> RatZ:
    """1/(b1(zbar) - b2(zbar)) as a RatZ in zbar."""
    f3, f4 = difference_factor(b1, b2)
    if f3.is_zero_const():
        raise ZeroDivisionError("reciprocal of identically zero difference")
    return flt_recip_ratz(f3) * flt_recip_ratz(f4)


class RatFunc:
    """Canonical sum of (z - beta)^m with RatZ-in-zbar coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, r in terms.items():
                if r:
                    self.terms[k] = r
        self._hash = None

    @staticmethod
    def const(c) -> "RatFunc":
        return RatFunc({(ZFLT, 0): RatZ.const(c)})

    @staticmethod
    def from_zbar(r: RatZ) -> "RatFunc":
        return RatFunc({(ZFLT, 0): r})

    @staticmethod
    def pole(b: Flt, m: int, coeff=None) -> "RatFunc":
        """(z - beta)^m * coeff(zbar), normalized into the basis."""
        coeff = RatZ.const(1) if coeff is None else coeff
        if b.is_constant() and not b.is_zero_const():
            # constant nonzero pole location: keep (z - c)^m with c-as-flt for
            # m < 0, expand for m >= 0
            if m >= 0:
                out = RatFunc()
                c = b.const_value()
                for i in range(m + 1):
                    out = out + RatFunc(
                        {(ZFLT, i): coeff.scale(fe(_binom_int(m, i)) * ((-c) ** (m - i)))})
                return out
            return RatFunc({(b, m): coeff})
        if b.is_zero_const():
            return RatFunc({(ZFLT, m): coeff})
        if m >= 0:
            # (z - beta)^m expands into z-powers with rational zbar coefficients
            out = RatFunc()
            for i in range(m + 1):
                fac = _flt_pow(b, m - i).scale(fe(_binom_int(m, i) * (-1) ** (m - i)))
                out = out + RatFunc({(ZFLT, i): coeff * fac})
            return out
        return RatFunc({(b, m): coeff})

    # -- basics ---------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and \
            all(r == other.terms[k] for k, r in self.terms.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        out = dict(self.terms)
        for k, r in other.terms.items():
            nr = out.get(k)
            nr = r if nr is None else nr + r
            if nr:
                out[k] = nr
            else:
                out.pop(k, None)
        return RatFunc(out)

    def __neg__(self):
        return RatFunc({k: -r for k, r in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RatFunc":
        if not c:
            return RatFunc()
        return RatFunc({k: r.scale(c) for k, r in self.terms.items()})

    def scale_zbar(self, r: RatZ) -> "RatFunc":
        if not r:
            return RatFunc()
        return RatFunc({k: rr * r for k, rr in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        out = RatFunc()
        for (b1, m1), r1 in self.terms.items():
            for (b2, m2), r2 in other.terms.items():
                piece = _zmul(b1, m1, b2, m2)
                out = out + piece.scale_zbar(r1 * r2)
        return out

    # -- calculus -----------------------------------------------------------------

    def d_z(self) -> "RatFunc":
        out = {}
        for (b, m), r in self.terms.items():
            if m == 0:
                continue
            key = (b, m - 1) if m - 1 != 0 else (ZFLT, 0)
            add = r.scale(fe(m))
            nr = out.get(key)
            nr = add if nr is None else nr + add
            if nr:
                out[key] = nr
            else:
                out.pop(key, None)
        return RatFunc(out)

    def d_zbar(self) -> "RatFunc":
        out = RatFunc()
        for (b, m), r in self.terms.items():
            dr = r.deriv()
            if dr:
                out = out + RatFunc({(b, m): dr})
            if m != 0 and not b.is_constant():
                det = b.det()
                dbeta = rz_mono(-b.d / b.c, -2, det / (b.c * b.c)) if not b.c.is_zero() \
                    else RatZ.const(b.a / b.d)
                out = out + RatFunc.pole(b, m - 1, r * dbeta.scale(fe(-m)))
        return out

    def subs_z0(self) -> RatZ:
        """Regularized substitution z = 0: (z-beta)^m -> (-beta)^m."""
        out = RatZ()
        for (b, m), r in self.terms.items():
            if b.is_zero_const():
                if m == 0:
                    out = out + r
                elif m < 0:
                    raise ZeroDivisionError("pole at z = 0 in substitution")
                continue
            out = out + r * _flt_pow(b, m).scale(fe((-1) ** m))
        return out

    def translate(self, a: FieldElem, abar: FieldElem) -> "RatFunc":
        """(z, zbar) -> (z + a, zbar + abar)."""
        out = RatFunc()
        for (b, m), r in self.terms.items():
            nb = flt_sub_const(flt_translate(b, abar), a)
            out = out + RatFunc.pole(nb, m, r.subs_translate(abar))
        return out

    def poles_flt(self):
        return sorted({b for (b, m) in self.terms if m < 0 and not b.is_constant()},
                      key=str)

    def const_poles(self):
        out = set()
        for (b, m), r in self.terms.items():
            if m < 0 and b.is_constant():
                out.add(b.const_value())
        return out

    def zbar_poles(self):
        out = set()
        for r in self.terms.values():
            out.update(r.poles())
        return out

    def is_const(self):
        return all(k == (ZFLT, 0) and r.is_const() for k, r in self.terms.items())

    def const_value(self):
        if not self.terms:
            return fe(0)
        [(k, r)] = self.terms.items()
        if k != (ZFLT, 0):
            raise ValueError("not constant")
        return r.const_value()

    def __repr__(self):
        if not self.terms:
            return "RF(0)"
        bits = []
        for (b, m), r in sorted(self.terms.items(), key=lambda kv: str(kv[0])):
            if (b, m) == (ZFLT, 0):
                bits.append("(%r)" % (r,))
            elif b.is_zero_const():
                bits.append("(%r)*z^%d" % (r, m))
            else:
                bits.append("(%r)*(z-%s)^%d" % (r, b, m))
        return " + ".join(bits)


def _binom_int(m, i):
    out = 1
    for j in range(i):
        out = out * (m - j) // (j + 1)
    return out


@lru_cache(maxsize=None)
def _zmul(b1: Flt, m1: int, b2: Flt, m2: int) -> RatFunc:
    """(z-b1)^m1 (z-b2)^m2 in the canonical basis."""
    if m1 == 0:
        return RatFunc.pole(b2, m2)
    if m2 == 0:
        return RatFunc.pole(b1, m1)
    if b1 == b2:
        return RatFunc.pole(b1, m1 + m2)
    if m1 >= 0 and m2 >= 0:
        # z-powers only at ZFLT, so b1 == b2 == ZFLT was handled above
        return RatFunc.pole(b1, m1) * RatFunc.pole(b2, m2)  # pragma: no cover
    if m1 >= 0:
        return _zpow_times_pole(m1, b2, m2)
    if m2 >= 0:
        return _zpow_times_pole(m2, b1, m1)
    inv = _recip_diff(b1, b2)
    diff = _zmul(b1, m1, b2, m2 + 1) - _zmul(b1, m1 + 1, b2, m2)
    return diff.scale_zbar(inv)


def _zpow_times_pole(m: int, b: Flt, n: int) -> RatFunc:
    """z^m (z - beta)^n with n < 0 (beta may be constant or ZFLT)."""
    assert m >= 0 and n < 0
    if b.is_zero_const():
        return RatFunc.pole(ZFLT, m + n)
    # z^m = ((z-beta) + beta)^m
    out = RatFunc()
    for j in range(m + 1):
        coeff = _flt_pow(b, m - j).scale(fe(_binom_int(m, j)))
        out = out + RatFunc.pole(b, j + n, coeff)
    return out


def rf_const(c) -> RatFunc:
    return RatFunc.const(c)


def rf_pole(b, m=-1, coeff=None) -> RatFunc:
    return RatFunc.pole(b, m, coeff)


def rf_zbar(r: RatZ) -> RatFunc:
    return RatFunc.from_zbar(r)
