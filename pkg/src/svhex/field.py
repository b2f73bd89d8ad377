"""Exact arithmetic in a dynamically grown tower of quadratic extensions of Q(i).

An element is a sparse rational combination of square-free generator products:
``data`` maps a bitmask S (bit k set = generator g_{k+1} participates) to a
``Fraction``.  Each generator satisfies g_{k+1}^2 = radicands[k], a previously
constructed element supported on lower generators.  g_1 = i is always present,
so the tower always contains the Gaussian rationals.  The tower is append-only
and internally locked; elements are immutable and hashable.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import isqrt

import mpmath as mp

__all__ = ["FieldTower", "FieldElem", "TOWER", "QQ", "fe", "I"]

_SQRT_SEARCH_CAP = 14  # max generators explored exhaustively by sqrt search


def _rat_sqrt(x: Fraction):
    if x < 0:
        return None
    pn, qn = x.numerator, x.denominator
    rn, rq = isqrt(pn), isqrt(qn)
    if rn * rn == pn and rq * rq == qn:
        return Fraction(rn, rq)
    return None


class FieldTower:
    """Append-only tower of quadratic extensions of Q containing i."""

    def __init__(self):
        self._lock = threading.RLock()
        self.radicands = []      # FieldElem, radicand of generator k
        self.conj_gens = []      # FieldElem, conjugate of generator k
        self._embed_cache = {}   # (gen index, dps) -> mpc
        self._mask_prod = {}     # (maskA, maskB) -> FieldElem for g_A * g_B
        self._conj_mask = {}     # mask -> FieldElem
        self._new_gen(self.rational(-1))

    def rational(self, x) -> "FieldElem":
        x = Fraction(x)
        return FieldElem._make(self, {0: x} if x else {})

    @property
    def i(self) -> "FieldElem":
        return FieldElem._make(self, {1: Fraction(1)})

    def gen(self, k) -> "FieldElem":
        return FieldElem._make(self, {1 << k: Fraction(1)})

    def ngens(self) -> int:
        return len(self.radicands)

    # -- monomial products ---------------------------------------------------

    def mono_product(self, ma: int, mb: int) -> "FieldElem":
        """g_A * g_B as a field element (= prod of common radicands * g_{A^B})."""
        if ma > mb:
            ma, mb = mb, ma
        key = (ma, mb)
        val = self._mask_prod.get(key)
        if val is not None:
            return val
        common = ma & mb
        out = FieldElem._make(self, {(ma ^ mb): Fraction(1)})
        k = 0
        m = common
        while m:
            if m & 1:
                out = out * self.radicands[k]
            m >>= 1
            k += 1
        self._mask_prod[key] = out
        return out

    def conj_mono(self, mask: int) -> "FieldElem":
        val = self._conj_mask.get(mask)
        if val is not None:
            return val
        out = self.rational(1)
        k = 0
        m = mask
        while m:
            if m & 1:
                out = out * self.conj_gens[k]
            m >>= 1
            k += 1
        self._conj_mask[mask] = out
        return out

    # -- square roots ----------------------------------------------------------

    def sqrt(self, x: "FieldElem") -> "FieldElem":
        """Return s with s*s == x (principal branch), adjoining if needed."""
        with self._lock:
            if x.is_zero():
                return self.rational(0)
            s = self._search_sqrt(x)
            if s is None:
                # cheap scan: x / r_k a rational square for an existing generator
                for k, r in enumerate(self.radicands):
                    q = x / r
                    if q.is_rational():
                        rs = _rat_sqrt(q.as_fraction())
                        if rs is not None:
                            s = self.gen(k) * rs
                            break
            if s is None:
                s = self.gen(self._new_gen(x))
            return _principal(s)

    def _new_gen(self, radicand: "FieldElem") -> int:
        self.radicands.append(radicand)
        self.conj_gens.append(None)
        k = len(self.radicands) - 1
        g = self.gen(k)
        rc = radicand.conj()
        if rc == radicand:
            self.conj_gens[k] = _match_conj(g, g)
        else:
            s = self._search_sqrt(rc)
            if s is None:
                self.radicands.append(rc)
                self.conj_gens.append(None)
                k2 = len(self.radicands) - 1
                g2 = self.gen(k2)
                self.conj_gens[k2] = _match_conj(g2, g)
                s = g2
            self.conj_gens[k] = _match_conj(g, s)
        return k

    def _search_sqrt(self, x: "FieldElem"):
        # candidate generators: support closure of x plus rational radicands
        cand = set()
        stack = [x]
        while stack:
            e = stack.pop()
            for mask in e.data:
                k = 0
                m = mask
                while m:
                    if (m & 1) and k not in cand:
                        cand.add(k)
                        stack.append(self.radicands[k])
                    m >>= 1
                    k += 1
        for k, r in enumerate(self.radicands):
            if r.is_rational():
                cand.add(k)
        levels = sorted(cand)
        if len(levels) > _SQRT_SEARCH_CAP:
            levels = levels[-_SQRT_SEARCH_CAP:]
        s = _try_sqrt(x, levels, self)
        if s is not None and s * s == x:
            return s
        return None

    # -- embeddings --------------------------------------------------------------

    def gen_embed(self, index: int, dps: int):
        key = (index, dps)
        val = self._embed_cache.get(key)
        if val is None:
            with mp.workdps(dps):
                r = self.radicands[index]._embed_mid(dps)
                val = mp.sqrt(mp.mpc(r))
            self._embed_cache[key] = val
        return val


def _try_sqrt(x: "FieldElem", levels, tower):
    """Search sqrt of x inside the subalgebra generated by `levels`."""
    if not levels:
        if not x.is_rational():
            return None
        r = _rat_sqrt(x.as_fraction())
        return None if r is None else tower.rational(r)
    k = levels[-1]
    rest = levels[:-1]
    bit = 1 << k
    a = FieldElem._make(tower, {m: c for m, c in x.data.items() if not (m & bit)})
    b = FieldElem._make(tower, {(m ^ bit): c for m, c in x.data.items() if m & bit})
    rk = tower.radicands[k]
    g = tower.gen(k)
    if b.is_zero():
        s = _try_sqrt(a, rest, tower)
        if s is not None:
            return s
        t = _try_sqrt(a / rk, rest, tower)
        if t is not None:
            return t * g
        return None
    disc = a * a - rk * b * b
    d = _try_sqrt(disc, rest, tower)
    if d is None:
        return None
    for sgn in (1, -1):
        x2 = (a + d * sgn) / 2
        xr = _try_sqrt(x2, rest, tower)
        if xr is None or xr.is_zero():
            continue
        y = b / (xr * 2)
        cand = xr + y * g
        if cand * cand == x:
            return cand
    return None


def _match_conj(g: "FieldElem", cand: "FieldElem") -> "FieldElem":
    """Pick the sign of cand so embed(cand) == conj(embed(g))."""
    dps = 40
    while True:
        gv = g._embed_mid(dps)
        cv = cand._embed_mid(dps)
        target = mp.conj(gv)
        d_plus = abs(cv - target)
        d_minus = abs(cv + target)
        lo, hi = sorted([d_plus, d_minus])
        if hi > mp.mpf(10) ** (-dps // 2) and lo < hi / 2:
            return cand if d_plus < d_minus else -cand
        dps *= 2
        if dps > 2600:  # pragma: no cover
            raise RuntimeError("cannot resolve conjugate generator sign")


def _principal(g: "FieldElem") -> "FieldElem":
    re2 = g + g.conj()
    if not re2.is_zero():
        return g if re2.sign_real() > 0 else -g
    im2i = g - g.conj()
    if im2i.is_zero():
        return g
    im = im2i / (g.tower.i * 2)
    return g if im.sign_real() >= 0 else -g


class FieldElem:
    """Immutable element of the quadratic tower with exact field operations."""

    __slots__ = ("tower", "data", "_hash")

    def __init__(self, *a):
        raise TypeError("use fe(), QQ(), tower.rational(), tower.sqrt()")

    @staticmethod
    def _make(tower, data: dict) -> "FieldElem":
        self = object.__new__(FieldElem)
        self.tower = tower
        self.data = {m: c for m, c in data.items() if c}
        self._hash = None
        return self

    # -- predicates --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def is_rational(self) -> bool:
        return all(m == 0 for m in self.data)

    def as_fraction(self) -> Fraction:
        if not self.data:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError("not rational: %s" % (self,))
        return self.data[0]

    # -- arithmetic ----------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        data = dict(self.data)
        for m, c in o.data.items():
            nc = data.get(m, Fraction(0)) + c
            if nc:
                data[m] = nc
            else:
                data.pop(m, None)
        return FieldElem._make(self.tower, data)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem._make(self.tower, {m: -c for m, c in self.data.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        tower = self.tower
        acc = {}
        for ma, ca in self.data.items():
            for mb, cb in o.data.items():
                c = ca * cb
                if ma == 0 or mb == 0:
                    m = ma | mb
                    nc = acc.get(m, Fraction(0)) + c
                    if nc:
                        acc[m] = nc
                    else:
                        acc.pop(m, None)
                    continue
                prod = tower.mono_product(ma, mb)
                for m, pc in prod.data.items():
                    nc = acc.get(m, Fraction(0)) + pc * c
                    if nc:
                        acc[m] = nc
                    else:
                        acc.pop(m, None)
        return FieldElem._make(tower, acc)

    __rmul__ = __mul__

    def inv(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("division by zero field element")
        if self.is_rational():
            return self.tower.rational(1 / self.data[0])
        top = max(m.bit_length() for m in self.data) - 1
        bit = 1 << top
        a = FieldElem._make(self.tower, {m: c for m, c in self.data.items() if not (m & bit)})
        b = FieldElem._make(self.tower, {(m ^ bit): c for m, c in self.data.items() if m & bit})
        r = self.tower.radicands[top]
        g = self.tower.gen(top)
        n = a * a - b * b * r
        ninv = n.inv()
        return (a - b * g) * ninv

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.tower.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- conjugation -------------------------------------------------------------

    def conj(self) -> "FieldElem":
        out = self.tower.rational(0)
        for m, c in self.data.items():
            if m == 0:
                out = out + c
            else:
                out = out + self.tower.conj_mono(m) * c
        return out

    def real(self) -> "FieldElem":
        return (self + self.conj()) / 2

    def imag(self) -> "FieldElem":
        return (self - self.conj()) / (self.tower.i * 2)

    def is_real(self) -> bool:
        return (self - self.conj()).is_zero()

    # -- comparisons ----------------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.data.items()))
        return self._hash

    def sign_real(self) -> int:
        """Sign of Re(self): exact 0 test, otherwise certified numerically."""
        re = self.real()
        if re.is_zero():
            return 0
        dps = 40
        while True:
            v = mp.re(re._embed_mid(dps))
            if abs(v) > mp.mpf(10) ** (-dps // 2):
                return 1 if v > 0 else -1
            dps *= 2
            if dps > 2600:  # pragma: no cover
                raise RuntimeError("sign resolution failed")

    # -- numerics ---------------------------------------------------------------------

    def _embed_mid(self, dps):
        with mp.workdps(dps):
            total = mp.mpc(0)
            for m, c in self.data.items():
                term = mp.mpc(mp.mpf(c.numerator) / mp.mpf(c.denominator))
                k = 0
                mm = m
                while mm:
                    if mm & 1:
                        term *= self.tower.gen_embed(k, dps)
                    mm >>= 1
                    k += 1
                total += term
            return total

    def embed(self, precision: int = 15):
        """Complex ball (mid, rad) containing the exact value, rad < 10^-precision."""
        if precision < 1:
            raise ValueError("precision >= 1 required")
        dps = precision + 15
        mid = self._embed_mid(dps)
        size = 8 * max(1, len(self.data))
        rad = mp.mpf(10) ** (-(dps - 5)) * (1 + abs(mid)) * size
        if rad >= mp.mpf(10) ** (-precision):
            dps = precision + 30
            mid = self._embed_mid(dps)
            rad = mp.mpf(10) ** (-(dps - 5)) * (1 + abs(mid)) * size
        return mid, rad

    def complex(self, dps: int = 30):
        return self._embed_mid(dps)

    # -- printing ------------------------------------------------------------------------

    def __repr__(self):
        return "fe(%s)" % (self,)

    def __str__(self):
        if not self.data:
            return "0"
        parts = []
        for m in sorted(self.data):
            c = self.data[m]
            gens = []
            k = 0
            mm = m
            while mm:
                if mm & 1:
                    gens.append("i" if k == 0 else "sqrt(%s)" % (self.tower.radicands[k],))
                mm >>= 1
                k += 1
            gs = "*".join(gens)
            if not gs:
                parts.append(str(c))
            elif c == 1:
                parts.append(gs)
            elif c == -1:
                parts.append("-" + gs)
            else:
                cs = str(c)
                if "/" in cs or c < 0:
                    parts.append("(%s)*%s" % (cs, gs))
                else:
                    parts.append("%s*%s" % (cs, gs))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


TOWER = FieldTower()
I = TOWER.i


def QQ(p, q=1) -> FieldElem:
    """Rational element p/q of the default tower."""
    return TOWER.rational(Fraction(p, q))


def fe(x) -> FieldElem:
    """Coerce ints/Fractions/FieldElems into the default tower."""
    if isinstance(x, FieldElem):
        return x
    if isinstance(x, (int, Fraction)):
        return TOWER.rational(Fraction(x))
    raise TypeError("cannot coerce %r to FieldElem" % (x,))
