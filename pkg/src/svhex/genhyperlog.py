"""Generalized hyperlogarithms in the z, zbar basis.

A GHExpr is a sparse sum of terms

    rf(z, zbar) * L_v(zbar) * L_{w(zbar)}(z)

with rf a RatFunc, v a word of constant letters (the anti-holomorphic
hyperlogarithm) and w a word of Flt letters in zbar.  The module provides both
partial derivatives, multivalued primitives, regularized limits and values,
translations, Brown's variable-swap bootstrap, complex conjugation, FLT
changes of variable, the singular decomposition at 0, and the double
expansion engines at finite points and at infinity used by the single-valued
machinery.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .constants import CV_ONE, CV_ZERO, ConstVal, cv, regval, regval_inf
from .field import FieldElem, fe
from .flt import (Flt, ID_FLT, compose, const_flt,
                  difference_factor, invert)
from .hyperlog import (HLExpr, INF_TARGET, _dlog_diff, _dlog_flt, hl_const,
                       hl_word, int0 as hl_int0, transport)
from .ratfunc import (RatFunc, ZFLT, _flt_pow, flt_sub_const, flt_to_ratz,
                      flt_translate, rf_pole)
from .ratz import RatZ, rz_mono
from .words import letter, shuffle_words, strip_leading_zeros

__all__ = ["GHExpr", "gh_term", "gh_const", "gh_hl_z", "gh_hl_zbar",
           "gh_from_hl_zbar", "d", "primitive_mv", "limit0", "gh_translate",
           "value_at", "swap_core", "gh_conj", "gh_subst_arg",
           "flt_change_of_var", "expand_z", "expand_z_inf", "sing_decomp",
           "limit_reg", "partial_fractions", "Decomposition", "v_inf"]


class GHExpr:
    """Sparse canonical generalized hyperlogarithm."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, rf in terms.items():
                if rf:
                    self.terms[k] = rf
        self._hash = None

    @staticmethod
    def unit():
        return GHExpr({((), ()): RatFunc.const(1)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, rf in other.terms.items():
            nr = out.get(k)
            nr = rf if nr is None else nr + rf
            if nr:
                out[k] = nr
            else:
                out.pop(k, None)
        return GHExpr(out)

    def __neg__(self):
        return GHExpr({k: -rf for k, rf in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GHExpr":
        if not c:
            return GHExpr()
        return GHExpr({k: rf.scale(c) for k, rf in self.terms.items()})

    def scale_rf(self, rf: RatFunc) -> "GHExpr":
        if not rf:
            return GHExpr()
        return GHExpr({k: r * rf for k, r in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, GHExpr):
            return NotImplemented
        out = GHExpr()
        for (v1, w1), r1 in self.terms.items():
            for (v2, w2), r2 in other.terms.items():
                rf = r1 * r2
                if not rf:
                    continue
                acc = {}
                for v, mv in shuffle_words(v1, v2).items():
                    for w, mw in shuffle_words(w1, w2).items():
                        m = mv * mw
                        key = (v, w)
                        cur = acc.get(key)
                        add = rf.scale(fe(m)) if m != 1 else rf
                        acc[key] = add if cur is None else cur + add
                out = out + GHExpr(acc)
        return out

    def __eq__(self, other):
        if not isinstance(other, GHExpr):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and \
            all(rf == other.terms[k] for k, rf in self.terms.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def weight(self):
        return max((len(v) + len(w) for (v, w) in self.terms), default=0)

    def letters_zbar(self):
        """The letter set Sigma(zbar): w-letters plus pole locations."""
        out = set()
        for (v, w), rf in self.terms.items():
            out.update(w)
            for (b, m) in rf.terms:
                if m < 0:
                    out.add(b)
        return out

    def const_points(self):
        """Constant singular points (Sigma intersect F), from letters, poles
        and zbar-poles."""
        out = set()
        for (v, w), rf in self.terms.items():
            for lt in v:
                out.add(lt.const_value())
            for lt in w:
                if lt.is_constant():
                    out.add(lt.const_value())
            for (b, m) in rf.terms:
                if m < 0 and b.is_constant():
                    out.add(b.const_value())
            for r in rf.terms.values():
                for (p, k) in r.terms:
                    if k < 0:
                        out.add(p.conj())
        out.discard(None)
        return out

    def map_rf(self, fn) -> "GHExpr":
        out = {}
        for k, rf in self.terms.items():
            nr = fn(rf)
            if nr:
                out[k] = nr
        return GHExpr(out)

    def __repr__(self):
        if not self.terms:
            return "GH(0)"
        bits = []
        for (v, w) in sorted(self.terms, key=lambda k: (len(k[0]) + len(k[1]),
                                                        str(k))):
            rf = self.terms[(v, w)]
            bits.append("L[%s](zb)*L[%s](z)*{%r}" % (
                ",".join(str(a) for a in v), ",".join(str(a) for a in w), rf))
        return "GH{ %s }" % " ; ".join(bits)


def gh_term(v, w, rf=None) -> GHExpr:
    v = tuple(letter(a) for a in v)
    w = tuple(letter(a) if not isinstance(a, Flt) else a for a in w)
    return GHExpr({(v, w): rf if rf is not None else RatFunc.const(1)})


def gh_const(c) -> GHExpr:
    if isinstance(c, RatFunc):
        return GHExpr({((), ()): c})
    return GHExpr({((), ()): RatFunc.const(c)})


def gh_hl_z(word) -> GHExpr:
    return gh_term((), word)


def gh_hl_zbar(word) -> GHExpr:
    return gh_term(word, ())


def gh_from_hl_zbar(h: HLExpr) -> GHExpr:
    """Embed a one-variable expression in zbar into the GH algebra."""
    out = GHExpr()
    for v, c in h.terms.items():
        out = out + GHExpr({(v, ()): RatFunc.from_zbar(c)})
    return out


def gh_to_hl_zbar(f: GHExpr) -> HLExpr:
    """Inverse embedding; requires w parts empty and z-free coefficients."""
    out = HLExpr()
    for (v, w), rf in f.terms.items():
        if w:
            raise ValueError("not an anti-holomorphic expression: %s" % (f,))
        for (b, m), r in rf.terms.items():
            if (b, m) != (ZFLT, 0):
                raise ValueError("z-dependence remains: %s" % (rf,))
            out = out + HLExpr({v: r})
    return out


# -- derivatives ---------------------------------------------------------------

def d(f: GHExpr, var: str) -> GHExpr:
    if var == "z":
        return _d_z(f)
    if var in ("zb", "zbar"):
        return _d_zbar(f)
    raise ValueError("var must be 'z' or 'zb'")


def _d_z(f: GHExpr) -> GHExpr:
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        drf = rf.d_z()
        if drf:
            out = out + GHExpr({(v, w): drf})
        if w:
            out = out + GHExpr({(v, w[:-1]): rf * rf_pole(w[-1], -1)})
    return out


def _d_zbar(f: GHExpr) -> GHExpr:
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        drf = rf.d_zbar()
        if drf:
            out = out + GHExpr({(v, w): drf})
        if v:
            b = v[-1].const_value()
            out = out + GHExpr({(v[:-1], w): rf.scale_zbar(rz_mono(b, -1))})
        n = len(w)
        for k in range(1, n + 1):
            ak = w[k - 1]
            fac = RatZ()
            if k < n:
                fac = fac + _dlog_diff(w[k], ak)
            if k > 1:
                fac = fac - _dlog_diff(ak, w[k - 2])
            else:
                fac = fac - _dlog_flt(ak)
            sub = w[:k - 1] + w[k:]
            if fac:
                out = out + GHExpr({(v, sub): rf.scale_zbar(fac)})
            if k == n and not ak.is_constant():
                # d/dzbar log(z - beta_n(zbar)) = -beta_n'(zbar)/(z - beta_n)
                det = ak.det()
                if not ak.c.is_zero():
                    dbeta = rz_mono(-ak.d / ak.c, -2, det / (ak.c * ak.c))
                else:
                    dbeta = RatZ.const(ak.a / ak.d)
                out = out + GHExpr(
                    {(v, sub): (rf * rf_pole(ak, -1)).scale_zbar(-dbeta)})
    return out


# -- expansion in z ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _w_series0(word, n: int):
    """z-Taylor coefficients of L_{w(zbar)}(z) at z=0 for words with no
    leading zero letter; entries are RatZ in zbar."""
    if not word:
        return (RatZ.const(1),) + (RatZ(),) * (n - 1)
    prev = _w_series0(word[:-1], n)
    b = word[-1]
    out = [RatZ()] * n
    if b.is_zero_const():
        for m in range(1, n):
            out[m] = prev[m].scale(fe(Fraction(1, m)))
    else:
        # 1/(z - b(zbar)) = -sum_k z^k b^{-k-1}
        acc = RatZ()
        for m in range(1, n):
            acc = acc + prev[m - 1] * _flt_pow(b, m - 1)
            out[m] = (acc * _flt_pow(b, -m)).scale(fe(Fraction(-1, m)))
    return tuple(out)


def expand_z(f: GHExpr, order: int):
    """Expansion at z=0: dict (l, m) -> HLExpr in zbar, m may be negative
    (poles of coefficients at z=0 only via the ZFLT monomials)."""
    coeffs = {}

    def _acc(l, m, v, r):
        if not r:
            return
        key = (l, m)
        cur = coeffs.get(key)
        add = HLExpr({v: r})
        coeffs[key] = add if cur is None else cur + add

    for (v, w), rf in f.terms.items():
        for (b, mz), r in rf.terms.items():
            # z-expansion of (z-b)^mz = sum_j C(mz,j) z^j (-b)^{mz-j}
            if b.is_zero_const():
                zlau = {mz: RatZ.const(1)}
            else:
                zlau = {}
                jmax = min(mz, order) if mz >= 0 else order
                for j in range(0, jmax + 1):
                    c = _binom_frac(mz, j)
                    if not c:
                        continue
                    sign = -1 if (mz - j) % 2 else 1
                    pw = _flt_pow(b, mz - j).scale(fe(c * sign))
                    if pw:
                        zlau[j] = pw
            for j, cj, u in strip_leading_zeros(w):
                nmax = order - min(zlau, default=0) + 1
                ser = _w_series0(u, max(nmax, 1))
                pref = Fraction(cj, _fact(j))
                for m1, c1 in zlau.items():
                    for m2 in range(len(ser)):
                        if not ser[m2]:
                            continue
                        m = m1 + m2
                        if m > order:
                            break
                        _acc(j, m, v, (r * c1 * ser[m2]).scale(fe(pref)))
    return {k: h for k, h in coeffs.items() if h}


def _binom_frac(k, j):
    num = 1
    for i in range(j):
        num *= (k - i)
    den = _fact(j)
    return Fraction(num, den)


def _fact(n):
    r = 1
    for k in range(2, n + 1):
        r *= k
    return r


def limit0(f: GHExpr) -> HLExpr:
    """Regularized limit z -> 0 (log z -> 0); error on an uncancelled pole."""
    exp = expand_z(f, 0)
    for (l, m), h in exp.items():
        if m < 0 and h:
            raise ZeroDivisionError("pole in z at 0 does not cancel: %s" % (f,))
    out = HLExpr()
    for (l, m), h in exp.items():
        if m == 0 and l == 0:
            out = out + h
    return out


# -- values at infinity ------------------------------------------------------------

@lru_cache(maxsize=None)
def v_inf(word) -> HLExpr:
    """Regularized limit of L_{w(zbar)}(z) as z -> infinity, an HLExpr in
    zbar (bootstrap in zbar; base constants are argument-1 reductions)."""
    word = tuple(word)
    if not word:
        return HLExpr.unit()
    n = len(word)
    deriv = HLExpr()
    for k in range(1, n + 1):
        ak = word[k - 1]
        fac = RatZ()
        if k < n:
            fac = fac + _dlog_diff(word[k], ak)
        # the z-endpoint factor d/dzbar log(z - beta_n) drops at z = infinity
        if k > 1:
            fac = fac - _dlog_diff(ak, word[k - 2])
        else:
            fac = fac - _dlog_flt(ak)
        if not fac:
            continue
        sub = v_inf(word[:k - 1] + word[k:])
        deriv = deriv + sub.map_coeffs(lambda c: c * fac)
    out = hl_int0(deriv)
    w0 = []
    drop = False
    for lt in word:
        val = lt(fe(0))
        if val is None:
            drop = True
            break
        w0.append(val)
    if not drop:
        c0 = regval_inf(tuple(const_flt(x) for x in w0))
        if c0:
            out = out + hl_const(RatZ.const(c0))
    return out


@lru_cache(maxsize=None)
def _w_series_inf(word, order: int):
    """Expansion of L_{w(zbar)}(1/u) at u=0: dict (l, m) -> HLExpr in zbar."""
    word = tuple(word)
    if not word:
        return {(0, 0): HLExpr.unit()}
    prev = _w_series_inf(word[:-1], order)
    b = word[-1]
    deriv = {}

    def _acc(dct, l, m, val):
        if val:
            key = (l, m)
            cur = dct.get(key)
            dct[key] = val if cur is None else cur + val

    for (l, m), val in prev.items():
        _acc(deriv, l, m - 1, -val)
        if not b.is_zero_const():
            for k in range(0, order - m + 1):
                _acc(deriv, l, m + k, val.map_coeffs(
                    lambda c, kk=k: c * (-_flt_pow(b, kk + 1))))
    out = {}
    for (l, m), val in deriv.items():
        if m == -1:
            _acc(out, l + 1, 0, val.map_coeffs(
                lambda c: c.scale(fe(Fraction(1, l + 1)))))
        elif m >= 0:
            fall = 1
            for j in range(l + 1):
                if m + 1 <= order:
                    _acc(out, l - j, m + 1, val.map_coeffs(
                        lambda c, jj=j, ff=fall: c.scale(
                            fe(Fraction((-1) ** jj * ff, (m + 1) ** (jj + 1))))))
                fall *= (l - j)
        else:  # pragma: no cover
            raise RuntimeError("unexpected u-pole in infinity bootstrap")
    c0 = v_inf(word)
    if c0:
        _acc(out, 0, 0, c0)
    return {k: v for k, v in out.items() if v}


def expand_z_inf(f: GHExpr, order: int):
    """Expansion at z=infinity in u = 1/z: dict (l, m) -> HLExpr in zbar,
    powers u^m with m possibly negative (from positive powers of z)."""
    coeffs = {}

    def _acc(l, m, h):
        if h:
            key = (l, m)
            cur = coeffs.get(key)
            coeffs[key] = h if cur is None else cur + h

    for (v, w), rf in f.terms.items():
        ser = _w_series_inf(w, order + 2)
        for (b, mz), r in rf.terms.items():
            # (z - b)^mz = u^{-mz} (1 - b u)^mz = sum_j C(mz,j)(-b)^j u^{j-mz}
            if b.is_zero_const():
                zlau = {-mz: RatZ.const(1)}
            else:
                zlau = {}
                jmax = mz if mz >= 0 else order + mz
                for j in range(0, max(jmax, -1) + 1):
                    if j - mz > order:
                        break
                    c = _binom_frac(mz, j)
                    if not c:
                        continue
                    sign = -1 if j % 2 else 1
                    pw = _flt_pow(b, j).scale(fe(c * sign))
                    if pw:
                        zlau[j - mz] = pw
            for m1, c1 in zlau.items():
                for (l, m2), val in ser.items():
                    m = m1 + m2
                    if m > order:
                        continue
                    _acc(l, m, val.map_coeffs(lambda c: r * c1 * c))
    return {k: h for k, h in coeffs.items() if h}


# -- translation and values ---------------------------------------------------------

@lru_cache(maxsize=None)
def _hl_translate_arg(v, abar: FieldElem) -> dict:
    """Split L_v(zbar) under zbar -> zbar + abar: returns dict word -> ConstVal
    for the new words (letters shifted by -abar), via path composition at abar
    with conjugate-path value constants."""
    out = {}
    for k in range(len(v) + 1):
        pre = regval(v[:k], abar, bar=True)
        if not pre:
            continue
        nw = tuple(const_flt(lt.const_value() - abar) for lt in v[k:])
        out[nw] = out.get(nw, CV_ZERO) + pre
    return out


@lru_cache(maxsize=None)
def _w_translate(w, a: FieldElem, abar: FieldElem) -> GHExpr:
    """L_{w(zbar)}(z) under (z, zbar) -> (z + a, zbar + abar)."""
    out = GHExpr()
    for k in range(len(w) + 1):
        # prefix value: transport to the constant point a, then shift zbar
        pre = transport(w[:k], const_flt(a))
        pre_shift = _hl_shift_expr(pre, abar)
        nw = tuple(flt_sub_const(flt_translate(lt, abar), a) for lt in w[k:])
        out = out + gh_from_hl_zbar(pre_shift) * gh_hl_z(nw)
    return out


def _hl_shift_expr(h: HLExpr, abar: FieldElem) -> HLExpr:
    """Substitute zbar -> zbar + abar into a one-variable zbar expression."""
    if abar.is_zero():
        return h
    out = HLExpr()
    for v, c in h.terms.items():
        ct = c.subs_translate(abar)
        for nw, pre in _hl_translate_arg(v, abar).items():
            out = out + HLExpr({nw: ct.scale(pre)})
    return out


def gh_translate(f: GHExpr, a) -> GHExpr:
    """(z, zbar) -> (z + a, zbar + conj(a)): expansion point shift to a."""
    a = fe(a)
    abar = a.conj()
    if a.is_zero():
        return f
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        nrf = rf.translate(a, abar)
        piece = gh_const(nrf)
        vparts = _hl_translate_arg(v, abar)
        vpiece = GHExpr()
        for nw, pre in vparts.items():
            vpiece = vpiece + gh_hl_zbar(nw).scale(pre)
        piece = piece * vpiece * _w_translate(w, a, abar)
        out = out + piece
    return out


def limit_reg(f: GHExpr, var: str, a) -> HLExpr:
    """Regularized limit; finite points via translation, infinity via the
    u-expansion.  Returns a one-variable expression in the surviving variable
    (for var='z' the result is in zbar, with letters shifted back)."""
    if var == "z":
        if a == INF_TARGET or a == "inf":
            exp = expand_z_inf(f, 0)
            for (l, m), h in exp.items():
                if m < 0 and h:
                    raise ZeroDivisionError("pole at infinity")
            out = HLExpr()
            for (l, m), h in exp.items():
                if (l, m) == (0, 0):
                    out = out + h
            return out
        a = fe(a)
        g = gh_translate(f, a) if not a.is_zero() else f
        h = limit0(g)
        # shift zbar back: the translated variable was zbar - conj(a)
        return _hl_shift_expr(h, -a.conj())
    if var in ("zb", "zbar"):
        from .hyperlog import HLExpr as _HL
        res = limit_reg(gh_conj(f), "z", fe(a).conj() if a not in ("inf",) else a)
        # conjugate back: the result lives in z; mirror to the zbar side
        out = _HL()
        for v, c in res.terms.items():
            nv = tuple(const_flt(lt.const_value().conj()) for lt in v)
            out = out + _HL({nv: _ratz_conj(c)})
        return out
    raise ValueError("var must be 'z' or 'zb'")


def _ratz_conj(r: RatZ) -> RatZ:
    out = RatZ()
    for (p, m), c in r.terms.items():
        cc = c.conj()
        out = out + RatZ({(p.conj(), m): cc})
    return out


def value_at(f: GHExpr, a) -> ConstVal:
    """Regularized value of f at (z, zbar) = (a, conj a): inner limit in z,
    outer regularized evaluation of the zbar part."""
    from .hyperlog import eval_reg as hl_eval_reg
    a = fe(a)
    if a.is_zero():
        h = limit0(f)
        total = CV_ZERO
        empty = h.terms.get(())
        if empty is not None:
            total = total + cv(empty.eval_at(fe(0)))
        return total
    g = gh_translate(f, a)
    h = limit0(g)   # zbar-translated one-variable expression, value at 0
    total = CV_ZERO
    empty = h.terms.get(())
    if empty is not None:
        if empty.has_pole_at(fe(0)):
            raise ZeroDivisionError("zbar pole at the evaluation point")
        total = total + cv(empty.eval_at(fe(0)))
    for v, c in h.terms.items():
        if v:
            # L_v vanishes at the (translated) base point 0
            continue
    return total


# -- Brown's variable swap ------------------------------------------------------------

def _ratz_z_to_rf(r: RatZ) -> RatFunc:
    """Interpret a RatZ in the z variable as a RatFunc."""
    out = RatFunc()
    for (p, m), c in r.terms.items():
        out = out + rf_pole(const_flt(p), m, RatZ.const(c)) if m < 0 or p.is_zero() \
            else out + rf_pole(const_flt(p), m, RatZ.const(c))
    return out


def _zbar_minus_fltz(g: Flt, m: int) -> RatFunc:
    """(zbar - g(z))^m as a RatFunc via the factorization identity
    zbar - g(z) = (c zbar - a)(z - g^{-1}(zbar))/(c z + d)."""
    if g.is_constant():
        return RatFunc.from_zbar(rz_mono(g.const_value(), m))
    a, b, c, dd = g.a, g.b, g.c, g.d
    if c.is_zero():
        # zbar - (a z + b)/d = -(a/d) (z - (d zbar - b)/a)
        gam = Flt(dd, -b, fe(0), a)
        return RatFunc.pole(gam, m, RatZ.const((-a / dd) ** m))
    zb_fac = rz_mono(a / c, m, c ** m)          # (c zbar - a)^m
    pole_fac = RatFunc.pole(invert(g), m)       # (z - g^{-1}(zbar))^m
    den_fac = RatFunc.pole(const_flt(-dd / c), -m, RatZ.const(c ** (-m)))
    return (pole_fac * den_fac).scale_zbar(zb_fac)


@lru_cache(maxsize=None)
def swap_core(u) -> GHExpr:
    """L_{u(z)}(zbar) rewritten in the standard z, zbar basis (Brown's
    bootstrap); u is a tuple of Flt letters regarded as functions of z."""
    u = tuple(u)
    if not u:
        return GHExpr.unit()
    n = len(u)
    deriv = GHExpr()
    for k in range(1, n + 1):
        ak = u[k - 1]
        fac = RatFunc()
        if k < n:
            fac = fac + _ratz_z_to_rf(_dlog_diff(u[k], ak))
        else:
            # d/dz log(zbar - a_n(z)): Lemma partialFLT
            if not ak.is_constant():
                fac = fac + rf_pole(invert(ak), -1)
                if not ak.c.is_zero():
                    fac = fac - rf_pole(const_flt(-ak.d / ak.c), -1)
        if k > 1:
            fac = fac - _ratz_z_to_rf(_dlog_diff(ak, u[k - 2]))
        else:
            fac = fac - _ratz_z_to_rf(_dlog_flt(ak))
        if not fac:
            continue
        deriv = deriv + swap_core(u[:k - 1] + u[k:]).scale_rf(fac)
    out = primitive_mv(deriv, "z")
    # integration constant: int0 in zbar of the limit z->0 of d/dzbar L_{u(z)}(zbar)
    tail = swap_core(u[:-1]) * gh_const(_zbar_minus_fltz(u[-1], -1))
    g = limit0(tail)
    C = hl_int0(g)
    return out + gh_from_hl_zbar(C)


# -- multivalued primitives -----------------------------------------------------------

def primitive_mv(f: GHExpr, var: str) -> GHExpr:
    """Multivalued primitive with regularized value 0 at the base point."""
    if var in ("zb", "zbar"):
        return gh_conj(primitive_mv(gh_conj(f), "z"))
    F = _prim_raw(f)
    c0h = limit0(F)
    if c0h:
        F = F - gh_from_hl_zbar(c0h)
    return F


def _prim_raw(f: GHExpr) -> GHExpr:
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        for (b, m), r in rf.terms.items():
            out = out + _prim_term(v, w, b, m, r)
    return out


def _prim_term(v, w, b, m, r) -> GHExpr:
    if m == -1:
        return GHExpr({(v, w + (b,)): RatFunc.from_zbar(r)})
    inv = Fraction(1, m + 1)
    lead = GHExpr({(v, w): RatFunc.pole(b, m + 1, r.scale(fe(inv)))})
    if not w:
        return lead
    tail_rf = (RatFunc.pole(b, m + 1, r) * rf_pole(w[-1], -1)).scale(fe(-inv))
    out = lead
    for (b2, m2), r2 in tail_rf.terms.items():
        out = out + _prim_term(v, w[:-1], b2, m2, r2)
    return out


# -- conjugation -----------------------------------------------------------------------

def _rf_conj(rf: RatFunc) -> GHExpr:
    """Complex conjugate of a coefficient, rewritten in the z, zbar basis."""
    out = GHExpr()
    for (b, m), r in rf.terms.items():
        if b.is_zero_const():
            piece = RatFunc.from_zbar(rz_mono(fe(0), m))
        else:
            piece = _zbar_minus_fltz(b.conj_coeffs(), m)
        # the zbar-rational r conjugates into a z-rational
        acc = RatFunc()
        for (p, k), c in r.terms.items():
            cc = c.conj() if hasattr(c, "conj") else c
            acc = acc + RatFunc.pole(const_flt(p.conj()), k, RatZ.const(cc))
        out = out + gh_const(piece * acc)
    return out


def gh_conj(f: GHExpr) -> GHExpr:
    """Complex conjugate, re-expressed in the z, zbar basis."""
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        piece = _rf_conj(rf)
        if v:
            nv = tuple(const_flt(lt.const_value().conj()) for lt in v)
            piece = piece * gh_hl_z(nv)
        if w:
            wc = tuple(lt.conj_coeffs() for lt in w)
            piece = piece * swap_core(wc)
        out = out + piece
    return out


# -- FLT change of variable -------------------------------------------------------------

def _pole_transform(gamma: Flt, m: int, beta: Flt, betabar: Flt) -> RatFunc:
    """(z - gamma(zbar))^m after z -> beta(z), zbar -> betabar(zbar), using
    beta(z) - comp(zbar) = u(zbar) (z - delta(zbar)) / (c z + d) with
    comp = gamma o betabar, u = a - c*comp, delta = beta^{-1} o comp."""
    comp = compose(gamma, betabar)
    a, b, c, dd = beta.a, beta.b, beta.c, beta.d
    ua = a * comp.c - c * comp.a
    ub = a * comp.d - c * comp.b
    if ua.is_zero() and ub.is_zero():
        # comp == beta(infinity): beta(z) - comp = -det/(c (c z + d))
        det = beta.det()
        return RatFunc.pole(const_flt(-dd / c), -m,
                            RatZ.const(((-det) / (c * c)) ** m))
    ucoef = Flt(ua, ub, comp.c, comp.d)
    delta = compose(invert(beta), comp)
    out = RatFunc.pole(delta, m, _flt_pow(ucoef, m))
    if not c.is_zero():
        out = out * RatFunc.pole(const_flt(-dd / c), -m, RatZ.const(c ** (-m)))
    else:
        out = out.scale(dd ** (-m))
    return out


def invert_exists(b: Flt) -> bool:
    return not b.det().is_zero()


@lru_cache(maxsize=None)
def gh_subst_arg(w, beta: Flt) -> GHExpr:
    """L_{w(betabar(zbar))}(beta(z)) in the z, zbar basis (bootstrap in z)."""
    w = tuple(w)
    if not w:
        return GHExpr.unit()
    betabar = beta.conj_coeffs()
    last = w[-1]
    # d/dz: beta'(z) * L_{w'(betabar)}(beta(z)) / (beta(z) - last(betabar))
    comp = compose(last, betabar)
    a, b, c, dd = beta.a, beta.b, beta.c, beta.d
    det = beta.det()
    ua = a * comp.c - c * comp.a
    ub = a * comp.d - c * comp.b
    if ua.is_zero() and ub.is_zero():
        # beta'/(beta - comp) = -c/(c z + d) = -1/(z + d/c)
        fac = RatFunc.pole(const_flt(-dd / c), -1, RatZ.const(-fe(1)))
    else:
        ucoef = Flt(ua, ub, comp.c, comp.d)
        delta = compose(invert(beta), comp)
        uinv = _flt_pow(ucoef, -1)
        if c.is_zero():
            # beta - comp = u (z - delta)/d, beta' = a/d
            fac = RatFunc.pole(delta, -1, uinv.scale(a))
        else:
            p = -dd / c
            dp = flt_sub_const(delta, p)
            coeff = (uinv * _flt_pow(dp, -1)).scale(det / c)
            fac = RatFunc.pole(delta, -1, coeff) \
                - RatFunc.pole(const_flt(p), -1, coeff)
    sub = gh_subst_arg(w[:-1], beta)
    deriv = sub.scale_rf(fac)
    out = primitive_mv(deriv, "z")
    # constant: limit z -> 0: L_{w(betabar(zbar))}(beta(0))
    letters = tuple(compose(lt, betabar) for lt in w)
    b0 = beta(fe(0))
    target = const_flt(b0) if b0 is not None else INF_TARGET
    Cbar = transport(letters, target, True)
    return out + gh_from_hl_zbar(Cbar)


def flt_change_of_var(f: GHExpr, beta: Flt) -> GHExpr:
    """f(beta(z)) rewritten in the z, zbar basis (beta nonconstant)."""
    if beta.is_constant():
        raise ValueError("constant FLT change of variable")
    if beta == ID_FLT:
        return f
    betabar = beta.conj_coeffs()
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        rf_new = RatFunc()
        for (b, m), r in rf.terms.items():
            mono = RatFunc.const(1) if m == 0 \
                else _pole_transform(b, m, beta, betabar)
            for (p, k), cco in r.terms.items():
                piece = _flt_pow(flt_sub_const(betabar, p), k) if k != 0 \
                    else RatZ.const(1)
                rf_new = rf_new + mono.scale_zbar(piece.scale(cco))
        piece = gh_const(rf_new)
        if v:
            hv = transport(tuple(v), betabar, True)
            piece = piece * gh_from_hl_zbar(hv)
        if w:
            piece = piece * gh_subst_arg(w, beta)
        out = out + piece
    return out


# -- singular decomposition at 0 ---------------------------------------------------------

class Decomposition:
    __slots__ = ("regular", "singular")

    def __init__(self, regular: GHExpr, singular: GHExpr):
        self.regular = regular
        self.singular = singular


def _is_sing_head(b: Flt) -> bool:
    """beta != 0 with beta(0) = 0 (the singular letter shape)."""
    if b.is_constant():
        return False
    v0 = b(fe(0))
    return v0 is not None and v0.is_zero()


@lru_cache(maxsize=None)
def _lw_rewrite(w):
    """Lemma-style rewrite of L_{w(zbar)}(z): returns (reg: list of (l, GHExpr
    g_l), sing: list of (word, HLExpr zbar-coefficient)) so that
    L_w = sum g_l log^l z + sum coeff(zbar) L_{sing-word}(z)."""
    w = tuple(w)
    L = 0
    while L < len(w) and w[L].is_zero_const():
        L += 1
    core = w[L:]
    if not core:
        return ((tuple([(L, gh_const(Fraction(1, _fact(L))))])), ())
    if L == 0 and _is_sing_head(core[0]):
        return ((), ((w, HLExpr.unit()),))
    # recursion on the last letter
    x, bn = core[:-1], core[-1]
    reg_p, sing_p = _lw_rewrite((const_flt(fe(0)),) * L + x)
    reg_out = {}
    sing_out = {}

    def _add_reg(l, g):
        if g:
            cur = reg_out.get(l)
            reg_out[l] = g if cur is None else cur + g

    def _add_sing(word, h):
        if h:
            cur = sing_out.get(word)
            sing_out[word] = h if cur is None else cur + h

    # singular parts integrate by appending bn
    for word, h in sing_p:
        _add_sing(word + (bn,), h)
    # regular parts: integrate g_l log^l z / (z - bn)
    sing_head = _is_sing_head(bn)
    for l, g in reg_p:
        if sing_head:
            gval = _subst_z_flt(g, bn)      # g(beta_n(zbar), zbar), an HLExpr
            _add_sing((const_flt(fe(0)),) * l + (bn,),
                      gval.map_coeffs(lambda c: c.scale(fe(_fact(l)))))
            gdiff = g - gh_from_hl_zbar(gval)
            integrand = gdiff.scale_rf(rf_pole(bn, -1))
        else:
            integrand = g.scale_rf(rf_pole(bn, -1))
        for ll, gg in _int_log_chain(integrand, l):
            _add_reg(ll, gg)
    return (tuple(sorted(reg_out.items())),
            tuple(sorted(sing_out.items(), key=lambda kv: str(kv[0]))))


def _int_log_chain(g: GHExpr, l: int):
    """Primitives of g(z,zbar) log^l z by parts: returns [(j, G_j)] with
    int g log^l = sum G_j log^j."""
    G1 = primitive_mv(g, "z")
    if l == 0:
        return [(0, G1)]
    out = [(l, G1)]
    rest = _int_log_chain(G1.map_rf(lambda rf: rf * rf_pole(ZFLT, -1)), l - 1)
    for j, G in rest:
        out.append((j, G.scale(fe(-l))))
    return _merge_pairs(out)


def _merge_pairs(pairs):
    acc = {}
    for j, G in pairs:
        cur = acc.get(j)
        acc[j] = G if cur is None else cur + G
    return [(j, G) for j, G in acc.items() if G]


def _subst_z_flt(g: GHExpr, bn: Flt) -> HLExpr:
    """Substitute z = bn(zbar) into g, returning an HLExpr in zbar."""
    out = HLExpr()
    for (v, w), rf in g.terms.items():
        r_tot = RatZ()
        for (b, m), r in rf.terms.items():
            if b.is_zero_const():
                fac = _flt_pow(bn, m)
            else:
                f3, f4 = difference_factor(bn, b)
                if f3.is_zero_const():
                    raise ZeroDivisionError("substitution hits a pole factor")
                fac = _flt_pow(f3, m) * _flt_pow(f4, m)
            r_tot = r_tot + r * fac
        if not r_tot:
            continue
        piece = HLExpr({v: r_tot})
        if w:
            piece = piece * transport(w, bn)
        out = out + piece
    return out


def sing_decomp(f: GHExpr) -> Decomposition:
    """Unique decomposition at 0 into a log-Laurent-regular part and the span
    of singular-shape words with anti-holomorphic coefficients."""
    reg = GHExpr()
    sing = GHExpr()
    for (v, w), rf in f.terms.items():
        pre = GHExpr({(v, ()): rf})
        reg_p, sing_p = _lw_rewrite(w)
        for l, g in reg_p:
            # log^l z = l! L_{0^l}(z)
            reg = reg + pre * g * gh_hl_z((const_flt(fe(0)),) * l).scale(fe(_fact(l)))
        for word, h in sing_p:
            sing = sing + pre * gh_from_hl_zbar(h) * gh_hl_z(word)
    return Decomposition(reg, sing)


# -- parsing-level partial fractions ---------------------------------------------------

def partial_fractions(numer, denom_factors) -> RatFunc:
    """Numerator polynomial (dict (i, j) -> coeff for z^i zbar^j) divided by a
    product of bilinear factors [(a, b, c, d)] meaning a z zbar + b z + c zbar
    + d; the result is in the canonical basis (Example-style factorization
    a z zbar + b z + c zbar + d = (a zbar + b)(z - beta(zbar)))."""
    out = RatFunc()
    for (i, j), cc in numer.items():
        out = out + RatFunc({(ZFLT, i): rz_mono(fe(0), j, fe(cc))})
    for (a, b, c, dd) in denom_factors:
        a, b, c, dd = fe(a), fe(b), fe(c), fe(dd)
        if not a.is_zero():
            beta = Flt(-c, -dd, a, b)
            recip_lin = flt_to_ratz(Flt(fe(0), fe(1), a, b))  # 1/(a zbar + b)
            out = out * RatFunc.pole(beta, -1, recip_lin)
        elif not b.is_zero():
            beta = Flt(-c, -dd, fe(0), b)
            out = out * RatFunc.pole(beta, -1, RatZ.const(fe(1) / b))
        else:
            # pure zbar factor c zbar + d
            out = out.scale_zbar(flt_to_ratz(Flt(fe(0), fe(1), c, dd)))
    return out
