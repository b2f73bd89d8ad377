"""One-variable hyperlogarithms as the formal differential algebra of words
tensored with partial-fraction rational coefficients.

An HLExpr is a sparse sum of terms  word (x) coeff  where words are tuples of
constant Flt letters and coeff is a RatZ.  The module provides the derivative,
residues, regularized primitives and evaluation, series expansions at 0, at
finite points and at infinity, monodromy operators, the tagged generic
infinitesimal monodromy with its inverse, and the one-variable commutative
hexagon.  The `transport` bootstrap computes values L_{w(t)}(x(t)) of
hyperlogarithms whose letters and argument are FLTs of a parameter; it is the
workhorse behind changes of variable and regularized limits.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .constants import (CV_ONE, CV_ZERO, ConstVal, TWO_PI_I, cv, log_sym,
                        regval, regval_inf)
from .field import FieldElem, fe
from .flt import Flt, compose, const_flt, difference_factor, invert
from .ratz import RatZ, rz_mono
from .words import (letter, shuffle_words, strip_leading_zeros,
                    strip_trailing_letter)

__all__ = ["HLExpr", "hl_word", "hl_const", "d_z", "residue", "int0",
           "eval_reg", "expand0", "expand_at", "expand_inf", "Expansion",
           "monodromy_m", "monodromy_M", "pi_dz", "TaggedHL", "m_generic",
           "m_inverse", "pi_m", "hexagon_m", "mobius_letters", "transport",
           "PoleAtPointError"]


class PoleAtPointError(Exception):
    pass


class HexagonMismatchError(Exception):
    pass


def _is_ratz(x):
    return isinstance(x, RatZ)


class HLExpr:
    """Sparse sum of word (x) rational-coefficient terms; immutable style."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c
        self._hash = None

    @staticmethod
    def unit():
        return HLExpr({(): RatZ.const(1)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            nc = out.get(w)
            nc = c if nc is None else nc + c
            if nc:
                out[w] = nc
            else:
                out.pop(w, None)
        return HLExpr(out)

    def __neg__(self):
        return HLExpr({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        out = {}
        for w, f in self.terms.items():
            nf = f.scale(c) if not _is_ratz(c) else f * c
            if nf:
                out[w] = nf
        return HLExpr(out)

    def __mul__(self, other):
        """Shuffle product (pointwise product of the realizations)."""
        if not isinstance(other, HLExpr):
            return NotImplemented
        out = HLExpr()
        for u, cu in self.terms.items():
            for v, cvv in other.terms.items():
                coeff = cu * cvv
                if not coeff:
                    continue
                acc = {}
                for w, m in shuffle_words(u, v).items():
                    acc[w] = coeff.scale(fe(m)) if m != 1 else coeff
                out = out + HLExpr(acc)
        return out

    def __eq__(self, other):
        if not isinstance(other, HLExpr):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(c == other.terms[w] for w, c in self.terms.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def weight(self):
        return max((len(w) for w in self.terms), default=0)

    def letters(self):
        out = set()
        for w in self.terms:
            out.update(w)
        return out

    def coefficient_poles(self):
        out = set()
        for c in self.terms.values():
            out.update(c.poles())
        return out

    def map_coeffs(self, fn) -> "HLExpr":
        out = {}
        for w, c in self.terms.items():
            nc = fn(c)
            if nc:
                out[w] = nc
        return HLExpr(out)

    def __repr__(self):
        if not self.terms:
            return "HL(0)"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), tuple(str(a) for a in w))):
            bits.append("[%s](x)%r" % (",".join(str(a) for a in w), self.terms[w]))
        return "HL{ %s }" % " ; ".join(bits)


def hl_word(word, coeff=None) -> HLExpr:
    word = tuple(letter(a) for a in word)
    return HLExpr({word: coeff if coeff is not None else RatZ.const(1)})


def hl_const(c) -> HLExpr:
    if isinstance(c, RatZ):
        return HLExpr({(): c})
    return HLExpr({(): RatZ.const(c)})


# -- calculus -----------------------------------------------------------------

def d_z(f: HLExpr) -> HLExpr:
    out = HLExpr()
    for w, c in f.terms.items():
        dc = c.deriv()
        if dc:
            out = out + HLExpr({w: dc})
        if w:
            a = w[-1].const_value()
            out = out + HLExpr({w[:-1]: c * rz_mono(a, -1)})
    return out


def residue(f: HLExpr, a) -> HLExpr:
    """Word-wise residue of the coefficients at z = a."""
    a = fe(a)
    out = {}
    for w, c in f.terms.items():
        r = c.residue_at(a)
        if r:
            out[w] = RatZ.const(r)
    return HLExpr(out)


def int0(f: HLExpr) -> HLExpr:
    """Primitive F with d_z F = f and regularized F(0) = 0 (the constant
    Laurent coefficient of F at 0 is removed; log powers regularize to 0)."""
    F = _int0_raw(f)
    c0 = reg_const0(F)
    if c0:
        F = F - hl_const(RatZ.const(c0))
    return F


def reg_const0(f: HLExpr) -> ConstVal:
    """Regularized value at 0: the (log^0, z^0) expansion coefficient."""
    return expand0(f, 0).coeffs.get((0, 0), CV_ZERO)


def _int0_raw(f: HLExpr) -> HLExpr:
    out = HLExpr()
    for w, c in f.terms.items():
        for (a, m), coeff in c.terms.items():
            out = out + _int0_term(w, a, m, coeff)
    return out


def _int0_term(w, a, m, coeff) -> HLExpr:
    if m == -1:
        return HLExpr({w + (const_flt(a),): RatZ.const(coeff)})
    # integration by parts: stock (z-a)^{m+1}/(m+1) * w, then integrate the
    # word-derivative against the raised power
    inv = Fraction(1, m + 1)
    lead = HLExpr({w: rz_mono(a, m + 1, coeff).scale(fe(inv))})
    if not w:
        return lead
    b = w[-1].const_value()
    tail_coeff = (rz_mono(a, m + 1, coeff) * rz_mono(b, -1)).scale(fe(-inv))
    return lead + _int0_raw(HLExpr({w[:-1]: tail_coeff}))




def eval_reg(f: HLExpr, a) -> ConstVal:
    """Shuffle-regularized value at z = a; the coefficients must be finite at a
    (or their poles must cancel against vanishing expansion terms)."""
    a = fe(a)
    if a.is_zero():
        total = CV_ZERO
        for w, c in f.terms.items():
            if not w:
                if c.has_pole_at(a):
                    raise PoleAtPointError("pole at 0")
                total = total + cv(c.eval_at(a))
        return total
    if any(c.has_pole_at(a) for c in f.terms.values()):
        exp = expand_at(f, a, 0)
        bad = {k: v for k, v in exp.coeffs.items()
               if v and (k[1] < 0 or (k[0] > 0 and k[1] == 0))}
        if bad:
            raise PoleAtPointError("pole at %s does not cancel: %s" % (a, bad))
        return exp.coeffs.get((0, 0), CV_ZERO)
    total = CV_ZERO
    for w, c in f.terms.items():
        total = total + regval(w, a) * cv(c.eval_at(a))
    return total


# -- series expansions -----------------------------------------------------------


class Expansion:
    """Truncated expansion sum c_{l,m} log(z-a)^l (z-a)^m (u = 1/z at inf)."""

    __slots__ = ("point", "coeffs", "order")

    def __init__(self, point, coeffs, order):
        self.point = point
        self.coeffs = {k: v for k, v in coeffs.items() if v}
        self.order = order

    def __repr__(self):
        return "Expansion(at=%s, order=%d, %d terms)" % (
            self.point, self.order, len(self.coeffs))


@lru_cache(maxsize=None)
def _series0(word, n: int):
    """Taylor coefficients (tuple) of L_w at 0 for words without leading 0s."""
    if not word:
        return (fe(1),) + (fe(0),) * (n - 1)
    prev = _series0(word[:-1], n)
    b = word[-1].const_value()
    out = [fe(0)] * n
    if b.is_zero():
        for m in range(1, n):
            out[m] = prev[m] / m
    else:
        binv = fe(1) / b
        acc = fe(0)
        powers = fe(1)
        # c_m = -(1/m) sum_{k<m} prev[k] b^{k-m}
        for m in range(1, n):
            # maintain acc = sum_{k<m} prev[k] * b^{k}
            acc = acc + prev[m - 1] * (b ** (m - 1))
            out[m] = -(acc * (binv ** m)) / m
    return tuple(out)


def expand0(f: HLExpr, order: int) -> Expansion:
    """Expansion at 0 into sum c_{l,m} (log z)^l z^m, exact coefficients."""
    coeffs = {}
    for w, c in f.terms.items():
        lau = c.laurent_at(fe(0), order)
        nterms = order - min(lau, default=0) + 1
        for j, cj, v in strip_leading_zeros(w):
            ser = _series0(v, max(nterms, 1))
            pref = Fraction(cj, _fact(j))
            for m1, c1 in lau.items():
                for m2 in range(len(ser)):
                    if not ser[m2]:
                        continue
                    m = m1 + m2
                    if m > order:
                        break
                    key = (j, m)
                    add = cv(c1) * cv(ser[m2]) * fe(pref)
                    coeffs[key] = coeffs.get(key, CV_ZERO) + add
    return Expansion(fe(0), coeffs, order)


def _fact(n):
    r = 1
    for k in range(2, n + 1):
        r *= k
    return r


def expand_at(f: HLExpr, a, order: int) -> Expansion:
    """Expansion at a finite point via path splitting and translation."""
    a = fe(a)
    if a.is_zero():
        return expand0(f, order)
    coeffs = {}
    for w, c in f.terms.items():
        ct = c.subs_translate(a)  # coefficient as function of y = z-a
        for k in range(len(w) + 1):
            pre = regval(w[:k], a)
            if not pre:
                continue
            suffix = tuple(const_flt(lt.const_value() - a) for lt in w[k:])
            sub = expand0(HLExpr({suffix: ct}), order)
            for (l, m), val in sub.coeffs.items():
                key = (l, m)
                coeffs[key] = coeffs.get(key, CV_ZERO) + pre * val
    return Expansion(a, coeffs, order)


@lru_cache(maxsize=None)
def _infseries(word, order: int):
    """Expansion of L_w(1/u) at u = 0: dict (l, m) -> ConstVal."""
    if not word:
        return {(0, 0): CV_ONE}
    prev = _infseries(word[:-1], order)
    b = word[-1].const_value()
    # d/du L_w(1/u) = L_{w'}(1/u) * r(u), r = -1/u (b = 0), else -1/u + 1/(u-1/b)
    deriv = {}

    def _acc(l, m, val):
        if val:
            key = (l, m)
            deriv[key] = deriv.get(key, CV_ZERO) + val

    for (l, m), val in prev.items():
        _acc(l, m - 1, -val)
        if not b.is_zero():
            # 1/(u - 1/b) = -sum_{k>=0} b^{k+1} u^k
            for k in range(0, order - m + 1):
                _acc(l, m + k, -val * (b ** (k + 1)))
    out = {}

    def _put(l, m, val):
        if val and m <= order:
            key = (l, m)
            out[key] = out.get(key, CV_ZERO) + val

    for (l, m), val in deriv.items():
        if m == -1:
            _put(l + 1, 0, val / (l + 1))
        elif m >= 0:
            # integral of u^m log^l u: u^{m+1} sum_j (-1)^j (l)_j log^{l-j}/(m+1)^{j+1}
            fall = 1
            for j in range(l + 1):
                _put(l - j, m + 1, val * Fraction((-1) ** j * fall, (m + 1) ** (j + 1)))
                fall *= (l - j)
        else:  # pragma: no cover
            raise RuntimeError("unexpected pole depth in infinity bootstrap")
    c0 = regval_inf(word)
    if c0:
        out[(0, 0)] = out.get((0, 0), CV_ZERO) + c0
    return out


def expand_inf(f: HLExpr, order: int) -> Expansion:
    """Expansion at infinity in u = 1/z and log u (exact coefficients).

    Note log z = -log u: the caller converts if it wants powers of log z.
    """
    coeffs = {}
    for w, c in f.terms.items():
        lau = c.laurent_at_inf(order + 4 * len(w) + 4)
        ser = _infseries(w, order - min(lau, default=0) + 1)
        for m1, c1 in lau.items():
            for (l, m2), val in ser.items():
                m = m1 + m2
                if m > order:
                    continue
                key = (l, m)
                coeffs[key] = coeffs.get(key, CV_ZERO) + val * cv(c1)
    return Expansion("inf", coeffs, order)


# -- monodromy ---------------------------------------------------------------------

def monodromy_m(f: HLExpr, a) -> HLExpr:
    """Infinitesimal monodromy m_a via word decompositions w = u a v x."""
    a = fe(a)
    la = letter(a)
    out = HLExpr()
    for w, c in f.terms.items():
        n = len(w)
        for i in range(n):
            if w[i] != la:
                continue
            u = w[:i]
            for j in range(i + 1, n + 1):
                v = w[i + 1:j]
                x = w[j:]
                coeff = regval(u, a) * regval(tuple(reversed(v)), a) \
                    * fe((-1) ** len(v))
                if coeff:
                    out = out + HLExpr({x: c.scale(coeff)})
    return out


def monodromy_M(f: HLExpr, a, order: int = None) -> HLExpr:
    """exp(2 pi i m_a) f, an exact finite sum by nilpotency."""
    out = f
    cur = f
    k = 1
    tpi = TWO_PI_I
    fac = CV_ONE
    while True:
        cur = monodromy_m(cur, a)
        if cur.is_zero() or (order is not None and k > order):
            break
        fac = fac * tpi
        coeff = fac.scale(fe(Fraction(1, _fact(k))))
        out = out + cur.map_coeffs(lambda c: c.scale(coeff))
        k += 1
    return out


def pi_dz(f: HLExpr) -> HLExpr:
    """Projection onto the residue-free part (subtract res_a/(z-a))."""
    out = f
    for a in sorted(f.coefficient_poles(), key=str):
        r = eval_reg(residue(f, a), a)
        if r:
            out = out - HLExpr({(): RatZ({(a, -1): r})})
    return out


# -- tagged expressions: generic m and its inverse --------------------------------

class TaggedHL:
    """Element of words (x) HLExpr: terms map tagword -> HLExpr."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for t, f in terms.items():
                if f:
                    self.terms[t] = f

    @staticmethod
    def embed(f: HLExpr) -> "TaggedHL":
        return TaggedHL({(): f})

    def __add__(self, other):
        out = dict(self.terms)
        for t, f in other.terms.items():
            nf = out.get(t)
            nf = f if nf is None else nf + f
            if nf:
                out[t] = nf
            else:
                out.pop(t, None)
        return TaggedHL(out)

    def __neg__(self):
        return TaggedHL({t: -f for t, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, TaggedHL):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and \
            all(f == other.terms[t] for t, f in self.terms.items())

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return "Tagged{%s}" % "; ".join(
            "[%s]: %r" % (",".join(str(a) for a in t), f)
            for t, f in self.terms.items())


def m_generic(x: TaggedHL) -> TaggedHL:
    """m(w (x) f) = sum_a wa (x) m_a f over the letters of f."""
    out = TaggedHL()
    for t, f in x.terms.items():
        for a in sorted({lt.const_value() for w in f.terms for lt in w}, key=str):
            mf = monodromy_m(f, a)
            if mf:
                out = out + TaggedHL({t + (const_flt(a),): mf})
    return out


def m_inverse(x: TaggedHL) -> TaggedHL:
    """Right inverse of m with regularized value 0 at z = 0."""
    for t in x.terms:
        if not t:
            raise ValueError("not in the image of m: empty tag component")
    X = _m_inverse_raw(x)
    # subtract the regularized value at 0 of the HL parts
    out = TaggedHL()
    for t, f in X.terms.items():
        c0 = reg_const0(f)
        if c0:
            f = f - hl_const(RatZ.const(c0))
        out = out + TaggedHL({t: f})
    return out


def _m_inverse_raw(x: TaggedHL) -> TaggedHL:
    if x.is_zero():
        return TaggedHL()
    X0 = TaggedHL()
    for t, f in x.terms.items():
        a = t[-1]
        out_f = HLExpr()
        for w, c in f.terms.items():
            out_f = out_f + HLExpr({(a,) + w: c})
        X0 = X0 + TaggedHL({t[:-1]: out_f})
    y = m_generic(X0) - x
    if y.is_zero():
        return X0
    return X0 - _m_inverse_raw(y)


def pi_m(x: TaggedHL) -> TaggedHL:
    """wa (x) f -> wa (x) (f - f(a)); identity on the empty tag."""
    out = TaggedHL()
    for t, f in x.terms.items():
        if not t:
            out = out + TaggedHL({t: f})
            continue
        a = t[-1].const_value()
        val = eval_reg(f, a)
        g = f - hl_const(RatZ.const(val)) if val else f
        out = out + TaggedHL({t: g})
    return out


def int0_tagged(x: TaggedHL) -> TaggedHL:
    return TaggedHL({t: int0(f) for t, f in x.terms.items()})


def hexagon_m(f: HLExpr) -> HLExpr:
    """Both routes of the one-variable hexagon; asserts they agree exactly."""
    f1 = int0(pi_dz(f))
    route = m_generic(TaggedHL.embed(f))
    route = int0_tagged(route)
    route = pi_m(route)
    f2t = m_inverse(route) if not route.is_zero() else TaggedHL()
    f2 = f2t.terms.get((), HLExpr())
    for t in f2t.terms:
        if t:
            raise HexagonMismatchError("m_inverse left a tagged component")
    if f1 != f2:
        raise HexagonMismatchError("hexagon routes disagree")
    return f1


def mobius_letters(f: HLExpr, A, B) -> HLExpr:
    """Affine change of letters and variable: returns g with
    g(A z + B) = f(z), i.e. letters a -> A a + B, coefficients transformed."""
    A, B = fe(A), fe(B)
    if A.is_zero():
        raise ValueError("A must be nonzero")
    if A != fe(1):
        for w in f.terms:
            if w and w[0].const_value().is_zero():
                raise ValueError("singular-endpoint: leading 0 letter with A != 1")
    out = HLExpr()
    for w, c in f.terms.items():
        nw = tuple(const_flt(A * lt.const_value() + B) for lt in w)
        nc = c.subs_scale(fe(1) / A).subs_translate(-B / A)
        out = out + HLExpr({nw: nc})
    return out


# -- transport: values of hyperlogarithms with FLT letters and argument ------------

INF_TARGET = "inf"


def _dlog_flt(g: Flt) -> RatZ:
    """d/dt log g(t) for an FLT g (0 for constants and the zero function)."""
    out = RatZ()
    if not g.a.is_zero():
        out = out + rz_mono(-g.b / g.a, -1)
    if not g.c.is_zero():
        out = out - rz_mono(-g.d / g.c, -1)
    return out


def _dlog_diff(x: Flt, y: Flt) -> RatZ:
    """d/dt log(x(t) - y(t)) via the FLT difference factorization."""
    b3, b4 = difference_factor(x, y)
    if b3.is_zero_const():
        return RatZ()
    return _dlog_flt(b3) + _dlog_flt(b4)


@lru_cache(maxsize=None)
def transport(word, target, bar: bool = False) -> HLExpr:
    """L_{w(t)}(x(t)) as a one-variable HLExpr in t.

    ``word`` is a tuple of Flt letters (functions of t), ``target`` an Flt
    (constants included) or INF_TARGET.  Integration constants are fixed by
    the recursive regularized-limit convention at t=0; ``bar`` selects the
    conjugate-path value symbols (used when t is the zbar variable).
    """
    word = tuple(word)
    if not word:
        return HLExpr.unit()
    n = len(word)
    deriv = HLExpr()
    for k in range(1, n + 1):
        ak = word[k - 1]
        # factor = d log(a_{k+1} - a_k) - d log(a_k - a_{k-1})
        fac = RatZ()
        if k < n:
            fac = fac + _dlog_diff(word[k], ak)
        else:
            if target != INF_TARGET:
                fac = fac + _dlog_diff(target, ak)
        if k > 1:
            fac = fac - _dlog_diff(ak, word[k - 2])
        else:
            fac = fac - _dlog_flt(ak)
        if not fac:
            continue
        sub = transport(word[:k - 1] + word[k:], target, bar)
        deriv = deriv + sub.map_coeffs(lambda c: c * fac)
    out = int0(deriv)
    # constant: regularized limit at t -> 0
    w0 = []
    drop = False
    for lt in word:
        v = lt(fe(0))
        if v is None:
            drop = True
            break
        w0.append(v)
    if drop:
        c0 = CV_ZERO
    elif target == INF_TARGET:
        c0 = regval_inf(tuple(const_flt(v) for v in w0))
    else:
        x0 = target(fe(0))
        if x0 is None:
            c0 = regval_inf(tuple(const_flt(v) for v in w0))
        else:
            c0 = regval(tuple(const_flt(v) for v in w0), x0, bar)
    if c0:
        out = out + hl_const(RatZ.const(c0))
    return out
