"""Exact constants: polynomials over the field tower in formal generators.

Generators:
  * ``('tpi',)``                    -- 2*pi*i (monodromy only)
  * ``('zeta', n)``                 -- zeta(n) basis symbols (n in {2,3,5})
  * ``('log', a, bar)``             -- regularized log(a) = L_0(a)
  * ``('rv', word, a, bar)``        -- regularized value L_w(a), w a tuple of
                                       constant Flt letters in normal form
                                       (first letter nonzero, last != a)
  * ``('svv', word, a)``            -- single-valued value of an ESVH at a

``bar`` marks the conjugate-path value used for zbar-side factors; it collapses
to the plain symbol whenever the straight segment [0, a] carries no interior
letter (and, for 0-letters, a is not negative real).  Values at the argument 1
with letters in {0, 1} reduce to the zeta basis through the bundled MZV table.
Products of same-point values merge through the shuffle product, so the stored
form is canonical and equality is structural.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .field import FieldElem, QQ, fe
from .flt import Flt, const_flt
from .words import (letter, shuffle_words, strip_leading_zeros,
                    strip_trailing_letter)

__all__ = ["ConstVal", "CV_ZERO", "CV_ONE", "TWO_PI_I", "zeta_sym", "log_sym",
           "regval", "regval_inf", "sv_val", "const_normalize", "mzv_reduce",
           "const_numeric", "mzv_table", "validate_mzv_table", "OutOfTableError",
           "cv"]

INF = "inf"  # marker for the point at infinity in user-facing helpers


class OutOfTableError(Exception):
    """MZV reduction requested beyond the bundled table weight."""


# -- generator bookkeeping ----------------------------------------------------

def _gen_weight(g):
    tag = g[0]
    if tag == "tpi":
        return 1
    if tag == "zeta":
        return g[1]
    if tag == "log":
        return 1
    if tag in ("rv", "svv"):
        return len(g[1])
    raise ValueError(g)


def _gen_sort_key(g):
    return (g[0], tuple(str(x) for x in g[1:]))


def _word_str(w):
    return ",".join(str(a) for a in w)


def _gen_str(g):
    tag = g[0]
    if tag == "tpi":
        return "2pii"
    if tag == "zeta":
        return "z%d" % g[1]
    if tag == "log":
        return "log%s(%s)" % ("~" if g[2] else "", g[1])
    if tag == "rv":
        return "L%s[%s](%s)" % ("~" if g[3] else "", _word_str(g[1]), g[2])
    if tag == "svv":
        return "Ls[%s](%s)" % (_word_str(g[1]), g[2])
    return str(g)


class ConstVal:
    """Canonical sparse polynomial over FieldElem in constant generators."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c
        self._hash = None

    # -- coercion ------------------------------------------------------------

    @staticmethod
    def scalar(x) -> "ConstVal":
        x = fe(x) if not isinstance(x, FieldElem) else x
        if x.is_zero():
            return CV_ZERO
        return ConstVal({(): x})

    @staticmethod
    def _coerce(x):
        if isinstance(x, ConstVal):
            return x
        if isinstance(x, (int, Fraction, FieldElem)):
            return ConstVal.scalar(x)
        return None

    # -- ring ops -----------------------------------------------------------

    def __add__(self, other):
        o = ConstVal._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            nc = out.get(m)
            nc = c if nc is None else nc + c
            if nc:
                out[m] = nc
            else:
                out.pop(m, None)
        return ConstVal(out)

    __radd__ = __add__

    def __neg__(self):
        return ConstVal({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = ConstVal._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = ConstVal._coerce(other)
        if o is None:
            return NotImplemented
        out = CV_ZERO
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                c = c1 * c2
                if not c:
                    continue
                prod = _mono_mul(m1, m2)
                if prod is None:  # plain merge, no shuffle reduction needed
                    m = _merge_plain(m1, m2)
                    nc = acc.get(m)
                    nc = c if nc is None else nc + c
                    if nc:
                        acc[m] = nc
                    else:
                        acc.pop(m, None)
                else:
                    out = out + prod.scale(c)
        return out + ConstVal(acc)

    __rmul__ = __mul__

    def scale(self, c) -> "ConstVal":
        c = fe(c) if not isinstance(c, (FieldElem, int, Fraction)) else c
        if isinstance(c, (int, Fraction)):
            c = fe(c)
        if c.is_zero():
            return CV_ZERO
        return ConstVal({m: cc * c for m, cc in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            return self.scale(fe(1) / fe(other))
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        o = ConstVal._coerce(other)
        if o is None:
            return NotImplemented
        if set(self.terms) != set(o.terms):
            return False
        return all(c == o.terms[m] for m, c in self.terms.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- structure -----------------------------------------------------------

    def weight(self):
        return max((sum(_gen_weight(g) * e for g, e in m) for m in self.terms),
                   default=0)

    def has_tpi(self):
        return any(g[0] == "tpi" for m in self.terms for g, _ in m)

    def rational_part(self) -> FieldElem:
        return self.terms.get((), fe(0))

    def conj(self) -> "ConstVal":
        out = CV_ZERO
        for m, c in self.terms.items():
            piece = ConstVal.scalar(c.conj())
            for g, e in m:
                piece = piece * (_gen_conj(g) ** e)
            out = out + piece
        return out

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of constants not supported")
        out = CV_ONE
        for _ in range(n):
            out = out * self
        return out

    # -- numerics --------------------------------------------------------------

    def numeric(self, dps: int = 30):
        with mp.workdps(dps + 10):
            total = mp.mpc(0)
            for m, c in self.terms.items():
                v = mp.mpc(c._embed_mid(dps + 10))
                for g, e in m:
                    v *= _gen_numeric(g, dps + 10) ** e
                total += v
            return total

    def __repr__(self):
        return "cv(%s)" % (self,)

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=lambda mm: (sum(_gen_weight(g) * e for g, e in mm),
                                                    tuple(_gen_sort_key(g) for g, _ in mm))):
            c = self.terms[m]
            gs = "*".join(_gen_str(g) + ("^%d" % e if e > 1 else "") for g, e in m)
            cs = str(c)
            if not gs:
                bits.append(cs)
            elif cs == "1":
                bits.append(gs)
            elif cs == "-1":
                bits.append("-" + gs)
            else:
                bits.append("(%s)*%s" % (cs, gs))
        out = bits[0]
        for b in bits[1:]:
            out += " - " + b[1:] if b.startswith("-") else " + " + b
        return out


CV_ZERO = ConstVal()
CV_ONE = ConstVal({(): fe(1)})
TWO_PI_I = ConstVal({((("tpi",), 1),): fe(1)})


def cv(x) -> ConstVal:
    out = ConstVal._coerce(x)
    if out is None:
        raise TypeError("cannot coerce %r to ConstVal" % (x,))
    return out


# -- monomial multiplication with shuffle merging -----------------------------

def _merge_plain(m1, m2):
    d = dict(m1)
    for g, e in m2:
        d[g] = d.get(g, 0) + e
    return tuple(sorted(d.items(), key=lambda ge: _gen_sort_key(ge[0])))


def _needs_merge(m):
    seen = {}
    for g, e in m:
        if g[0] == "rv":
            key = ("rv", g[2], g[3])
        elif g[0] == "svv":
            key = ("svv", g[2])
        else:
            continue
        if e > 1 or key in seen:
            return True
        seen[key] = g
    return False


def _mono_mul(m1, m2):
    """Product of two canonical monomials.  Returns None when a plain exponent
    merge suffices, else the fully reduced ConstVal."""
    merged = _merge_plain(m1, m2)
    if not _needs_merge(merged):
        return None
    # pick one mergeable pair and reduce; recurse via ConstVal multiplication
    by_key = {}
    for g, e in merged:
        if g[0] == "rv":
            key = ("rv", g[2], g[3])
        elif g[0] == "svv":
            key = ("svv", g[2])
        else:
            continue
        by_key.setdefault(key, []).append((g, e))
    for key, gens in by_key.items():
        total_exp = sum(e for _, e in gens)
        if total_exp < 2:
            continue
        # extract two factors u, v of this key
        if gens[0][1] >= 2:
            u = v = gens[0][0]
        else:
            u, v = gens[0][0], gens[1][0]
        rest = []
        removed = 0
        for g, e in merged:
            ee = e
            if g == u and removed < 1:
                ee -= 1
                removed += 1
            if g == v and ee > 0 and removed < 2:
                ee -= 1
                removed += 1
            if ee:
                rest.append((g, ee))
        rest = tuple(rest)
        pair = _merge_pair(u, v)
        return ConstVal({rest: fe(1)}) * pair
    return None  # pragma: no cover


@lru_cache(maxsize=None)
def _merge_pair(g1, g2) -> "ConstVal":
    """Shuffle-merge two same-point value generators."""
    if g1[0] == "rv":
        _, w1, a, bar = g1
        w2 = g2[1]
        out = CV_ZERO
        for w, m in shuffle_words(w1, w2).items():
            out = out + regval(w, a, bar).scale(m)
        return out
    if g1[0] == "svv":
        _, w1, a = g1
        w2 = g2[1]
        out = CV_ZERO
        for w, m in shuffle_words(w1, w2).items():
            out = out + sv_val(w, a).scale(m)
        return out
    raise ValueError((g1, g2))  # pragma: no cover


# -- generator constructors -----------------------------------------------------

def zeta_sym(n: int) -> ConstVal:
    if n < 2:
        raise ValueError("zeta symbol needs n >= 2")
    return ConstVal({((("zeta", n), 1),): fe(1)})


def _on_open_segment(b: FieldElem, a: FieldElem) -> bool:
    """Exact test: b lies strictly between 0 and a on the segment."""
    if b.is_zero() or a.is_zero() or b == a:
        return False
    t = b / a
    if not t.is_real():
        return False
    return t.sign_real() > 0 and (fe(1) - t).sign_real() > 0


def _bar_collapses(word, a: FieldElem) -> bool:
    for lt in word:
        b = lt.const_value()
        if _on_open_segment(b, a):
            return False
        if b.is_zero() and a.is_real() and a.sign_real() < 0:
            return False
    return True


def log_sym(a, bar=False) -> ConstVal:
    a = fe(a)
    if a == fe(1):
        return CV_ZERO
    if a.is_zero():
        raise ValueError("log(0) is not regularized to a constant")
    if bar and not (a.is_real() and a.sign_real() < 0):
        bar = False
    return ConstVal({((("log", a, bar), 1),): fe(1)})


def _mzv_lookup(word):
    """Table value for an argument-1 normal-form word over {0,1}, or None."""
    key = tuple(1 if not lt.const_value().is_zero() else 0 for lt in word)
    return mzv_table().get(key)


def regval(word, a, bar=False) -> ConstVal:
    """Regularized value L_w(a) as a canonical ConstVal.

    ``word`` is an iterable of constant letters (Flt or field values); ``a`` is
    a field value or the string 'inf'.
    """
    word = tuple(letter(x) for x in word)
    if a == INF:
        return regval_inf(word)
    a = fe(a)
    if not word:
        return CV_ONE
    if a.is_zero():
        return CV_ZERO
    out = CV_ZERO
    la = letter(a)
    for j, c, u in strip_trailing_letter(word, la):
        # value(a^{j} at a) = (-1)^j L_{0^j}(a) = (-1)^j log(a)^j / j!
        head = _log_power(a, j, bar).scale(Fraction((-1) ** j, _fact(j)))
        for i, c2, v in strip_leading_zeros(u):
            if not v:
                piece = _log_power(a, i, bar).scale(Fraction(1, _fact(i)))
            else:
                piece = _log_power(a, i, bar).scale(Fraction(1, _fact(i))) \
                    * _regval_gen(v, a, bar)
            out = out + (head * piece).scale(c * c2)
    return out


def _fact(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _log_power(a, n, bar) -> ConstVal:
    if n == 0:
        return CV_ONE
    ls = log_sym(a, bar)
    return ls ** n


def _regval_gen(word, a: FieldElem, bar: bool) -> ConstVal:
    """Normal-form generator (word not starting 0, not ending a)."""
    if bar and _bar_collapses(word, a):
        bar = False
    if a == fe(1) and all(lt.const_value() == fe(0) or lt.const_value() == fe(1)
                          for lt in word):
        val = _mzv_lookup(word)
        if val is not None:
            return val
        if len(word) <= mzv_table_max_weight():  # pragma: no cover
            raise OutOfTableError("missing table entry for %s" % (word,))
    return ConstVal({((("rv", word, a, bar), 1),): fe(1)})


def regval_inf(word) -> ConstVal:
    """Regularized value of L_w at infinity, reduced to argument-1 values via
    path composition at 1, path reversal, and the pullback t -> 1/s."""
    word = tuple(letter(x) for x in word)
    if not word:
        return CV_ONE
    out = CV_ZERO
    n = len(word)
    for k in range(n + 1):
        pre = regval(word[:k], fe(1))
        if not pre:
            continue
        out = out + pre * _inf_tail(word[k:])
    return out


@lru_cache(maxsize=None)
def _inf_tail(v) -> ConstVal:
    """I(1, v, infinity) reduced to argument-1 values."""
    if not v:
        return CV_ONE
    rev = tuple(reversed(v))
    sign = (-1) ** len(v)
    # pull back each form dt/(t-a) under t = 1/s:
    #   a == 0: -ds/s ; a != 0: -ds/s + ds/(s - 1/a)
    expansions = [(Fraction(1), ())]
    zero = letter(0)
    for lt in rev:
        a = lt.const_value()
        opts = [(-1, zero)]
        if not a.is_zero():
            opts.append((1, letter(fe(1) / a)))
        expansions = [(c * oc, w + (ol,)) for c, w in expansions for oc, ol in opts]
    out = CV_ZERO
    for c, w in expansions:
        out = out + regval(w, fe(1)).scale(c)
    return out.scale(sign)


def sv_val(word, a) -> ConstVal:
    """Single-valued value symbol Ls_w(a); reducible via the hexagon hook."""
    word = tuple(letter(x) for x in word)
    a = fe(a)
    if not word:
        return CV_ONE
    if a.is_zero():
        return CV_ZERO
    return ConstVal({((("svv", word, a), 1),): fe(1)})


_SV_REDUCER = None


def register_sv_reducer(fn):
    """fn(word, a) -> ConstVal in RegVal form; installed by the hexagon module."""
    global _SV_REDUCER
    _SV_REDUCER = fn


def reduce_sv(c: ConstVal) -> ConstVal:
    """Rewrite all svv generators through the registered hexagon reducer."""
    if _SV_REDUCER is None:
        if any(g[0] == "svv" for m in c.terms for g, _ in m):
            raise RuntimeError("no single-valued reducer registered")
        return c
    out = CV_ZERO
    for m, coeff in c.terms.items():
        piece = ConstVal.scalar(coeff)
        for g, e in m:
            base = _SV_REDUCER(g[1], g[2]) if g[0] == "svv" else ConstVal({((g, 1),): fe(1)})
            piece = piece * base ** e
        out = out + piece
    return out


def _gen_conj(g) -> ConstVal:
    tag = g[0]
    if tag == "tpi":
        return -TWO_PI_I
    if tag == "zeta":
        return zeta_sym(g[1])
    if tag == "log":
        _, a, bar = g
        ac = a.conj()
        if a.is_real() and a.sign_real() < 0:
            return ConstVal({((("log", ac, not bar), 1),): fe(1)})
        return log_sym(ac)
    if tag == "rv":
        _, w, a, bar = g
        wc = tuple(letter(lt.const_value().conj()) for lt in w)
        return _regval_gen_conj(wc, a.conj(), not bar)
    if tag == "svv":
        _, w, a = g
        red = reduce_sv(ConstVal({((g, 1),): fe(1)}))
        if red.terms == {((g, 1),): fe(1)}:  # pragma: no cover
            raise RuntimeError("cannot conjugate unreduced sv value")
        return red.conj()
    raise ValueError(g)  # pragma: no cover


def _regval_gen_conj(word, a, bar) -> ConstVal:
    # same normalization as _regval_gen, but the word is already normal form
    return _regval_gen(word, a, bar)


# -- spec-level operations ---------------------------------------------------------

def const_normalize(c: ConstVal) -> ConstVal:
    """Re-canonicalize (products merged via shuffle); stored values already are."""
    out = CV_ZERO
    for m, coeff in c.terms.items():
        piece = ConstVal.scalar(coeff)
        for g, e in m:
            piece = piece * ConstVal({((g, 1),): fe(1)}) ** e
        out = out + piece
    return out


def mzv_reduce(c: ConstVal) -> ConstVal:
    """Reduce rv/svv generators over {0,1} at argument 1 to the zeta basis."""
    c = reduce_sv(c) if any(g[0] == "svv" for m in c.terms for g, _ in m) else c
    out = CV_ZERO
    for m, coeff in c.terms.items():
        piece = ConstVal.scalar(coeff)
        for g, e in m:
            if g[0] == "rv" and g[2] == fe(1):
                if len(g[1]) > mzv_table_max_weight():
                    raise OutOfTableError("weight %d exceeds bundled table" % len(g[1]))
                val = _mzv_lookup(g[1])
                if val is None:
                    raise OutOfTableError("no entry for %s" % (g[1],))
                piece = piece * val ** e
            else:
                piece = piece * ConstVal({((g, 1),): fe(1)}) ** e
        out = out + piece
    return out


# -- numeric evaluation -------------------------------------------------------------

_NUM_EVALUATOR = None


def register_numeric_evaluator(fn):
    """fn(word, a_or_None_for_inf, dps) -> mpc straight-path value."""
    global _NUM_EVALUATOR
    _NUM_EVALUATOR = fn


def _gen_numeric(g, dps):
    tag = g[0]
    if tag == "tpi":
        return mp.mpc(0, 2) * mp.pi
    if tag == "zeta":
        return mp.zeta(g[1])
    if tag == "log":
        _, a, bar = g
        val = mp.log(mp.mpc(a._embed_mid(dps)))
        return mp.conj(mp.log(mp.mpc(a.conj()._embed_mid(dps)))) if bar else val
    if tag == "rv":
        _, w, a, bar = g
        if _NUM_EVALUATOR is None:
            raise RuntimeError("no numeric evaluator registered")
        if bar:
            wc = tuple(letter(lt.const_value().conj()) for lt in w)
            return mp.conj(_NUM_EVALUATOR(wc, a.conj(), dps))
        return _NUM_EVALUATOR(w, a, dps)
    if tag == "svv":
        red = reduce_sv(ConstVal({((g, 1),): fe(1)}))
        return red.numeric(dps)
    raise ValueError(g)  # pragma: no cover


def const_numeric(c: ConstVal, precision: int = 15):
    """Complex value with target absolute accuracy 10^-precision (heuristic
    working precision, certified by the exactness of the representation)."""
    return c.numeric(precision + 10)


# -- the bundled MZV table --------------------------------------------------------

_TABLE = None
_TABLE_MAX_W = 0


def _table_path():
    env = os.environ.get("SVHEX_MZV_TABLE")
    if env:
        return env
    return os.path.join(os.path.dirname(__file__), "data", "mzv_table.txt")


def _parse_poly(text) -> ConstVal:
    """Parse 'c*z2^2 + d*z3' style polynomials with Fraction coefficients."""
    text = text.replace("-", "+-").replace("++", "+")
    out = CV_ZERO
    for term in text.split("+"):
        term = term.strip()
        if not term:
            continue
        coeff = Fraction(1)
        mono = {}
        for factor in term.split("*"):
            factor = factor.strip()
            if not factor:
                continue
            if factor.startswith("-"):
                coeff = -coeff
                factor = factor[1:].strip()
            if factor.startswith("z"):
                if "^" in factor:
                    zs, es = factor.split("^")
                    mono[("zeta", int(zs[1:]))] = mono.get(("zeta", int(zs[1:])), 0) + int(es)
                else:
                    mono[("zeta", int(factor[1:]))] = mono.get(("zeta", int(factor[1:])), 0) + 1
            else:
                coeff *= Fraction(factor)
        key = tuple(sorted(mono.items(), key=lambda ge: _gen_sort_key(ge[0])))
        out = out + ConstVal({key: fe(coeff)})
    return out


def mzv_table():
    global _TABLE, _TABLE_MAX_W
    if _TABLE is None:
        table = {}
        maxw = 0
        with open(_table_path()) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                wtxt, ptxt = line.split(":")
                word = tuple(int(ch) for ch in wtxt.strip())
                table[word] = _parse_poly(ptxt.strip())
                maxw = max(maxw, len(word))
        _validate_table(table)
        _TABLE, _TABLE_MAX_W = table, maxw
    return _TABLE


def mzv_table_max_weight():
    mzv_table()
    return _TABLE_MAX_W


def _validate_table(table):
    from .mzvnum import mzv_value
    with mp.workdps(30):
        for word, poly in table.items():
            direct = mzv_value(word, dps=30)
            via = poly.numeric(30)
            if abs(direct - via) > mp.mpf("1e-12"):
                raise RuntimeError(
                    "MZV table entry %s fails validation: %s vs %s"
                    % (word, via, direct))


def validate_mzv_table():
    """Force (re)load + numeric validation of the bundled table."""
    global _TABLE
    _TABLE = None
    mzv_table()
    return True
