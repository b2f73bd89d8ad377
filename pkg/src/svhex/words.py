"""Free shuffle algebra on words whose letters are FLTs.

Words are tuples of Flt (constants as degenerate FLTs).  WordPoly is a sparse
linear combination of words over an arbitrary coefficient ring (int, Fraction,
FieldElem or ConstVal -- anything with +, *, negation and truthiness).

The regularization rewrites both return "split" lists [(j, coeff, word)]
encoding sums of shuffle products (0-run or trailing-run shuffled with a run
free word); expanding the shuffles reproduces the input word exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .field import FieldElem, QQ, fe
from .flt import Flt, const_flt

__all__ = ["Word", "WordPoly", "ZERO_LETTER", "letter", "word_of_consts",
           "shuffle_words", "shuffle", "antipode", "letter_deriv",
           "strip_leading_zeros", "strip_trailing_letter", "order_cmp",
           "lyndon_factorization", "lyndon_polynomial", "concat"]

Word = tuple  # tuple[Flt, ...]

ZERO_LETTER = const_flt(QQ(0))


def letter(x) -> Flt:
    """Coerce a constant or Flt into a letter."""
    if isinstance(x, Flt):
        return x
    return const_flt(fe(x))


def word_of_consts(*vals) -> Word:
    return tuple(letter(v) for v in vals)


def weight(w: Word) -> int:
    return len(w)


def depth(w: Word) -> int:
    return sum(1 for a in w if not a.is_zero_const())


def concat(u: Word, v: Word) -> Word:
    return u + v


@lru_cache(maxsize=None)
def shuffle_words(u: Word, v: Word):
    """Shuffle product of two words as a dict word -> integer coefficient."""
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out = {}
    for w, c in shuffle_words(u[:-1], v).items():
        key = w + (u[-1],)
        out[key] = out.get(key, 0) + c
    for w, c in shuffle_words(u, v[:-1]).items():
        key = w + (v[-1],)
        out[key] = out.get(key, 0) + c
    return out


class WordPoly:
    """Sparse linear combination of words; immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @staticmethod
    def unit():
        return WordPoly({(): 1})

    @staticmethod
    def word(w, coeff=1):
        return WordPoly({tuple(w): coeff})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            nc = out.get(w, 0) + c
            if nc:
                out[w] = nc
            else:
                out.pop(w, None)
        return WordPoly(out)

    def __neg__(self):
        return WordPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return WordPoly()
        return WordPoly({w: cc * c for w, cc in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, WordPoly):
            return NotImplemented
        return _terms_equal(self.terms, other.terms)

    def __hash__(self):
        return hash(frozenset((w, _hashable(c)) for w, c in self.terms.items()))

    def max_weight(self):
        return max((len(w) for w in self.terms), default=-1)

    def __repr__(self):
        if not self.terms:
            return "WordPoly(0)"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), tuple(str(x) for x in w))):
            bits.append("%s*[%s]" % (self.terms[w], ",".join(str(a) for a in w)))
        return "WordPoly(%s)" % " + ".join(bits)


def _hashable(c):
    return c


def _terms_equal(a, b):
    if set(a) != set(b):
        # allow coefficients that compare equal across types
        for w in set(a) | set(b):
            ca = a.get(w, 0)
            cb = b.get(w, 0)
            if not _ceq(ca, cb):
                return False
        return True
    return all(_ceq(c, b[w]) for w, c in a.items())


def _ceq(x, y):
    return not (x - y)


def shuffle(x: WordPoly, y: WordPoly) -> WordPoly:
    """Bilinear extension of the word shuffle."""
    out = {}
    for u, cu in x.terms.items():
        for v, cv in y.terms.items():
            c = cu * cv
            for w, m in shuffle_words(u, v).items():
                nc = out.get(w, 0) + c * m
                if nc:
                    out[w] = nc
                else:
                    out.pop(w, None)
    return WordPoly(out)


def antipode(w: Word) -> WordPoly:
    """w -> (-1)^|w| * reversed(w) (path reversal)."""
    return WordPoly({tuple(reversed(w)): (-1) ** len(w)})


def letter_deriv(w: Word, a, side: str) -> WordPoly:
    """Left/right letter derivations: delta_a^l(au) = u, delta_a^r(va) = v."""
    a = letter(a)
    if not w:
        return WordPoly()
    if side == "left":
        return WordPoly({w[1:]: 1}) if w[0] == a else WordPoly()
    if side == "right":
        return WordPoly({w[:-1]: 1}) if w[-1] == a else WordPoly()
    raise ValueError("side must be 'left' or 'right'")


def _leading_zeros(w: Word) -> int:
    k = 0
    while k < len(w) and w[k].is_zero_const():
        k += 1
    return k


def strip_leading_zeros(w: Word):
    """Unique rewrite of 0^k a u (a != 0) as sum_i (-1)^i 0^{k-i} shuffled with
    a[0^i shuffle u]; returned as split triples (j, coeff, regular_word) whose
    shuffle expansion sum coeff * (0^{j} shuffle word) equals w.  Pure-zero and
    regular words pass through unchanged.
    """
    w = tuple(w)
    k = _leading_zeros(w)
    if k == 0 or k == len(w):
        return [(k if k == len(w) else 0, 1, w if k == 0 else ())]
    a = w[k]
    u = w[k + 1:]
    out = []
    for i in range(k + 1):
        inner = shuffle_words((ZERO_LETTER,) * i, u)
        for v, m in inner.items():
            out.append((k - i, (-1) ** i * m, (a,) + v))
    return _merge_split(out)


def _merge_split(triples):
    acc = {}
    for j, c, u in triples:
        key = (j, u)
        nc = acc.get(key, 0) + c
        if nc:
            acc[key] = nc
        else:
            acc.pop(key, None)
    return [(j, c, u) for (j, u), c in sorted(
        acc.items(), key=lambda kv: (kv[0][0], len(kv[0][1]),
                                     tuple(str(x) for x in kv[0][1])))]


@lru_cache(maxsize=None)
def strip_trailing_letter(w: Word, a: Flt):
    """Split w as sum of shuffles a^{j} shuffle u with u not ending in a.

    Returns tuples (j, coeff, u); expanding sum coeff*(a^{{j}} shuffle u)
    reproduces w.  Used for shuffle regularization of evaluations at a.
    """
    w = tuple(w)
    if not w or w[-1] != a:
        return ((0, 1, w),)
    k = 0
    while k < len(w) and w[-1 - k] == a:
        k += 1
    v = w[:len(w) - k]
    run = (a,) * k
    q = shuffle_words(v, run)
    out = [(k, 1, v)]
    for wp, m in q.items():
        if wp == w:
            m -= 1
        if not m:
            continue
        for j, c, u in strip_trailing_letter(wp, a):
            out.append((j, -m * c, u))
    return tuple(_merge_split(out))


def order_cmp(x: WordPoly, y: WordPoly) -> int:
    """Strict partial order by (max weight, number of max-weight words);
    returns -1, 0 (equal rank / incomparable), or 1."""
    wx, wy = x.max_weight(), y.max_weight()
    if wx != wy:
        return -1 if wx < wy else 1
    nx = sum(1 for w in x.terms if len(w) == wx)
    ny = sum(1 for w in y.terms if len(w) == wy)
    if nx != ny:
        return -1 if nx < ny else 1
    return 0


# -- Lyndon machinery (used by the single-valued integration module) ----------


def _letter_key(a: Flt):
    return tuple(str(x) for x in a.key())


def word_sort_key(w: Word):
    return tuple(_letter_key(a) for a in w)


def lyndon_factorization(w: Word):
    """Duval factorization of w into a nonincreasing product of Lyndon words."""
    w = list(w)
    keys = [_letter_key(a) for a in w]
    out = []
    i = 0
    n = len(w)
    while i < n:
        j, k = i + 1, i
        while j < n and keys[k] <= keys[j]:
            if keys[k] < keys[j]:
                k = i
            else:
                k += 1
            j += 1
        while i <= k:
            out.append(tuple(w[i:i + j - k]))
            i += j - k
    return out


def lyndon_polynomial(w: Word):
    """Express the word w as a polynomial in Lyndon words for the shuffle
    product: returns dict {multiset-of-lyndon-words (sorted tuple): Fraction}.
    """
    w = tuple(w)
    result = {}
    stack = [(w, Fraction(1))]
    while stack:
        cur, coeff = stack.pop()
        if not cur:
            key = ()
            result[key] = result.get(key, Fraction(0)) + coeff
            continue
        factors = lyndon_factorization(cur)
        key = tuple(sorted(factors, key=word_sort_key))
        mult = Fraction(1)
        seen = {}
        for f in factors:
            seen[f] = seen.get(f, 0) + 1
        for m in seen.values():
            for r in range(1, m + 1):
                mult *= r
        # shuffle product of the factors = mult * cur + lower (in lex) words
        expansion = {(): 1}
        for f in factors:
            nxt = {}
            for u, c in expansion.items():
                for v, m in shuffle_words(u, f).items():
                    nxt[v] = nxt.get(v, 0) + c * m
            expansion = nxt
        result[key] = result.get(key, Fraction(0)) + coeff / mult
        for u, c in expansion.items():
            if u == cur:
                c -= mult
            if c:
                stack.append((u, -coeff * Fraction(c, 1) / mult))
    return {k: v for k, v in result.items() if v}
