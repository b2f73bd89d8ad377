import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from svhex.field import QQ
from svhex.flt import Flt, const_flt
from svhex.words import (WordPoly, ZERO_LETTER, antipode, letter, letter_deriv,
                         lyndon_factorization, lyndon_polynomial, order_cmp,
                         shuffle, shuffle_words, strip_leading_zeros,
                         strip_trailing_letter, word_of_consts)

A = letter(QQ(2))
B = letter(QQ(3))
ZERO = ZERO_LETTER
ONE = letter(QQ(1))


def wp(*words):
    out = WordPoly()
    for w in words:
        out = out + WordPoly.word(w)
    return out


def test_shuffle_single_letters():
    res = shuffle(WordPoly.word((A,)), WordPoly.word((B,)))
    assert res == wp((A, B), (B, A))


def test_shuffle_unit():
    w = WordPoly.word((A, B, ZERO))
    assert shuffle(WordPoly.unit(), w) == w


def test_shuffle_01_with_1():
    # 01 x 1 -> 2*(011) + 101
    res = shuffle(WordPoly.word((ZERO, ONE)), WordPoly.word((ONE,)))
    expect = WordPoly({(ZERO, ONE, ONE): 2, (ONE, ZERO, ONE): 1})
    assert res == expect


def rand_word(rng, letters, maxlen=4):
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, maxlen)))


def test_shuffle_commutative_associative():
    rng = random.Random(5)
    letters = [ZERO, ONE, A]
    for _ in range(100):
        u, v, w = (WordPoly.word(rand_word(rng, letters)) for _ in range(3))
        assert shuffle(u, v) == shuffle(v, u)
        assert shuffle(shuffle(u, v), w) == shuffle(u, shuffle(v, w))


def test_antipode():
    assert antipode((ZERO, ONE)) == WordPoly({(ONE, ZERO): 1})
    assert antipode((ZERO,)) == WordPoly({(ZERO,): -1})
    assert antipode((A, B, ONE)) == WordPoly({(ONE, B, A): -1})


def test_antipode_hopf_property():
    # sum over deconcatenations w = u.v of antipode(u) x v = 0 for |w| >= 1
    rng = random.Random(6)
    letters = [ZERO, ONE, A]
    for _ in range(30):
        w = rand_word(rng, letters, maxlen=4)
        if not w:
            continue
        total = WordPoly()
        for k in range(len(w) + 1):
            total = total + shuffle(antipode(w[:k]), WordPoly.word(w[k:]))
        assert total.is_zero()


def test_letter_deriv():
    w = (ZERO, ONE)
    assert letter_deriv(w, 0, "left") == WordPoly.word((ONE,))
    assert letter_deriv(w, 1, "left").is_zero()
    assert letter_deriv(w, 1, "right") == WordPoly.word((ZERO,))
    assert letter_deriv((ZERO, ONE, ONE), 1, "right") == WordPoly.word((ZERO, ONE))


def expand_split(triples, run_letter):
    """Expand sum coeff * (run^{j} shuffle u) into a WordPoly."""
    out = WordPoly()
    for j, c, u in triples:
        run = WordPoly.word((run_letter,) * j)
        out = out + shuffle(run, WordPoly.word(u)).scale(c)
    return out


def test_strip_leading_zeros_defining_identity():
    rng = random.Random(7)
    letters = [ZERO, ONE, A]
    for _ in range(60):
        w = rand_word(rng, letters, maxlen=5)
        triples = strip_leading_zeros(w)
        assert expand_split(triples, ZERO) == WordPoly.word(w)
        for j, c, u in triples:
            assert not u or not u[0].is_zero_const()
            assert j + len(u) == len(w)  # weight preserving


def test_strip_leading_zeros_idempotent_forms():
    w = (ONE, ZERO, ONE)
    assert strip_leading_zeros(w) == [(0, 1, w)]
    w = (ZERO, ZERO)
    assert strip_leading_zeros(w) == [(2, 1, ())]


def test_strip_trailing_letter_identity():
    rng = random.Random(8)
    letters = [ZERO, ONE, A]
    for _ in range(60):
        w = rand_word(rng, letters, maxlen=5)
        triples = strip_trailing_letter(w, ONE)
        assert expand_split(triples, ONE) == WordPoly.word(w)
        for j, c, u in triples:
            assert not u or u[-1] != ONE
            assert j + len(u) == len(w)


def test_order_cmp():
    x = WordPoly.word((A, B))
    y = WordPoly.word((A, B, ZERO))
    assert order_cmp(x, y) == -1
    two = WordPoly({(A, B): 1, (B, A): 2})
    assert order_cmp(two, x) == 1
    assert order_cmp(x, x) == 0


def test_lyndon_factorization():
    from svhex.words import word_sort_key
    a, b = letter(QQ(0)), letter(QQ(1))
    w = (b, a, b, a, a)
    fac = lyndon_factorization(w)
    assert tuple(x for f in fac for x in f) == w
    # factors nonincreasing, each strictly smaller than its proper suffixes
    keys = [word_sort_key(f) for f in fac]
    assert keys == sorted(keys, reverse=True)
    for f in fac:
        fk = word_sort_key(f)
        for i in range(1, len(f)):
            assert fk < word_sort_key(f[i:])


def test_lyndon_polynomial_reconstruction():
    rng = random.Random(9)
    letters = [ZERO, ONE]
    for _ in range(25):
        w = rand_word(rng, letters, maxlen=5)
        poly = lyndon_polynomial(w)
        total = WordPoly()
        for key, coeff in poly.items():
            prod = WordPoly.unit()
            for f in key:
                prod = shuffle(prod, WordPoly.word(f))
            total = total + prod.scale(coeff)
        assert total == WordPoly.word(w)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=4), st.lists(st.integers(0, 2), max_size=4))
def test_shuffle_counts(u, v):
    # shuffle of words of lengths m, n has multinomial total count
    letters = [ZERO, ONE, A]
    uw = tuple(letters[i] for i in u)
    vw = tuple(letters[i] for i in v)
    total = sum(shuffle_words(uw, vw).values())
    from math import comb
    assert total == comb(len(u) + len(v), len(u))
