import random

import pytest

from svhex.field import QQ, I, TOWER
from svhex.flt import (Flt, ID_FLT, classify, compose, const_flt,
                       difference_factor, dlog_z_of, invert)


def rand_flt(rng, allow_const=False):
    while True:
        coeffs = [QQ(rng.randint(-4, 4)) + I * rng.randint(-2, 2) for _ in range(4)]
        try:
            f = Flt(*coeffs)
        except ValueError:
            continue
        if allow_const or not f.is_constant():
            return f


def test_compose_inverses():
    recip = Flt(0, 1, 1, 0)           # 1/t
    assert compose(recip, recip) == ID_FLT
    shift = Flt(1, 1, 0, 1)           # t+1
    unshift = Flt(1, -1, 0, 1)        # t-1
    assert compose(shift, unshift) == ID_FLT
    f = Flt(1, 0, 1, -1)              # t/(t-1), an involution under plain composition
    assert compose(f, f) == ID_FLT


def test_invert_formula():
    f = Flt(2, 3, 5, 7)
    g = invert(f)
    assert compose(f, g) == ID_FLT
    assert compose(g, f) == ID_FLT
    assert invert(Flt(1, 5, 0, 1)) == Flt(1, -5, 0, 1)
    assert invert(Flt(0, 1, 1, 0)) == Flt(0, 1, 1, 0)
    with pytest.raises(ValueError):
        invert(const_flt(QQ(3)))


def test_compose_associative_random():
    rng = random.Random(10)
    for _ in range(50):
        f, g, h = (rand_flt(rng, allow_const=True) for _ in range(3))
        assert compose(compose(f, g), h) == compose(f, compose(g, h))


def _as_rational_pair(f):
    """Return (num, den) coefficient tuples of f as polynomials in t."""
    return ((f.a, f.b), (f.c, f.d))


def _poly_mul(p, q):
    out = [QQ(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        for j, qj in enumerate(q):
            out[i + j] = out[i + j] + pi * qj
    return out


def _flt_num_den(f):
    return [f.a, f.b], [f.c, f.d]


def test_difference_factor_examples():
    t = Flt(1, 0, 0, 1)
    recip = Flt(0, 1, 1, 0)
    b3, b4 = difference_factor(t, recip)
    # t - 1/t = (t-1)(t+1)/t; check the product identity symbolically below
    _check_difference(t, recip, b3, b4)
    one_minus = Flt(-1, 1, 0, 1)
    b3, b4 = difference_factor(t, one_minus)
    _check_difference(t, one_minus, b3, b4)
    b3, b4 = difference_factor(t, t)
    assert b3.is_zero_const()


def _check_difference(b1, b2, b3, b4):
    # (b1 - b2) - b3*b4 == 0 as rational functions: cross-multiply everything.
    n1, d1 = _flt_num_den(b1)
    n2, d2 = _flt_num_den(b2)
    n3, d3 = _flt_num_den(b3)
    n4, d4 = _flt_num_den(b4)
    # b1 - b2 = (n1 d2 - n2 d1) / (d1 d2); b3 b4 = n3 n4 / (d3 d4)
    lhs_num = [x - y for x, y in
               zip(_pad(_poly_mul(n1, d2), 4), _pad(_poly_mul(n2, d1), 4))]
    lhs = _poly_mul(lhs_num, _poly_mul(d3, d4))
    rhs = _poly_mul(_poly_mul(n3, n4), _poly_mul(d1, d2))
    for x, y in zip(_pad(lhs, 8), _pad(rhs, 8)):
        assert x == y


def _pad(p, n):
    return p + [QQ(0)] * (n - len(p))


def test_difference_factor_random():
    rng = random.Random(11)
    for _ in range(200):
        b1 = rand_flt(rng, allow_const=True)
        b2 = rand_flt(rng, allow_const=True)
        b3, b4 = difference_factor(b1, b2)
        _check_difference(b1, b2, b3, b4)


def test_dlog_z_of():
    recip = Flt(0, 1, 1, 0)  # beta(z) = 1/z
    poles = dlog_z_of(recip)
    assert poles[0][0] == 1 and poles[0][1] == invert(recip)
    assert poles[1][0] == -1 and poles[1][1] == const_flt(QQ(0))
    aff = Flt(2, 3, 0, 1)    # beta(z) = 2z+3, c=0: one pole only
    poles = dlog_z_of(aff)
    assert len(poles) == 1
    assert poles[0] == (1, invert(aff))
    ident = Flt(1, 0, 0, 1)
    poles = dlog_z_of(ident)
    assert poles == [(1, ident)]


def test_classify_examples():
    # beta(zbar) = -1/zbar: z*zbar = -1 empty
    neg_recip = Flt(0, -1, 1, 0)
    cls = classify(neg_recip)
    assert cls.in_empty and not cls.is_constant
    # identity: locus = real axis, involution
    cls = classify(ID_FLT)
    assert cls.is_involution and not cls.in_empty
    # beta(zbar) = 1/zbar: unit circle, involution, not empty
    recip = Flt(0, 1, 1, 0)
    cls = classify(recip)
    assert cls.is_involution and not cls.in_empty
    cls = classify(const_flt(QQ(2)))
    assert cls.is_constant and not cls.in_empty


def test_classify_more_loci():
    # z = zbar + i: x - iy = x + iy + i -> y = -1/2 nonempty
    f = Flt(1, I, 0, 1)
    assert not classify(f).in_empty
    # z = 2/zbar: |z|^2 = 2 circle nonempty
    f = Flt(0, 2, 1, 0)
    assert not classify(f).in_empty
    # z = -2/zbar: empty
    f = Flt(0, -2, 1, 0)
    assert classify(f).in_empty


def test_involution_normal_form():
    rng = random.Random(12)
    # build involutions via the normal form (a z + b)/(c z + a-bar), b,c imag
    for _ in range(30):
        a = QQ(rng.randint(-3, 3)) + I * rng.randint(-3, 3)
        b = I * rng.randint(-3, 3)
        c = I * rng.randint(-3, 3)
        try:
            f = Flt(a, b, c, a.conj())
        except ValueError:
            continue
        if f.is_constant():
            continue
        assert classify(f).is_involution
        # recover normal form scale-invariantly: b-bar = -b, c-bar = -c after
        # scaling by the phase that makes d == a-bar
        assert compose(f, f.conj_coeffs()) == ID_FLT
