import random
from fractions import Fraction

import mpmath as mp
import pytest

from svhex.field import TOWER, QQ, I, fe


def rand_gaussian(rng, den=7):
    return QQ(rng.randint(-9, 9), rng.randint(1, den)) + I * QQ(rng.randint(-9, 9), rng.randint(1, den))


def test_gaussian_norm():
    a = QQ(1, 2) + I
    b = QQ(1, 2) - I
    assert a * b == QQ(5, 4)


def test_sqrt2_squares_to_two():
    s = TOWER.sqrt(QQ(2))
    assert s * s == QQ(2)
    assert s.sign_real() > 0


def test_div_gaussian():
    a = QQ(1) + I
    b = QQ(1) - I
    assert a / b == I


def test_sqrt_perfect_square():
    assert TOWER.sqrt(QQ(4)) == QQ(2)
    assert TOWER.sqrt(QQ(-1)) == I


def test_ring_axioms_random():
    rng = random.Random(1)
    for _ in range(100):
        a, b, c = (rand_gaussian(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) - b == a


def test_conj_automorphism():
    rng = random.Random(2)
    s2 = TOWER.sqrt(QQ(2))
    for _ in range(50):
        a = rand_gaussian(rng) + s2 * QQ(rng.randint(-3, 3))
        b = rand_gaussian(rng)
        assert (a * b).conj() == a.conj() * b.conj()
        assert a.conj().conj() == a


def test_conj_fixes_positive_real_sqrt():
    s2 = TOWER.sqrt(QQ(2))
    assert s2.conj() == s2
    assert QQ(3, 7).conj() == QQ(3, 7)
    assert (QQ(1) + I).conj() == QQ(1) - I


def test_sqrt_roundtrip_random_tower_elements():
    rng = random.Random(3)
    for _ in range(100):
        x = rand_gaussian(rng, den=4)
        s = TOWER.sqrt(x)
        assert s * s == x


def test_sqrt_product_found_in_tower():
    s2 = TOWER.sqrt(QQ(2))
    s3 = TOWER.sqrt(QQ(3))
    s6 = TOWER.sqrt(QQ(6))
    assert s6 == s2 * s3 or s6 == -(s2 * s3)
    assert s6 * s6 == QQ(6)


def test_embed_basics():
    with mp.workdps(60):
        mid, rad = I.embed(20)
        assert abs(mid - mp.mpc(0, 1)) < mp.mpf("1e-20")
        mid, rad = QQ(1, 3).embed(15)
        assert abs(mid - mp.mpf(1) / 3) < mp.mpf("1e-15")
        assert rad < mp.mpf("1e-15")
        s2 = TOWER.sqrt(QQ(2))
        mid, rad = s2.embed(25)
        assert abs(mid - mp.sqrt(2)) < mp.mpf("1e-24")


def test_embed_respects_arithmetic():
    rng = random.Random(4)
    with mp.workdps(60):
        for _ in range(20):
            a = rand_gaussian(rng)
            b = rand_gaussian(rng)
            am, ar = a.embed(20)
            bm, br = b.embed(20)
            pm, pr = (a * b).embed(20)
            # ball containment: |pm - am*bm| <= pr + |a|br + |b|ar + ar*br
            bound = pr + abs(am) * br + abs(bm) * ar + ar * br
            assert abs(pm - am * bm) <= bound + mp.mpf("1e-30")


def test_principal_branch():
    # sqrt(-4) should be +2i (Re = 0, Im >= 0)
    s = TOWER.sqrt(QQ(-4))
    assert s == 2 * I
    # sqrt of i: principal has positive real part
    si = TOWER.sqrt(I)
    assert si * si == I
    assert si.sign_real() > 0


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QQ(1) / QQ(0)


def test_fraction_coercion():
    assert fe(Fraction(2, 4)) == QQ(1, 2)
    assert (QQ(1, 2) + 1) == QQ(3, 2)
    assert (1 - QQ(1, 2)) == QQ(1, 2)
