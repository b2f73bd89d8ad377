import random

import mpmath as mp

from svhex.field import QQ, I, fe
from svhex.ratz import RatZ, rz_const, rz_mono, rz_var


def rand_ratz(rng, poles, maxdeg=2):
    out = RatZ()
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.4:
            out = out + rz_mono(0, rng.randint(0, maxdeg), QQ(rng.randint(-5, 5)))
        else:
            a = rng.choice(poles)
            out = out + rz_mono(a, -rng.randint(1, 2), QQ(rng.randint(-5, 5)))
    return out


def num(f, z):
    tot = mp.mpc(0)
    for (a, m), c in f.terms.items():
        tot += mp.mpc(c._embed_mid(30)) * (z - mp.mpc(a._embed_mid(30))) ** m
    return tot


POLES = [QQ(0), QQ(1), QQ(-1), QQ(2)]


def test_mul_matches_numeric():
    rng = random.Random(20)
    with mp.workdps(40):
        for _ in range(40):
            f = rand_ratz(rng, POLES)
            g = rand_ratz(rng, POLES)
            h = f * g
            z = mp.mpc(0.37, 0.41)
            assert abs(num(h, z) - num(f, z) * num(g, z)) < mp.mpf("1e-25")


def test_basis_invariant():
    rng = random.Random(21)
    for _ in range(40):
        f = rand_ratz(rng, POLES) * rand_ratz(rng, POLES)
        for (a, m) in f.terms:
            assert m < 0 or a.is_zero()


def test_deriv_and_residue():
    f = rz_mono(1, -1) + rz_mono(0, 2, QQ(3))
    assert f.residue_at(1) == QQ(1)
    assert f.residue_at(0) == QQ(0)
    d = f.deriv()
    assert d == rz_mono(1, -2, QQ(-1)) + rz_mono(0, 1, QQ(6))


def test_eval_and_substitutions():
    f = rz_mono(2, -1) + rz_var()
    assert f.eval_at(3) == QQ(4)
    g = f.subs_translate(1)          # z -> z+1
    assert g.eval_at(2) == f.eval_at(3)
    h = f.subs_scale(QQ(2))          # z -> 2z
    assert h.eval_at(QQ(3, 2)) == f.eval_at(3)
    k = f.subs_invert()              # z -> 1/z
    assert k.eval_at(QQ(1, 3)) == f.eval_at(3)


def test_laurent_at_pole():
    f = rz_mono(1, -2) + rz_mono(0, -1)
    lau = f.laurent_at(1, 3)
    # 1/z at z=1: sum (-1)^j (z-1)^j
    assert lau[-2] == QQ(1)
    assert lau[0] == QQ(1)
    assert lau[1] == QQ(-1)
    assert lau[2] == QQ(1)


def test_laurent_at_inf():
    f = rz_mono(0, 2) + rz_mono(1, -1)
    lau = f.laurent_at_inf(3)
    # z^2 = u^-2 ; 1/(z-1) = u/(1-u) = u + u^2 + u^3 + ...
    assert lau[-2] == QQ(1)
    assert lau[1] == QQ(1)
    assert lau[2] == QQ(1)
    assert lau[3] == QQ(1)


def test_pf_split_exact():
    f = rz_mono(1, -1) * rz_mono(2, -1)
    # 1/((z-1)(z-2)) = 1/(z-2) - 1/(z-1)
    assert f == rz_mono(2, -1) + rz_mono(1, -1, QQ(-1))


def test_mixed_coefficients_with_constants():
    from svhex.constants import zeta_sym
    f = rz_mono(1, -1, zeta_sym(2))
    g = f * rz_mono(0, -1)
    # zeta(2)/((z-1)z) = zeta(2)[1/(z-1) - 1/z]
    assert g == rz_mono(1, -1, zeta_sym(2)) + rz_mono(0, -1, -zeta_sym(2))
