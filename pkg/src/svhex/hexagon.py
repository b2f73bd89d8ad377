"""Single-valued integration via the commutative hexagon.

The single-valued primitive of f = h(z)/(z - beta(zbar)) is assembled from
three pieces: the multivalued z-primitive of the residue-free projection, the
zbar-primitive of the regularized z->0 limit of the anti-residue-free part of
the recursively integrated zbar-derivative, and the residue closure terms
res_a * Ls_a(z).  Extended single-valued hyperlogarithms (ESVHs) iterate the
same integral with the zero-(anti-)residue convention at nonconstant letters;
they form the compact module basis used everywhere downstream.
"""

from __future__ import annotations

from functools import lru_cache

from .constants import (CV_ZERO, ConstVal, cv, register_sv_reducer)
from .field import FieldElem, fe
from .flt import Flt, classify, compose, const_flt, invert
from .genhyperlog import (GHExpr, _zbar_minus_fltz, d, gh_conj, gh_const,
                          gh_from_hl_zbar, gh_hl_z, gh_hl_zbar, gh_term,
                          flt_change_of_var, limit0, primitive_mv, swap_core,
                          value_at)
from .hyperlog import HLExpr, int0 as hl_int0
from .ratfunc import RatFunc, ZFLT, rf_pole
from .ratz import RatZ, rz_mono
from .words import letter, lyndon_polynomial

__all__ = ["pi_d", "sv_int", "sv_int_simple", "ESVHExpr", "esvh_build",
           "esvh_to_basis", "basis_to_esvh", "sv_log", "involution_integrand",
           "swap_variables", "exceptional_check", "residue_const",
           "anti_residue_const"]


def residue_const(f: GHExpr, a) -> ConstVal:
    """Residue of f at the constant point a (the c_{0,-1,0} coefficient)."""
    a = fe(a)
    shifted = f.scale_rf(RatFunc.pole(const_flt(a), 1))
    return value_at(shifted, a)


def anti_residue_const(f: GHExpr, a) -> ConstVal:
    """Anti-residue at a (the c_{0,0,-1} coefficient)."""
    a = fe(a)
    return value_at(f.map_rf(lambda rf: rf.scale_zbar(rz_mono(a.conj(), 1))), a)


def _const_pole_points_z(f: GHExpr):
    out = set()
    for rf in f.terms.values():
        out.update(rf.const_poles())
    return sorted(out, key=str)


def _const_pole_points_zbar(f: GHExpr):
    out = set()
    for rf in f.terms.values():
        for r in rf.terms.values():
            for (p, k) in r.terms:
                if k < 0:
                    out.add(p.conj())
    return sorted(out, key=str)


def pi_d(f: GHExpr, var: str) -> GHExpr:
    """Projection onto the (anti-)residue-free part at the constant points."""
    out = f
    if var == "z":
        for a in _const_pole_points_z(f):
            r = residue_const(f, a)
            if r:
                out = out - gh_const(RatFunc.pole(const_flt(a), -1)).scale(r)
    elif var in ("zb", "zbar"):
        for a in _const_pole_points_zbar(f):
            r = anti_residue_const(f, a)
            if r:
                out = out - gh_const(
                    RatFunc.from_zbar(rz_mono(a.conj(), -1))).scale(r)
    else:
        raise ValueError("var must be 'z' or 'zb'")
    return out


def sv_log(a) -> GHExpr:
    """Ls_a(z) = L_a(z) + L_{conj a}(zbar), the residue closure block."""
    a = fe(a)
    return gh_hl_z((const_flt(a),)) + gh_hl_zbar((const_flt(a.conj()),))


@lru_cache(maxsize=None)
def _sv_core(v, w, b: Flt) -> GHExpr:
    """Single-valued z-primitive of L_v(zbar) L_w(z) / (z - b(zbar)) with the
    zero-residue convention at nonconstant b (the ESVH convention; for
    genuinely single-valued integrands the skipped residues vanish anyway)."""
    f = GHExpr({(v, w): RatFunc.pole(b, -1)})
    res_term = GHExpr()
    pf = f
    if b.is_constant():
        a = b.const_value()
        r = value_at(GHExpr({(v, w): RatFunc.const(1)}), a)
        if r:
            pf = pf - gh_const(RatFunc.pole(b, -1)).scale(r)
            res_term = sv_log(a).scale(r)
    part1 = primitive_mv(pf, "z")
    # zbar route: G = sv-int of d_zbar f, anti-residues removed, limit z -> 0
    df = d(f, "zb")
    if df:
        G = sv_int(df, "z")
        G = pi_d(G, "zb")
        g = limit0(G)
        if g:
            part1 = part1 + gh_from_hl_zbar(hl_int0(g))
    return part1 + res_term


def sv_int_simple(f: GHExpr, var: str = "z") -> GHExpr:
    """Single-valued primitive for simple-pole integrands (hexagon core)."""
    return sv_int(f, var)


def sv_int(f: GHExpr, var: str = "z") -> GHExpr:
    """Single-valued (anti-)primitive on the GH span; the zbar side goes
    through complex conjugation (conjugation commutes with integration)."""
    if var in ("zb", "zbar"):
        return gh_conj(sv_int(gh_conj(f), "z"))
    if var != "z":
        raise ValueError("var must be 'z' or 'zb'")
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        for (b, m), r in rf.terms.items():
            if m == -1:
                core = _sv_core(v, w, b)
                out = out + core.map_rf(lambda x, rr=r: x.scale_zbar(rr))
            else:
                out = out + _sv_ibp(v, w, b, m).map_rf(
                    lambda x, rr=r: x.scale_zbar(rr))
    return out


@lru_cache(maxsize=None)
def _sv_ibp(v, w, b: Flt, m: int) -> GHExpr:
    """Integration by parts: sv-int of (z-b)^m L_v L_w with m != -1."""
    from fractions import Fraction
    inv = Fraction(1, m + 1)
    lead = GHExpr({(v, w): RatFunc.pole(b, m + 1).scale(fe(inv))})
    if not w:
        return lead
    tail_rf = (RatFunc.pole(b, m + 1) * rf_pole(w[-1], -1)).scale(fe(-inv))
    out = lead
    for (b2, m2), r2 in tail_rf.terms.items():
        if m2 == -1:
            piece = _sv_core(v, w[:-1], b2)
        else:
            piece = _sv_ibp(v, w[:-1], b2, m2)
        out = out + piece.map_rf(lambda x, rr=r2: x.scale_zbar(rr))
    return out


# -- extended single-valued hyperlogarithms -----------------------------------------

class ESVHExpr:
    """Linear combination of Ls-words with RatFunc prefactors."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, rf in terms.items():
                if isinstance(rf, RatFunc):
                    if rf:
                        self.terms[w] = rf
                else:
                    c = cv(rf) if not isinstance(rf, ConstVal) else rf
                    if c:
                        self.terms[w] = RatFunc.const(c)

    @staticmethod
    def word(w, coeff=1):
        w = tuple(letter(a) if not isinstance(a, Flt) else a for a in w)
        return ESVHExpr({w: coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for w, rf in other.terms.items():
            nr = out.get(w)
            nr = rf if nr is None else nr + rf
            if nr:
                out[w] = nr
            else:
                out.pop(w, None)
        return ESVHExpr(out)

    def __neg__(self):
        return ESVHExpr({w: -rf for w, rf in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return ESVHExpr()
        return ESVHExpr({w: rf.scale(c) for w, rf in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ESVHExpr):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and \
            all(rf == other.terms[w] for w, rf in self.terms.items())

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def weight(self):
        return max((len(w) for w in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "Ls(0)"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), str(w))):
            bits.append("{%r}*Ls[%s](z)" % (
                self.terms[w], ",".join(str(a) for a in w)))
        return " + ".join(bits)


@lru_cache(maxsize=None)
def esvh_build(word) -> GHExpr:
    """Basis form of Ls_w(z) by iterated single-valued integration."""
    word = tuple(word)
    if not word:
        return GHExpr.unit()
    prev = esvh_build(word[:-1])
    b = word[-1]
    integrand = prev.scale_rf(RatFunc.pole(b, -1))
    return sv_int(integrand, "z")


def esvh_to_basis(f: ESVHExpr) -> GHExpr:
    out = GHExpr()
    for w, rf in f.terms.items():
        out = out + esvh_build(w).map_rf(lambda x, r=rf: x * r)
    return out


def basis_to_esvh(f: GHExpr) -> ESVHExpr:
    """Inverse conversion by unitriangular peeling on the (e, w) components."""
    g = f
    out = ESVHExpr()
    guard = 0
    while not g.is_zero():
        guard += 1
        if guard > 10000:  # pragma: no cover
            raise RuntimeError("basis_to_esvh failed to terminate")
        maxw = g.weight()
        lead = [(v, w) for (v, w) in g.terms
                if not v and len(w) == maxw]
        if not lead:
            raise ValueError("not in the ESVH span: %r" % (g,))
        progressed = False
        for key in lead:
            rf = g.terms.get(key)
            if not rf:
                continue
            w = key[1]
            out = out + ESVHExpr({w: rf})
            g = g - esvh_build(w).map_rf(lambda x, r=rf: x * r)
            progressed = True
        if not progressed:  # pragma: no cover
            raise ValueError("no progress in ESVH conversion")
    return out


def sv_value(word, a) -> ConstVal:
    """Value of the ESVH Ls_w at the point a (used as the sv-symbol reducer)."""
    return value_at(esvh_build(tuple(word)), fe(a))


register_sv_reducer(sv_value)


# -- involution constructions ---------------------------------------------------------

def swap_variables(f: GHExpr) -> GHExpr:
    """The function z -> f(zbar): formally swap z and zbar and re-express in
    the standard basis (coefficients untouched)."""
    out = GHExpr()
    for (v, w), rf in f.terms.items():
        piece = gh_const(_rf_swap(rf))
        if v:
            piece = piece * gh_hl_z(tuple(v))
        if w:
            piece = piece * swap_core(tuple(w))
        out = out + piece
    return out


def _rf_swap(rf: RatFunc) -> RatFunc:
    out = RatFunc()
    for (b, m), r in rf.terms.items():
        if b.is_zero_const():
            piece = RatFunc.from_zbar(rz_mono(fe(0), m))
        else:
            piece = _zbar_minus_fltz(b, m)
        acc = RatFunc()
        for (p, k), c in r.terms.items():
            acc = acc + RatFunc.pole(const_flt(p), k, RatZ.const(c))
        out = out + piece * acc
    return out


def subst_tau(h: GHExpr, b: Flt) -> GHExpr:
    """The function z -> h(beta(zbar))."""
    if b == Flt(fe(1), fe(0), fe(0), fe(1)):
        return swap_variables(h)
    return swap_variables(flt_change_of_var(h, b))


def involution_integrand(h: GHExpr, b: Flt) -> GHExpr:
    """(h(z) - h(beta(zbar)))/(z - beta(zbar)) for an involution beta."""
    cls = classify(b)
    if b.is_constant() or not cls.is_involution:
        raise ValueError("beta must be an involution (beta o beta-bar = id)")
    num = h - subst_tau(h, b)
    return num.scale_rf(RatFunc.pole(b, -1))


# -- exceptionality ---------------------------------------------------------------------

def exceptional_check(h: GHExpr, b: Flt, basis_words=None) -> str:
    """Classify the generating pair (h, beta) of an sv-integral: 'empty-locus',
    'involution-factor', or 'exceptional'."""
    cls = classify(b)
    if cls.in_empty:
        return "empty-locus"
    if not cls.is_involution:
        return "exceptional"
    if _factorizes_with_involution(h, b, basis_words):
        return "involution-factor"
    return "exceptional"


def _factorizes_with_involution(h: GHExpr, b: Flt, basis_words) -> bool:
    """Decide whether h = (h1 - h1 o tau) h2 over the ESVH Lyndon algebra."""
    import sympy

    esvh = basis_to_esvh(h)
    if esvh.is_zero():
        return True
    # express h as a polynomial in Lyndon words over the constants
    poly, symbols = _lyndon_sympy_poly(esvh)
    factors = sympy.factor_list(poly)
    base_factors = []
    for fac, mult in factors[1]:
        base_factors.extend([fac] * mult)
    const_part = factors[0]
    if not base_factors:
        return False
    # enumerate splits A * B with A drawn from a subset of the factors and
    # test tau(A) == -A
    n = len(base_factors)
    for mask in range(1, 1 << n):
        A = sympy.Integer(1)
        for i in range(n):
            if mask & (1 << i):
                A = A * base_factors[i]
        A = sympy.expand(A)
        if _is_tau_antisymmetric(A, symbols, b):
            return True
    return False


def _lyndon_sympy_poly(esvh: ESVHExpr):
    import sympy

    sym_cache = {}

    def lyndon_symbol(word):
        if word not in sym_cache:
            sym_cache[word] = sympy.Symbol("Ly%d" % len(sym_cache))
        return sym_cache[word]

    zeta_syms = {}

    poly = sympy.Integer(0)
    for w, rf in esvh.terms.items():
        c = rf.const_value()
        cexpr = _constval_to_sympy(c, zeta_syms)
        for key, coeff in lyndon_polynomial(w).items():
            mono = sympy.Integer(1)
            for lw in key:
                mono = mono * lyndon_symbol(lw)
            poly = poly + cexpr * sympy.Rational(coeff) * mono
    return sympy.expand(poly), sym_cache


def _constval_to_sympy(c: ConstVal, zeta_syms):
    import sympy

    out = sympy.Integer(0)
    for m, coeff in c.terms.items():
        if not coeff.is_rational():
            raise ValueError("non-rational constant in factorization test")
        term = sympy.Rational(coeff.as_fraction())
        for g, e in m:
            if g[0] != "zeta":
                raise ValueError("unsupported constant generator %s" % (g,))
            zs = zeta_syms.setdefault(g[1], sympy.Symbol("zeta%d" % g[1]))
            term = term * zs ** e
        out = out + term
    return out


def _is_tau_antisymmetric(A, symbols, b: Flt) -> bool:
    """tau(A) == -A where tau acts on the Lyndon generators through the
    variable swap z -> beta(zbar)."""
    import sympy

    subs = {}
    for word, sym in symbols.items():
        img = subst_tau(esvh_build(word), b)
        try:
            img_esvh = basis_to_esvh(img)
        except ValueError:
            return False
        expr = sympy.Integer(0)
        zeta_syms = {}
        for w2, rf in img_esvh.terms.items():
            c = rf.const_value()
            cexpr = _constval_to_sympy(c, zeta_syms)
            for key, coeff in lyndon_polynomial(w2).items():
                mono = sympy.Integer(1)
                for lw in key:
                    if lw not in symbols:
                        symbols[lw] = sympy.Symbol("Ly%d" % len(symbols))
                    mono = mono * symbols[lw]
                expr = expr + cexpr * sympy.Rational(coeff) * mono
        subs[sym] = expr
    out = sympy.expand(A.subs(subs, simultaneous=True) + A)
    return out == 0
