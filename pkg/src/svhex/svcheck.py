"""Single-valuedness certification through simultaneous log-Laurent
expansions.

The expansion of f at a point a (or infinity) is computed first in z, then the
zbar-dependent coefficients are expanded in zbar, producing exact coefficients
c_{l, lbar, m, mbar} of  log(z-a)^l log(zbar-abar)^lbar (z-a)^m (zbar-abar)^mbar.
Single-valuedness requires bounded pole orders and the two log families to
combine into powers of log|z-a|^2, i.e. the binomial cross-log pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .constants import CV_ZERO, ConstVal, cv
from .field import FieldElem, fe
from .genhyperlog import (GHExpr, expand_z, expand_z_inf, gh_translate,
                          limit0, value_at)
from .hyperlog import expand0 as hl_expand0, expand_inf as hl_expand_inf

__all__ = ["SvExpansion", "SvVerdict", "sv_expand", "residue_anti",
           "is_single_valued"]


@dataclass
class SvExpansion:
    point: object
    coeffs: dict           # (l, lbar, m, mbar) -> ConstVal
    order: int
    min_orders: tuple      # observed (min m, min mbar)

    def cross_combined(self):
        """Coefficients in the combined basis [log|z-a|^2]^L (z-a)^m (zb-ab)^mb;
        raises if the cross-log pattern is violated."""
        out = {}
        for (l, lb, m, mb), c in self.coeffs.items():
            L = l + lb
            t = c / comb(L, l)
            key = (L, m, mb, l)
            out[key] = t
        merged = {}
        for (L, m, mb, l), t in out.items():
            prev = merged.get((L, m, mb))
            if prev is None:
                merged[(L, m, mb)] = t
            elif prev != t:
                raise ValueError("cross-log pattern violated at %s" % ((L, m, mb),))
        return merged


@dataclass
class SvVerdict:
    ok: bool
    witnesses: list
    checked_order: int

    def as_dict(self):
        return {"ok": self.ok,
                "witnesses": [
                    {"point": str(p), "l": l, "lbar": lb, "m": m, "mbar": mb,
                     "coeff": str(c)} for (p, l, lb, m, mb, c) in self.witnesses],
                "checked_order": self.checked_order}


def _coeff_pole_bound(f: GHExpr) -> int:
    """Max pole depth of the rational coefficients (0 for constant ones)."""
    bound = 0
    for rf in f.terms.values():
        for (b, m), r in rf.terms.items():
            if m < 0:
                bound = max(bound, -m)
            for (p, k) in r.terms:
                if k < 0:
                    bound = max(bound, -k)
    return bound


def sv_expand(f: GHExpr, a, order: int):
    """Double expansion of f at a (field value or 'inf').

    Returns (SvExpansion, witnesses): witnesses list the coefficients that
    violate the single-valued shape (pole orders below the allowed bound or
    cross-log mismatches); the expansion is exact to the stated order.
    """
    bound = _coeff_pole_bound(f)
    coeffs = {}
    if a == "inf":
        zexp = expand_z_inf(f, order)
        for (l, m), h in zexp.items():
            sub = hl_expand_inf(h, order)
            for (lb, mb), c in sub.coeffs.items():
                if c:
                    key = (l, lb, m, mb)
                    coeffs[key] = coeffs.get(key, CV_ZERO) + c
        point = "inf"
    else:
        a = fe(a)
        g = gh_translate(f, a) if not a.is_zero() else f
        zexp = expand_z(g, order)
        for (l, m), h in zexp.items():
            sub = hl_expand0(h, order)
            for (lb, mb), c in sub.coeffs.items():
                if c:
                    key = (l, lb, m, mb)
                    coeffs[key] = coeffs.get(key, CV_ZERO) + c
        point = a
    coeffs = {k: c for k, c in coeffs.items() if c}
    min_m = min((k[2] for k in coeffs), default=0)
    min_mb = min((k[3] for k in coeffs), default=0)
    exp = SvExpansion(point, coeffs, order, (min_m, min_mb))
    witnesses = []
    M = -bound
    for (l, lb, m, mb), c in coeffs.items():
        if m < M or mb < M:
            witnesses.append((point, l, lb, m, mb, c))
    # cross-log condition
    groups = {}
    for (l, lb, m, mb), c in coeffs.items():
        groups.setdefault((l + lb, m, mb), {})[(l, lb)] = c
    for (L, m, mb), fam in groups.items():
        if L == 0:
            continue
        ref = None
        for (l, lb), c in fam.items():
            t = c / comb(L, l)
            if ref is None:
                ref = t
            elif ref != t:
                witnesses.append((point, l, lb, m, mb, c - ref * comb(L, l)))
        # missing companions count as violations too
        if ref is not None and ref:
            for l in range(L + 1):
                if (l, L - l) not in fam:
                    witnesses.append((point, l, L - l, m, mb, -ref * comb(L, l)))
    return exp, witnesses


def residue_anti(f: GHExpr, a):
    """(residue, anti-residue) at a finite point: the c_{0,-1,0} and
    c_{0,0,-1} coefficients."""
    from .ratz import rz_mono
    from .ratfunc import RatFunc
    from .flt import const_flt
    a = fe(a)
    shifted = f.scale_rf(RatFunc.pole(const_flt(a), 1))
    res = value_at(shifted, a)
    anti = value_at(f.map_rf(lambda rf: rf.scale_zbar(rz_mono(a.conj(), 1))), a)
    return res, anti


def is_single_valued(f: GHExpr, points=None, order: int = None) -> SvVerdict:
    """Certify single-valuedness via expansions at the constant singular
    points and infinity to the given order (default 2*weight + 4)."""
    if order is None:
        order = 2 * f.weight() + 4
    pts = set(points or ())
    pts.update(f.const_points())
    witnesses = []
    for p in sorted(pts, key=str):
        _, wit = sv_expand(f, p, order)
        witnesses.extend(wit)
    _, wit = sv_expand(f, "inf", order)
    witnesses.extend(wit)
    return SvVerdict(not witnesses, witnesses, order)
