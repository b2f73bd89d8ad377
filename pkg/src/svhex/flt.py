"""Fractional linear transformations beta(t) = (a*t + b)/(c*t + d) over the tower.

Letters of hyperlogarithm words are Flt values; constants are the degenerate
FLTs (0*t + b)/(0*t + 1).  Canonical form: the first nonzero coefficient in
the order (a, b, c, d) is scaled to 1, so structural equality is functional
equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldElem, QQ, TOWER, fe

__all__ = ["Flt", "FltClass", "const_flt", "ID_FLT", "compose", "invert",
           "difference_factor", "dlog_z_of", "classify"]


class Flt:
    """Immutable FLT with FieldElem coefficients in canonical form."""

    __slots__ = ("a", "b", "c", "d", "_hash")

    def __init__(self, a, b, c, d):
        a, b, c, d = fe(a), fe(b), fe(c), fe(d)
        for lead in (a, b, c, d):
            if not lead.is_zero():
                inv = lead.inv()
                a, b, c, d = a * inv, b * inv, c * inv, d * inv
                break
        else:
            raise ValueError("all four FLT coefficients are zero")
        self.a, self.b, self.c, self.d = a, b, c, d
        self._hash = None

    def key(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, Flt):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def det(self) -> FieldElem:
        return self.a * self.d - self.b * self.c

    def is_constant(self) -> bool:
        return self.det().is_zero()

    def is_identity(self) -> bool:
        return self == ID_FLT

    def const_value(self) -> FieldElem:
        """Value of a constant FLT."""
        if not self.is_constant():
            raise ValueError("not a constant FLT: %s" % (self,))
        if not self.c.is_zero():
            return self.a / self.c
        if self.d.is_zero():
            raise ZeroDivisionError("constant FLT with value infinity")
        return self.b / self.d

    def is_zero_const(self) -> bool:
        return self.is_constant() and not self.d.is_zero() and self.b.is_zero() \
            and self.c.is_zero()

    def __call__(self, t):
        """Evaluate at a field element; None stands for infinity (in or out)."""
        if t is None:
            if not self.c.is_zero():
                return self.a / self.c
            if not self.a.is_zero():
                return None
            return self.b / self.d
        t = fe(t)
        den = self.c * t + self.d
        if den.is_zero():
            return None  # value is infinity
        return (self.a * t + self.b) / den

    def conj_coeffs(self) -> "Flt":
        """beta-bar: the FLT with complex conjugated coefficients."""
        return Flt(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())

    def derivative_num_den(self):
        """beta'(t) = det/(c t + d)^2 as (det, (c, d))."""
        return self.det(), (self.c, self.d)

    def __repr__(self):
        return "Flt(%s, %s, %s, %s)" % (self.a, self.b, self.c, self.d)

    def __str__(self):
        if self.is_constant():
            return str(self.const_value())
        num = _lin_str(self.a, self.b)
        den = _lin_str(self.c, self.d)
        if den == "1":
            return num if "+" not in num and "-" not in num[1:] else "(%s)" % num
        return "{(%s)/(%s)}" % (num, den)


def _lin_str(p, q):
    parts = []
    if not p.is_zero():
        parts.append("t" if p == QQ(1) else "(%s)*t" % (p,))
    if not q.is_zero() or not parts:
        parts.append(str(q))
    return " + ".join(parts)


def const_flt(value) -> Flt:
    return Flt(QQ(0), fe(value), QQ(0), QQ(1))


ID_FLT = Flt(QQ(1), QQ(0), QQ(0), QQ(1))


def compose(f: Flt, g: Flt) -> Flt:
    """(f o g)(t) = f(g(t)) by 2x2 matrix product."""
    return Flt(f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
               f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d)


def invert(f: Flt) -> Flt:
    """Inverse FLT (d t - b)/(-c t + a); requires nonconstant f."""
    if f.is_constant():
        raise ValueError("constant FLT has no inverse: %s" % (f,))
    return Flt(f.d, -f.b, -f.c, f.a)


def difference_factor(b1: Flt, b2: Flt):
    """Factor b1(t) - b2(t) = b3(t)*b4(t) with b3, b4 FLTs over the tower.

    Canonical choice: b3 = (t - r1)/(c1 t + d1), b4 = kappa (t - r2)/(c2 t + d2)
    with r1, r2 the numerator roots ordered by the principal-sqrt branch; may
    extend the tower by one square root.  Zero difference returns (0, 1).
    """
    A = b1.a * b2.c - b2.a * b1.c
    B = b1.a * b2.d - b2.a * b1.d + b1.b * b2.c - b2.b * b1.c
    C = b1.b * b2.d - b2.b * b1.d
    den1 = (b1.c, b1.d)
    den2 = (b2.c, b2.d)
    zero, one = QQ(0), QQ(1)
    if A.is_zero() and B.is_zero() and C.is_zero():
        return const_flt(zero), const_flt(one)
    if A.is_zero() and B.is_zero():
        # constant numerator
        return Flt(zero, C, den1[0], den1[1]), Flt(zero, one, den2[0], den2[1])
    if A.is_zero():
        r = -C / B
        return Flt(one, -r, den1[0], den1[1]), Flt(zero, B, den2[0], den2[1])
    disc = B * B - 4 * A * C
    s = TOWER.sqrt(disc)
    r1 = (-B + s) / (2 * A)
    r2 = (-B - s) / (2 * A)
    return Flt(one, -r1, den1[0], den1[1]), Flt(A, -r2 * A, den2[0], den2[1])


def dlog_z_of(f: Flt):
    """Pole list of d/dz log(zbar - f(z)) per the factorization identity:

        d/dz log(zbar - f(z)) = 1/(z - f^{-1}(zbar)) - 1/(z + d/c),

    the second term absent when c = 0.  Returns [(sign, pole)] where pole is
    an Flt in zbar (the first term) or a constant Flt (the second).
    """
    if f.is_constant():
        raise ValueError("constant FLT: d/dz log(zbar - const) = 0")
    poles = [(1, invert(f))]
    if not f.c.is_zero():
        poles.append((-1, const_flt(-f.d / f.c)))
    return poles


@dataclass(frozen=True)
class FltClass:
    is_constant: bool
    in_empty: bool
    is_involution: bool


def _is_involution(f: Flt) -> bool:
    if f.is_constant():
        return False
    m = compose(f, f.conj_coeffs())
    return m == ID_FLT


def _empty_locus(f: Flt) -> bool:
    """Decide emptiness of {z in C : z = f(conj z)} exactly; requires c != 0.

    The locus satisfies E(z,w) = c z w + d z - a w - b = 0 together with its
    conjugate equation, where w stands for conj(z).  When the conjugate
    equation is a multiple of E the locus is the Hermitian quadric
    z w + p z + p-bar w + q = 0 (circle/point/empty by sign of q - |p|^2);
    otherwise the pair has finitely many formal solutions obtained by
    substituting w = (b - d z)/(c z - a) and checking w = conj(z) exactly.
    """
    a, b, c, d = f.a, f.b, f.c, f.d
    if c.is_zero():
        return False
    # E coefficients (zw, z, w, 1): (c, d, -a, -b); conj equation as a
    # polynomial in (z, w): conj E swaps z <-> w and conjugates:
    # (c-bar, -a-bar, d-bar, -b-bar).
    mu = c.conj() / c
    if (-a.conj()) == mu * d and d.conj() == mu * (-a) and (-b.conj()) == mu * (-b):
        # Hermitian multiple: z w + p z + p-bar w + q = 0
        p = d / c
        q = -b / c
        val = q - p * p.conj()
        if not val.is_real():
            return False
        return val.sign_real() > 0
    # finite case: substitute w = (b - d z)/(c z - a) into the conjugate eq.
    # conj-eq: c-bar z w + d-bar w - a-bar z - b-bar = 0
    # => w (c-bar z + d-bar) = a-bar z + b-bar
    # => (b - d z)(c-bar z + d-bar) = (a-bar z + b-bar)(c z - a)
    ab, bb, cb, db = a.conj(), b.conj(), c.conj(), d.conj()
    # LHS: -d*cb z^2 + (b*cb - d*db) z + b*db
    # RHS: ab*c z^2 + (bb*c - ab*a) z - bb*a
    A2 = -d * cb - ab * c
    A1 = (b * cb - d * db) - (bb * c - ab * a)
    A0 = b * db + bb * a
    roots = []
    if A2.is_zero() and A1.is_zero():
        if A0.is_zero():
            # conjugate eq degenerates; locus of E alone: solve z on the curve
            # cannot be empty then (E defines a nontrivial real curve/point):
            # pick w from E and test a sample; fall back to nonempty.
            return False
        return True
    if A2.is_zero():
        roots = [-A0 / A1]
    else:
        disc = A1 * A1 - 4 * A2 * A0
        s = TOWER.sqrt(disc)
        roots = [(-A1 + s) / (2 * A2), (-A1 - s) / (2 * A2)]
    for z in roots:
        den = c * z - a
        if den.is_zero():
            continue
        w = (b - d * z) / den
        if w == z.conj():
            return False
    # degenerate branch: at z0 = a/c the equation E(z0, w) = 0 holds for all w
    # exactly when b - d*z0 = 0, and then (z0, conj z0) is a real point
    z0 = a / c
    if (b - d * z0).is_zero():
        return False
    return True


def classify(f: Flt) -> FltClass:
    """Constancy, empty zero locus of z - f(zbar) (with c != 0), involution."""
    const = f.is_constant()
    if const:
        return FltClass(True, False, False)
    return FltClass(False, _empty_locus(f), _is_involution(f))
