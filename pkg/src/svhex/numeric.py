"""Independent numeric oracle for hyperlogarithms and generalized
hyperlogarithms.

Values are computed by composing power-series legs along a polyline from the
regularized base point 0 to the target, re-expanding at every step; interior
singularities are avoided by counterclockwise detours.  This is independent of
the symbolic machinery (it never consults symbolic identities beyond the
defining differential equations), so it serves as the oracle for derived
expected values across the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp

from .constants import register_numeric_evaluator
from .field import FieldElem

__all__ = ["NumEvalConfig", "eval_hyperlog_num", "eval_hl_letters_num",
           "monodromy_loop_num", "install_numeric_evaluator"]


@dataclass
class NumEvalConfig:
    precision_target: float = 1e-9
    epsilon: float = 1e-6
    max_depth: int = 64
    dps: int = 30

    def __post_init__(self):
        if not self.epsilon < 1e-3:
            raise ValueError("epsilon must be < 1e-3")


DEFAULT_CFG = NumEvalConfig()


def _to_mpc(x, dps):
    if isinstance(x, FieldElem):
        return mp.mpc(x._embed_mid(dps))
    return mp.mpc(x)




def _leg_series(letters, y, dps):
    """I(0, u, y) for numeric letters; requires |y| < min |nonzero letter|.

    Leading zero letters produce log(y) powers (principal branch of the local
    parameter), realizing the shuffle regularization at the base point.
    """
    u = tuple(letters)
    k = 0
    while k < len(u) and u[k] == 0:
        k += 1
    if k == len(u):
        return mp.log(y) ** k / mp.factorial(k)
    if k == 0:
        return _leg_series_regular(u, y, dps)
    # split: strip leading zeros via the shuffle identity (numeric letters)
    from .mzvnum import _shuffle  # generic on tuples
    a, rest = u[k], u[k + 1:]
    total = mp.mpc(0)
    logy = mp.log(y)
    for i in range(k + 1):
        inner = _shuffle(tuple([0] * i), rest)
        for v, m in inner.items():
            total += ((-1) ** i * m) * logy ** (k - i) / mp.factorial(k - i) \
                * _leg_series_regular((a,) + v, y, dps)
    return total


def _leg_series_regular(u, y, dps):
    """Series value of L_u(y) for words with nonzero first letter."""
    if not u:
        return mp.mpc(1)
    eps = mp.mpf(10) ** (-dps - 5)
    radius = min(abs(b) for b in u if b != 0)
    ratio = abs(y) / radius
    if ratio >= 0.8:
        raise ValueError("leg ratio too large: %s" % ratio)
    nterms = max(24, int(mp.log(eps) / mp.log(ratio)) + 8) if ratio > 0 else 24
    coeffs = _word_series_numeric(u, nterms, dps)
    total = mp.mpc(0)
    p = mp.mpc(1)
    for m in range(nterms):
        p *= y
        total += coeffs[m] * p
    return total


def _word_series_numeric(u, nterms, dps):
    """Taylor coefficients of L_u (shifted: entry m is coeff of z^{m+1})."""
    # walk prefixes to reuse work
    coeffs = [mp.mpc(0)] * nterms
    # base: empty word has series 1 (constant); handle inline
    prev = None
    for idx, b in enumerate(u):
        cur = [mp.mpc(0)] * nterms
        if idx == 0:
            # L_{(b)}: c_m z^m with c_m = -(1/m) b^{-m}, m >= 1
            binv = 1 / mp.mpc(b)
            p = mp.mpc(1)
            for m in range(1, nterms + 1):
                p *= binv
                cur[m - 1] = -p / m
        elif b == 0:
            for m in range(1, nterms + 1):
                cur[m - 1] = prev[m - 1] / m
        else:
            binv = 1 / mp.mpc(b)
            acc = mp.mpc(0)
            pinv = mp.mpc(1)
            # c_m = -(1/m) sum_{k<m} prev_k b^{k-m}; prev_k = prev[k-1]
            powers = [mp.mpc(1)]
            for m in range(1, nterms + 1):
                powers.append(powers[-1] * mp.mpc(b))
            for m in range(1, nterms + 1):
                s = mp.mpc(0)
                for k in range(1, m):
                    s += prev[k - 1] * powers[k]
                cur[m - 1] = -s * binv ** m / m
        prev = cur
    return prev


def _detour_points(start, end, letters, dps):
    """Points of a polyline from start to end avoiding the given letters by
    counterclockwise semicircular detours."""
    seg = end - start
    length = abs(seg)
    if length == 0:
        return [start]
    direction = seg / length
    events = []
    for b in letters:
        if b is None:
            continue
        t = mp.re((b - start) / direction)
        if t <= 1e-12 or t >= length - 1e-12:
            continue
        dist = abs(b - (start + t * direction))
        margin = max(length * mp.mpf("0.1"), mp.mpf("1e-2"))
        if dist < margin * mp.mpf("0.5"):
            events.append((t, b))
    events.sort(key=lambda e: float(e[0]))
    pts = [start]
    for t, b in events:
        r = max(mp.mpf("1e-2") * length, mp.mpf("0.05") * length)
        side = direction * mp.mpc(0, 1)
        pts.append(start + (t - r) * direction)
        pts.append(start + t * direction + r * side)
        pts.append(start + (t + r) * direction)
    pts.append(end)
    return pts


def _compose_along(word, points, dps, v0=None):
    """Propagate the prefix-value vector of I(0, w<=k, x) along the points."""
    n = len(word)
    if v0 is None:
        v = [mp.mpc(1)] + [mp.mpc(0)] * n
        start_index = 1
    else:
        v = list(v0)
        start_index = 1
    x = points[0]
    for y in points[1:]:
        # refine the step so each leg converges
        legs = _split_step(word, x, y)
        for x1 in legs:
            v = _advance(word, v, x, x1, dps)
            x = x1
    return v


def _split_step(word, x, y):
    """Split x->y so that each piece is well inside all convergence discs."""
    pieces = []
    cur = x
    remaining = y - x
    guard = 0
    while abs(y - cur) > 0:
        radius = min((abs(b - cur) for b in word if b != cur), default=abs(y - cur))
        if cur == 0 or any(b == cur for b in word):
            radius = min((abs(b - cur) for b in word + (mp.mpc(0),)
                          if b != cur and abs(b - cur) > 0), default=abs(y - cur))
        step = min(abs(y - cur), mp.mpf("0.6") * radius)
        if step <= 0:
            raise ValueError("path stuck at a singular point")
        nxt = cur + (y - cur) / abs(y - cur) * step
        if abs(nxt - y) < mp.mpf("1e-3") * step:
            nxt = y
        pieces.append(nxt)
        cur = nxt
        guard += 1
        if guard > 4000:
            raise RuntimeError("step splitting failed to converge")
    return pieces


def _advance(word, v, x, y, dps):
    n = len(word)
    out = [mp.mpc(0)] * (n + 1)
    # two modes for the legs: expansion around x (normal) or around y when y
    # sits on a letter (reversal trick)
    y_singular = any(b == y for b in word) or y == 0
    for l in range(n + 1):
        total = mp.mpc(0)
        for k in range(l + 1):
            if v[k] == 0:
                continue
            infix = word[k:l]
            if not infix:
                total += v[k]
                continue
            if not y_singular:
                letters = tuple(b - x for b in infix)
                total += v[k] * _leg_series(letters, y - x, dps)
            else:
                letters = tuple(b - y for b in reversed(infix))
                total += v[k] * ((-1) ** len(infix)) * _leg_series(letters, x - y, dps)
        out[l] = total
    return out


def eval_hl_letters_num(letters, z0, cfg: NumEvalConfig = DEFAULT_CFG):
    """I(0, w, z0) for numeric complex letters, straight path from 0 with
    counterclockwise detours around interior singularities."""
    with mp.workdps(cfg.dps):
        word = tuple(_to_mpc(b, cfg.dps) for b in letters)
        z0 = _to_mpc(z0, cfg.dps)
        if not word:
            return mp.mpc(1)
        pts = _detour_points(mp.mpc(0), z0, [b for b in word if b != 0], cfg.dps)
        # first step away from the regularized base point
        v = [mp.mpc(1)] + [mp.mpc(0)] * len(word)
        x = pts[0]
        for y in pts[1:]:
            for x1 in _split_step(word, x, y):
                v = _advance(word, v, x, x1, cfg.dps)
                x = x1
        return v[len(word)]


def eval_hyperlog_num(word, z0, cfg: NumEvalConfig = DEFAULT_CFG):
    """Numeric value of L_w(z0) for a word of constant Flt/field letters."""
    with mp.workdps(cfg.dps):
        letters = []
        for lt in word:
            v = lt.const_value() if hasattr(lt, "const_value") else lt
            letters.append(_to_mpc(v, cfg.dps))
        return eval_hl_letters_num(letters, _to_mpc(z0, cfg.dps), cfg)


def monodromy_loop_num(word, a, z0, cfg: NumEvalConfig = DEFAULT_CFG,
                       arc_steps: int = 16):
    """Value of L_w at z0 after counterclockwise continuation around a."""
    with mp.workdps(cfg.dps):
        letters = tuple(_to_mpc(lt.const_value() if hasattr(lt, "const_value")
                                else lt, cfg.dps) for lt in word)
        a = _to_mpc(a, cfg.dps)
        z0 = _to_mpc(z0, cfg.dps)
        others = [b for b in letters + (mp.mpc(0),) if b != a]
        rad = mp.mpf("1e-2")
        if others:
            rad = min(rad, min(abs(b - a) for b in others) / 4)
        # approach point near a in the direction of z0
        dirv = (z0 - a) / abs(z0 - a)
        p0 = a + rad * dirv
        pts = _detour_points(mp.mpc(0), z0, [b for b in letters if b != 0], cfg.dps)
        n = len(letters)
        v = [mp.mpc(1)] + [mp.mpc(0)] * n
        x = pts[0]
        for y in pts[1:]:
            for x1 in _split_step(letters, x, y):
                v = _advance(letters, v, x, x1, cfg.dps)
                x = x1
        # z0 -> p0
        for y in _detour_points(z0, p0, [b for b in letters if b not in (0,)], cfg.dps)[1:]:
            for x1 in _split_step(letters, x, y):
                v = _advance(letters, v, x, x1, cfg.dps)
                x = x1
        # circle around a
        for j in range(1, arc_steps + 1):
            ang = mp.mpf(2) * mp.pi * j / arc_steps
            y = a + (p0 - a) * mp.exp(mp.mpc(0, 1) * ang)
            for x1 in _split_step(letters, x, y):
                v = _advance(letters, v, x, x1, cfg.dps)
                x = x1
        # back to z0
        for y in _detour_points(p0, z0, [b for b in letters if b not in (0,)], cfg.dps)[1:]:
            for x1 in _split_step(letters, x, y):
                v = _advance(letters, v, x, x1, cfg.dps)
                x = x1
        return v[n]


def _regval_evaluator(word, a, dps):
    cfg = NumEvalConfig(dps=dps)
    with mp.workdps(dps):
        if a == "inf":  # pragma: no cover - reduced before numerics
            raise ValueError("values at infinity are reduced symbolically")
        return eval_hyperlog_num(word, a, cfg)


def install_numeric_evaluator():
    register_numeric_evaluator(_regval_evaluator)


install_numeric_evaluator()
