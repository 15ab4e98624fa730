"""Roots of one-variable polynomials inside a given local field.

Newton polygon slopes give the candidate valuations; the residual
polynomial on each integral slope gives leading digits; simple residual
roots are lifted by Newton iteration, multiple ones are refined by a
Taylor shift and recursion.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import LiftDivergence
from .hensel import AnalyticMap, newton_solve
from .localfield import LocalFieldElem
from .series import Series


def _val(c):
    return None if c.val is None else c.val


def lower_hull(points):
    """Lower convex hull of (x, y) points sorted by x."""
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_slopes(coeffs):
    """[(root valuation s, i, j)] for the hull segments of sum c_k x^k."""
    pts = [(k, c.val) for k, c in enumerate(coeffs) if c.val is not None]
    hull = lower_hull(pts)
    out = []
    for (i, vi), (j, vj) in zip(hull, hull[1:]):
        out.append((Fraction(vi - vj, j - i), i, j))
    return out


def _residual_poly(coeffs, s: int, i: int, j: int):
    """Leading digits along the segment: R(y) = sum lead(c_k) y^(k-i)."""
    base = coeffs[i].val + i * s
    R = [0] * (j - i + 1)
    for k in range(i, j + 1):
        c = coeffs[k]
        if c.val is not None and c.val + k * s == base:
            R[k - i] = c._d[0] if c.K.kind == "laurent" else c._d % c.K.p
    return R


def _poly_eval_ff(F, R, y):
    acc = 0
    for c in reversed(R):
        acc = F.add(F.mul(acc, y), c)
    return acc


def _multiplicity(F, R, y):
    """Multiplicity of y as a root of R over the residue field."""
    mult = 0
    cs = list(R)
    while len(cs) > 1 and _poly_eval_ff(F, cs, y) == 0:
        # synthetic division by (Y - y)
        out = [0] * (len(cs) - 1)
        acc = 0
        for k in range(len(cs) - 1, 0, -1):
            acc = F.add(F.mul(acc, y), cs[k])
            out[k - 1] = acc
        cs = out
        mult += 1
    return mult


def _residue_ops(K):
    if K.kind == "laurent":
        return K.residue
    from .finitefield import field

    return field(K.p, 1)


def _shift(coeffs, a, b):
    """Coefficients of h(z) = g(a + b z)."""
    n = len(coeffs)
    apow = [None] * n
    apow[0] = a.K.embed(1, max(c.prec for c in coeffs) + 1)
    for k in range(1, n):
        apow[k] = apow[k - 1] * a
    out = []
    bk = None
    for k in range(n):
        acc = None
        for t in range(k, n):
            c = comb(t, k)
            if coeffs[t].val is None or (a.K.kind == "laurent" and c % a.K.p == 0):
                continue
            term = coeffs[t] * apow[t - k] * c if t > k else coeffs[t]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = coeffs[0].K.zero(min(c.prec for c in coeffs))
        bk = b ** 0 if k == 0 else bk * b
        out.append(acc * bk if k else acc)
    return out


def _newton_polish(coeffs, x0, precision):
    """Lift x0 to a root known modulo u^precision."""
    K = x0.K
    S = Series(1, {(k,): c for k, c in enumerate(coeffs) if c.val is not None})
    dS = S.derivative(0)
    vder = dS((x0,))
    vder = vder.val if isinstance(vder, LocalFieldElem) and vder.val is not None else 0
    x = newton_solve(AnalyticMap([S]), (x0,), K, precision + vder).point[0]
    if x.prec < precision:
        raise LiftDivergence(f"root known to {x.prec} digits, {precision} requested")
    return x.truncate(precision)


def local_roots(coeffs, K, precision: int, guard: int = 8):
    """Roots in K of sum coeffs[k] x^k, each known modulo u^precision.

    Exact coefficients are embedded with ``guard`` extra digits, doubled
    on failure; approximate coefficients are used as given.  The
    polynomial must be separable over K.
    """
    exact = not all(isinstance(c, LocalFieldElem) for c in coeffs)
    for _ in range(4):
        try:
            return _local_roots(coeffs, K, precision, precision + guard)
        except LiftDivergence:
            if not exact:
                raise
            guard *= 2
    raise LiftDivergence(f"could not separate roots to {precision} digits")


def _embed_exact(K, c, work):
    if c == 0:
        return K.zero(work)
    return K.embed_rel(c, 2 * work)


def _local_roots(coeffs, K, precision, work):
    cs = [c if isinstance(c, LocalFieldElem) else _embed_exact(K, c, work) for c in coeffs]
    while len(cs) > 1 and cs[-1].val is None:
        cs.pop()
    if len(cs) <= 1:
        if cs and cs[0].val is None:
            raise LiftDivergence("polynomial vanishes to working precision")
        return []
    roots = []
    if cs[0].val is None:
        if cs[1].val is None:
            raise LiftDivergence("zero root is not simple at working precision")
        roots.append(K.zero(precision))
        cs = cs[1:]
    roots.extend(_roots_rec(cs, K, precision, None, K.exact_zero(), K.exact_one(), cs, 0))
    return roots


def _roots_rec(h, K, precision, vmin, A, B, g, depth):
    """Roots x = A + B z of g with z a root of h and v(z) >= vmin."""
    if depth > 4 * precision:
        raise LiftDivergence("root refinement did not separate the roots")
    Fr = _residue_ops(K)
    out = []
    if h[0].val is None:
        # z = 0 is a root at this precision
        if len(h) < 2 or h[1].val is None:
            raise LiftDivergence("root is not simple at working precision")
        if vmin is not None:
            out.append(_newton_polish(g, A, precision))
        h = h[1:]
        if len(h) < 2:
            return out
    for s, i, j in newton_slopes(h):
        if s.denominator != 1:
            continue
        s = int(s)
        if vmin is not None and s < vmin:
            continue
        R = _residual_poly(h, s, i, j)
        us = K.uniformizer(precision + 1) ** s if s else None
        for y in range(1, Fr.order):  # R(0) != 0
            if _poly_eval_ff(Fr, R, y) != 0:
                continue
            lead = K.from_digits(0, [y], precision + abs(s) + 1) if K.kind == "laurent" else K.embed(y, precision + abs(s) + 1)
            z0 = lead * us if us is not None else lead
            x0 = z0 * B + A
            mult = _multiplicity(Fr, R, y)
            if mult == 1:
                out.append(_newton_polish(g, x0, precision))
                continue
            # several roots share these leading digits: recentre and recurse
            hz = _shift(h, z0, us if us is not None else K.embed(1, precision + 1))
            newA = x0
            newB = B * us if us is not None else B
            out.extend(_roots_rec(hz, K, precision, 1, newA, newB, g, depth + 1))
    return out
