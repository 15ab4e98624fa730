"""T-modules (G_a^m, Phi): differentials, the j-invariant and torsion."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from .errors import (
    BadConstantTerm,
    DependentBasis,
    DimensionMismatch,
    ExtensionBudgetExceeded,
    Inseparable,
    JSearchExhausted,
    LiftDivergence,
    NoSuchRoot,
    NotNilpotent,
    ValidationError,
)
from .finitefield import MAX_ORDER, gf
from .linalg import (
    det,
    identity,
    is_nilpotent,
    is_scalar_matrix,
    is_zero,
    mat_add,
    mat_mul,
    mat_pow,
    mat_sub,
    mat_vec,
    rank,
    scalar_matrix,
)
from .localfield import LaurentField, LocalFieldElem, descend, laurent, lift
from .polys import FqPoly, RationalFn
from .roots import local_roots
from .twisted import TwistedPoly, parse_twisted, render_twisted, tw_divmod_right, tw_eval

log = logging.getLogger(__name__)

MARGIN = 5


@dataclass(frozen=True, eq=False)
class TModule:
    m: int
    q: int
    phiT: TwistedPoly
    label: str = ""
    rank: int | None = None  # declared, never computed

    @property
    def F(self):
        return gf(self.q)

    @property
    def T(self) -> RationalFn:
        return RationalFn.T(self.F)

    @property
    def a0(self):
        return self.phiT.constant_term

    @property
    def N(self):
        T = self.T
        return mat_sub(self.a0, scalar_matrix(self.m, T, T.zero()))

    @cached_property
    def leading_invertible(self) -> tuple[bool, ...]:
        """For i = 1..m: is the leading coefficient of Phi(T^i) invertible?
        Recorded as a flag; nothing is gated on it."""
        out = []
        P = TwistedPoly.identity(self.q, self.m)
        for _ in range(self.m):
            P = P * self.phiT
            out.append(not is_zero(det(P.leading)))
        return tuple(out)

    def __str__(self):
        return render_twisted(self.phiT)


def new_tmodule(m: int, q: int, phiT: TwistedPoly, label: str = "", rank: int | None = None) -> TModule:
    if phiT.m != m or phiT.q != q:
        raise DimensionMismatch(f"Phi(T) has (m, q) = ({phiT.m}, {phiT.q}), expected ({m}, {q})")
    if phiT.is_zero():
        raise BadConstantTerm("Phi(T) is zero")
    for r in phiT.constant_term:
        for a in r:
            if not isinstance(a, (RationalFn, LocalFieldElem)):
                raise BadConstantTerm(f"constant term entry {a!r} is not a field element")
    M = TModule(m, q, phiT, label, rank)
    try:
        nil = is_nilpotent(M.N)
    except (TypeError, ValueError) as exc:
        raise BadConstantTerm(f"constant term is not T*1 + N: {exc}") from exc
    if not nil:
        raise NotNilpotent("a0 - T*1 is not nilpotent")
    return M


def parse_tmodule(text: str, q: int, m: int, label: str = "", source=None) -> TModule:
    return new_tmodule(m, q, parse_twisted(text, q, m, source=source), label)


# ---------------------------------------------------------------- examples


def carlitz(q: int) -> TModule:
    T = RationalFn.T(gf(q))
    return new_tmodule(1, q, TwistedPoly.scalar(q, [T, 1]), "carlitz", rank=1)


def nilpotent_example(q: int = 2) -> TModule:
    """m = 2 with a0 = T*1 + [[0, 1], [0, 0]] and Phi(T) = a0 + tau."""
    T = RationalFn.T(gf(q))
    one, z = T.one(), T.zero()
    a0 = ((T, one), (z, T))
    return new_tmodule(2, q, TwistedPoly(q, 2, [a0, identity(2, one, z)]), "nilpotent")


def direct_sum(*mods: TModule) -> TModule:
    q = mods[0].q
    if any(M.q != q for M in mods):
        raise DimensionMismatch("direct sum of modules over different q")
    m = sum(M.m for M in mods)
    deg = max(M.phiT.degree for M in mods)
    z = RationalFn.T(gf(q)).zero()
    coeffs = []
    for i in range(deg + 1):
        A = [[z] * m for _ in range(m)]
        off = 0
        for M in mods:
            B = M.phiT.coeff(i)
            for r in range(M.m):
                for s in range(M.m):
                    A[off + r][off + s] = B[r][s]
            off += M.m
        coeffs.append(A)
    ranks = [M.rank for M in mods]
    rk = sum(ranks) if None not in ranks else None
    label = "+".join(M.label or "?" for M in mods)
    return new_tmodule(m, q, TwistedPoly(q, m, coeffs, z), label, rk)


def anderson_coleman_c(q: int, precision: int) -> LocalFieldElem:
    """The root c of c^2 - T c + 1 with |c| < 1 in F_q((1/T))."""
    K = laurent(q)
    T = RationalFn.T(K.base)
    # two guard digits cover the loss in T*c when checking the relation
    small = [c for c in local_roots([T.one(), -T, T.one()], K, precision + 2) if c.val is not None and c.val > 0]
    if len(small) != 1:
        raise NoSuchRoot(f"no unique small root of c^2 - Tc + 1 at q={q}, precision {precision}")
    return small[0]


def anderson_coleman_example(q: int = 2, precision: int = 30) -> TModule:
    c = anderson_coleman_c(q, precision + 4)
    T = RationalFn.T(gf(q))
    one, z = T.one(), T.zero()
    A1 = ((z, 1 - c ** (q + 1)), (1 - c**q, z))
    A2 = ((c ** (1 + q + q * q), z), (z, c**q))
    phiT = TwistedPoly(q, 2, [scalar_matrix(2, T, z), A1, A2], z)
    return new_tmodule(2, q, phiT, "anderson-coleman")


# ---------------------------------------------------------------- Phi and dPhi


def as_fqpoly(a, F) -> FqPoly:
    if isinstance(a, FqPoly):
        return a
    if isinstance(a, RationalFn):
        if a.den.degree != 0:
            raise ValidationError(f"{a} is not a polynomial")
        return a.num.scale(F.inv(a.den.c[0]))
    if isinstance(a, int):
        return FqPoly.const(F, F.from_int(a))
    raise ValidationError(f"cannot read {a!r} as a polynomial in T")


def _fq_const(F, c: int) -> RationalFn:
    return RationalFn(FqPoly.const(F, c))


def phi(M: TModule, a) -> TwistedPoly:
    """Phi(a) by Horner's rule in Phi(T)."""
    a = as_fqpoly(a, M.F)
    if a.is_zero():
        return TwistedPoly(M.q, M.m, [], M.phiT._zero)
    cs = a.c
    acc = TwistedPoly.constant(M.q, M.m, _fq_const(M.F, cs[-1]))
    for c in reversed(cs[:-1]):
        acc = acc * M.phiT
        if c:
            acc = acc + _fq_const(M.F, c)
    return acc


def dphi(M: TModule, a):
    """Constant coefficient of Phi(a), i.e. a(a0)."""
    a = as_fqpoly(a, M.F)
    z = M.T.zero()
    if a.is_zero():
        return scalar_matrix(M.m, z, z)
    cs = a.c
    acc = scalar_matrix(M.m, _fq_const(M.F, cs[-1]), z)
    for c in reversed(cs[:-1]):
        acc = mat_mul(acc, M.a0)
        if c:
            acc = mat_add(acc, scalar_matrix(M.m, _fq_const(M.F, c), z))
    return acc


def j_invariant(M: TModule) -> int:
    """Smallest j >= 1 with dPhi(T^j) = T^j * 1."""
    p = M.F.p
    bound = p ** max(0, math.ceil(math.log(M.m, p) - 1e-12)) if M.m > 1 else 1
    for j in range(1, bound + 1):
        if is_scalar_matrix(mat_pow(M.a0, j), M.T**j):
            return j
    raise JSearchExhausted(f"no j <= {bound} makes dPhi(T^j) scalar")


def lie_invariant(M: TModule, V) -> bool:
    """Is span(V) stable under dPhi(T)?"""
    V = [tuple(_as_exact(x, M.F) for x in v) for v in V]
    if not V:
        return True
    if any(len(v) != M.m for v in V):
        raise DimensionMismatch(f"vectors must have length {M.m}")
    k = len(V)
    if rank(V) != k:
        raise DependentBasis("the given vectors are linearly dependent")
    return all(rank(V + [mat_vec(M.a0, v)]) == k for v in V)


def _as_exact(x, F):
    if isinstance(x, int):
        return RationalFn.from_int(F, x)
    if isinstance(x, FqPoly):
        return RationalFn(x)
    return x


# ---------------------------------------------------------------- torsion


def _entry_poly(P: TwistedPoly, r: int, s: int) -> TwistedPoly:
    return TwistedPoly(P.q, 1, [((A[r][s],),) for A in P.coeffs], P._zero)


def triangularize(P: TwistedPoly):
    """Upper-triangular grid of scalar twisted polynomials with the same
    kernel as P, via left-unimodular row operations (right division)."""
    m = P.m
    G = [[_entry_poly(P, r, s) for s in range(m)] for r in range(m)]
    for c in range(m):
        while True:
            rows = [r for r in range(c, m) if not G[r][c].is_zero()]
            if not rows:
                raise Inseparable("Phi(a) is not injective on the Lie algebra")
            piv = min(rows, key=lambda r: (G[r][c].degree, r))
            G[c], G[piv] = G[piv], G[c]
            rest = [r for r in range(c + 1, m) if not G[r][c].is_zero()]
            if not rest:
                break
            for r in rest:
                Qt, _ = tw_divmod_right(G[r][c], G[c][c])
                G[r] = [G[r][s] - Qt * G[c][s] for s in range(m)]
    return G


def _check_separable(M: TModule, a):
    D = dphi(M, a)
    if is_zero(det(D)):
        raise Inseparable(f"dPhi({a}) is singular")


def torsion_count(M: TModule, a) -> int:
    """|A[a]| over the algebraic closure: q^(sum of diagonal tau-degrees)."""
    a = as_fqpoly(a, M.F)
    if a.is_zero():
        raise ValidationError("a must be nonzero")
    if a.degree == 0:
        return 1
    _check_separable(M, a)
    G = triangularize(phi(M, a))
    for i in range(M.m):
        if is_zero(G[i][i].scalar_coeff(0)):
            raise Inseparable("a diagonal entry of the triangular form is inseparable")
    return M.q ** sum(G[i][i].degree for i in range(M.m))


@dataclass(frozen=True)
class TorsionPoint:
    coords: tuple
    annihilator: FqPoly
    field: LaurentField
    residual: float = math.inf

    @property
    def valuations(self) -> tuple:
        """Coordinate valuations in units of v(1/T) (None for zero)."""
        return tuple(None if x.val is None else Fraction(x.val, self.field.e) for x in self.coords)

    def sort_key(self):
        parts = []
        for x in self.coords:
            v = math.inf if x.val is None else Fraction(x.val, self.field.e)
            parts.append((v, tuple(x.digits)))
        return (tuple(parts), self.field.e, self.field.f)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


def _to_field(c, K, prec):
    """Local image of a coefficient.  Exact values get relative precision
    2*prec so that products with large points keep absolute precision."""
    if isinstance(c, LocalFieldElem):
        return c if c.K == K else lift(c, K)
    return K.embed_rel(c, 2 * prec) if not is_zero(c) else K.zero(prec)


def _additive_coeffs(P: TwistedPoly, K, prec, rhs=None):
    """Ordinary coefficient list of sum c_i x^(q^i) + rhs."""
    n = P.q ** P.degree
    cs = [K.zero(prec)] * (n + 1)
    for i in range(P.degree + 1):
        c = P.scalar_coeff(i)
        if not is_zero(c):
            cs[P.q**i] = _to_field(c, K, prec)
    if rhs is not None:
        cs[0] = rhs
    return cs


def _solve_triangular(G, K, prec):
    """All solutions in K^m of the triangular additive system."""
    m = len(G)
    sols = [()]
    for r in range(m - 1, -1, -1):
        new = []
        for tail in sols:
            rhs = None
            for k, s in enumerate(range(r + 1, m)):
                if G[r][s].is_zero():
                    continue
                t = tw_eval(_lift_poly(G[r][s], K, prec), tail[k])
                rhs = t if rhs is None else rhs + t
            cs = _additive_coeffs(G[r][r], K, prec, rhs)
            for x in _roots_with_zero(cs, K, prec):
                new.append((x,) + tail)
        sols = new
    return sols


def _lift_poly(P: TwistedPoly, K, prec) -> TwistedPoly:
    return TwistedPoly(P.q, 1, [((_to_field(A[0][0], K, prec),),) for A in P.coeffs], K.zero(prec))


def _roots_with_zero(cs, K, prec):
    if cs[0].val is None:
        # homogeneous: x = 0 is a root; the rest are roots of the quotient
        rest = local_roots(cs[1:], K, prec) if len(cs) > 2 else []
        return [K.zero(prec)] + rest
    return local_roots(cs, K, prec)


def candidate_fields(q: int, ext_budget):
    e_max, f_max = ext_budget
    p = gf(q).p
    out = []
    for e in range(1, e_max + 1):
        if gcd(e, p) != 1:
            continue
        for f in range(1, f_max + 1):
            if q**f > MAX_ORDER:
                continue
            out.append(laurent(q, e, f))
    return out


def _residual(P: TwistedPoly, x, K, prec):
    vals = tw_eval(_lift_grid(P, K, prec), tuple(x))
    return min(v.val_bound() for v in vals)


def _lift_grid(P: TwistedPoly, K, prec):
    return TwistedPoly(
        P.q, P.m, [[[_to_field(a, K, prec) for a in r] for r in A] for A in P.coeffs], K.zero(prec)
    )


def _new_in(x, K, seen_fields):
    """False if every coordinate already lives in an earlier field."""
    for K1 in seen_fields:
        if K.e % K1.e or K.f % K1.f:
            continue
        if all(descend(c, K1) is not None for c in x):
            return False
    return True


def torsion_points(M: TModule, a, precision: int = 30, ext_budget=(2, 2), strict: bool = False):
    """a-torsion points of M with coordinates in tame extensions F_{q^f}((u)),
    u^e = 1/T, within the budget; each verified to residual precision - MARGIN."""
    F = M.F
    a = as_fqpoly(a, F)
    if a.is_zero():
        raise ValidationError("a must be nonzero")
    K0 = laurent(M.q)
    if a.degree == 0:
        return [TorsionPoint(tuple(K0.zero(precision) for _ in range(M.m)), a, K0)]
    expected = torsion_count(M, a)
    P = phi(M, a)
    G = triangularize(P)
    found = []
    seen = []
    for K in candidate_fields(M.q, ext_budget):
        pts = _points_in(P, G, K, precision)
        for x, res in pts:
            if _new_in(x, K, seen):
                found.append(TorsionPoint(tuple(c.truncate(precision) for c in x), a, K, res))
        seen.append(K)
        if len(found) >= expected:
            break
    if len(found) < expected:
        msg = f"found {len(found)} of {expected} points of A[{a}] within (e, f) <= {tuple(ext_budget)}"
        if strict:
            raise ExtensionBudgetExceeded(msg)
        log.warning(msg)
    return sorted(found, key=TorsionPoint.sort_key)


def _points_in(P, G, K, precision):
    guard = 8 + 4 * P.degree
    for _ in range(4):
        work = precision + guard
        try:
            sols = _solve_triangular(G, K, work)
        except LiftDivergence:
            guard *= 2
            continue
        out = []
        ok = True
        for x in sols:
            res = _residual(P, x, K, work)
            if res < precision - MARGIN:
                ok = False
                break
            out.append((x, res))
        if ok:
            return out
        guard *= 2
    raise LiftDivergence(f"torsion points in {K} did not verify to {precision - MARGIN} digits")


@dataclass(frozen=True)
class SubvarietySpec:
    """X = common zeros of polynomials (Series with exact coefficients)."""

    polys: tuple
    names: tuple = field(default=())

    def __post_init__(self):
        if not self.polys:
            raise ValidationError("a subvariety needs at least one polynomial")
        if any(P.is_zero() for P in self.polys):
            raise ValidationError("zero polynomial in a subvariety")

    def contains(self, x, precision: int) -> bool:
        for P in self.polys:
            v = P(tuple(x))
            if isinstance(v, LocalFieldElem):
                if v.val_bound() < precision - MARGIN:
                    return False
            elif not is_zero(v):
                return False
        return True


def torsion_in_subvariety(M: TModule, X: SubvarietySpec, a, precision: int = 30, ext_budget=(2, 2)) -> int:
    """|X cap A[a]| among torsion points found within the budget."""
    if any(P.nvars != M.m for P in X.polys):
        raise DimensionMismatch(f"subvariety polynomials must have {M.m} variables")
    pts = torsion_points(M, a, precision, ext_budget)
    return sum(1 for pt in pts if X.contains(pt.coords, precision))
