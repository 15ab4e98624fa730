"""Exponential and logarithm of a T-module, and the lattice-quotient counts.

The exponential e(z) = sum_n e_n z^(q^n) is pinned down by
Phi(T) o e = e o dPhi(T); comparing coefficients of z^(q^n) gives

    e_n a0^(q^n) - a0 e_n = sum_{j>=1} a_j e_{n-j}^(q^j),

a Sylvester equation whose two sides have disjoint spectra (T^(q^n) vs T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BudgetExceeded,
    ConstantPolynomial,
    ExpDivergence,
    HypothesisFailed,
    SylvesterSingular,
    TruncationInsufficient,
    ValidationError,
)
from .linalg import (
    identity,
    is_scalar_matrix,
    is_zero,
    mat_add,
    mat_frob,
    mat_mul,
    mat_neg,
    mat_vec,
    scalar_matrix,
    solve,
)
from .localfield import LocalFieldElem, frobenius
from .polys import FqPoly, monic_divisors, poly_gcd, polys_of_degree
from .tmodule import MARGIN, TModule, as_fqpoly, dphi, phi, torsion_count
from .twisted import tw_eval


@dataclass(frozen=True, eq=False)
class ExpSeries:
    module: TModule
    coeffs: tuple  # e_0, ..., e_N (m x m matrices)
    kind: str = "exp"

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]


def _zero_one(M: TModule):
    T = M.T
    return T.zero(), T.one()


def _sylvester(a0, A, R):
    """Solve X A - a0 X = R for X (m x m)."""
    m = len(a0)
    z = R[0][0] * 0 if isinstance(R[0][0], LocalFieldElem) else a0[0][0].zero()
    T = a0[0][0]
    if is_scalar_matrix(a0) and is_scalar_matrix(A):
        d = A[0][0] - a0[0][0]
        if is_zero(d):
            raise SylvesterSingular("T^(q^n) - T vanished")
        inv = d.inverse()
        return tuple(tuple(r * inv for r in row) for row in R)
    n = m * m
    rows = []
    rhs = []
    for r in range(m):
        for s in range(m):
            row = [T.zero()] * n
            for k in range(m):
                row[r * m + k] = row[r * m + k] + A[k][s]
                row[k * m + s] = row[k * m + s] - a0[r][k]
            rows.append(row)
            rhs.append(R[r][s])
    try:
        x = solve(rows, rhs)
    except ZeroDivisionError as exc:
        raise SylvesterSingular("Sylvester system is singular") from exc
    return tuple(tuple(x[r * m + s] for s in range(m)) for r in range(m))


def exp_coeffs(M: TModule, N: int) -> ExpSeries:
    if N < 0:
        raise ValidationError("truncation must be >= 0")
    z, one = _zero_one(M)
    m = M.m
    a0 = M.a0
    d = M.phiT.degree
    es = [identity(m, one, z)]
    for n in range(1, N + 1):
        R = scalar_matrix(m, z, z)
        for j in range(1, min(n, d) + 1):
            aj = M.phiT.coeff(j)
            R = mat_add(R, mat_mul(aj, mat_frob(es[n - j], j)))
        es.append(_sylvester(a0, mat_frob(a0, n), R))
    return ExpSeries(M, tuple(es))


def log_coeffs(E: ExpSeries, N: int | None = None) -> ExpSeries:
    """Compositional inverse: l_n = -sum_{i=1}^{n} e_i l_{n-i}^(q^i)."""
    N = E.N if N is None else N
    if N > E.N:
        E = exp_coeffs(E.module, N)
    m = E.module.m
    z, one = _zero_one(E.module)
    ls = [identity(m, one, z)]
    for n in range(1, N + 1):
        acc = scalar_matrix(m, z, z)
        for i in range(1, n + 1):
            acc = mat_add(acc, mat_mul(E[i], mat_frob(ls[n - i], i)))
        ls.append(mat_neg(acc))
    return ExpSeries(E.module, tuple(ls), "log")


def _vmin(v):
    return min(x.val_bound() for x in v)


def _as_vector(z, m):
    scalar = not isinstance(z, (tuple, list))
    zs = (z,) if scalar else tuple(z)
    if len(zs) != m:
        raise ValidationError(f"point of length {len(zs)} for a {m}-dimensional module")
    return zs, scalar


def _coeff_floor(E: ExpSeries, K) -> int:
    vs = [
        c.val_bound() if isinstance(c, LocalFieldElem) else K.e * c.valuation_inf()
        for A in E.coeffs
        for r in A
        for c in r
        if not is_zero(c)
    ]
    return min(vs, default=0)


def series_eval(E: ExpSeries, z, precision: int):
    """sum_{n<=N} E_n z^(q^n), with the decay check on the last three terms."""
    zs, scalar = _as_vector(z, E.module.m)
    K = next(x.K for x in zs if isinstance(x, LocalFieldElem))
    zs = tuple(x if isinstance(x, LocalFieldElem) else K.embed(x, precision) for x in zs)
    if all(x.val is None for x in zs):
        return zs[0] if scalar else zs
    # Frobenius multiplies the absolute precision by q; only enough digits
    # to survive multiplication by the most negative coefficient are kept
    cap = precision + 2 * MARGIN + max(0, -_coeff_floor(E, K))
    vals = []
    acc = None
    cur = zs
    for n in range(E.N + 1):
        if n:
            cur = tuple(frobenius(x, 1).truncate(cap) for x in cur)
        term = mat_vec(E[n], cur)
        vals.append(min((t.val for t in term if t.val is not None), default=math.inf))
        acc = term if acc is None else tuple(a + b for a, b in zip(acc, term))
    tail = vals[-3:]
    # a term that vanished at working precision counts as decayed
    decaying = len(tail) == 3 and all(b > a or b == a == math.inf for a, b in zip(tail, tail[1:]))
    if not decaying:
        raise ExpDivergence(f"term valuations {vals} do not decay at this point")
    if tail[2] < math.inf:
        bound = tail[2] + (tail[2] - tail[1])
        if bound < precision:
            raise TruncationInsufficient(
                f"tail estimate {bound} is below the requested precision {precision}; raise the truncation"
            )
    return acc[0] if scalar else acc


def exp_eval(E: ExpSeries, z, precision: int):
    if E.kind != "exp":
        raise ValidationError("exp_eval needs an exponential series")
    return series_eval(E, z, precision)


def log_eval(L: ExpSeries, w, precision: int):
    if L.kind != "log":
        raise ValidationError("log_eval needs a logarithm series")
    return series_eval(L, w, precision)


def verify_functional_equation(M: TModule, E: ExpSeries, a, z, precision: int):
    """v(Phi(a)(e(z)) - e(dPhi(a) z)), +inf for constant a (F_q-linearity)."""
    a = as_fqpoly(a, M.F)
    if a.degree <= 0:
        return math.inf
    zs, _ = _as_vector(z, M.m)
    lhs = tw_eval(phi(M, a), exp_eval(E, zs, precision))
    rhs = exp_eval(E, mat_vec(dphi(M, a), zs), precision)
    return _vmin(tuple(x - y for x, y in zip(lhs, rhs)))


# ---------------------------------------------------------------- lattice quotient counts


@dataclass(frozen=True)
class LatticeQuotientSpec:
    d: int
    free_dim: int = 0

    def __post_init__(self):
        if self.d < 1 or self.free_dim < 0:
            raise ValidationError("need d >= 1 and free_dim >= 0")


BRUTE_LIMIT = 1 << 16


def _coprime_count(beta: FqPoly) -> int:
    """#{alpha : deg alpha < deg beta, gcd(alpha, beta) = 1} by enumeration."""
    F = beta.F
    if beta.degree == 0:
        return 1  # the class of 0
    n = 0
    for k in range(beta.degree):
        for alpha in polys_of_degree(F, k):
            if poly_gcd(alpha, beta).degree == 0:
                n += 1
    return n


def lattice_quotient_count(spec: LatticeQuotientSpec, a) -> int:
    """|W(k, [a])|: tuples of reduced fractions alpha_i/beta_i with beta_i | a,
    deg alpha_i < deg beta_i; counted by enumeration."""
    if not isinstance(a, FqPoly):
        raise ValidationError("a must be a polynomial in T")
    if a.degree <= 0:
        raise ConstantPolynomial("a must be non-constant")
    if a.F.order ** a.degree > BRUTE_LIMIT:
        raise BudgetExceeded(f"q^deg a = {a.F.order ** a.degree} exceeds the enumeration limit")
    per_coord = sum(_coprime_count(b) for b in monic_divisors(a))
    return per_coord**spec.d


def height_box_count(q: int, d: int, D: int) -> int:
    """|W(k, a)| for deg a = D: points of (k/A)^d of height <= q^D."""
    return (1 + sum(q ** (2 * k) - q ** (2 * k - 1) for k in range(1, D + 1))) ** d


def check_prop22_bijection(M: TModule, a, d: int | None = None) -> bool:
    a = as_fqpoly(a, M.F)
    D = dphi(M, a)
    if not is_scalar_matrix(D, _as_rfn(a)):
        raise HypothesisFailed(f"dPhi({a}) is not the scalar a*1")
    d = M.rank if d is None else d
    if d is None:
        raise ValidationError("the rank of the module must be declared")
    spec = LatticeQuotientSpec(d)
    lq = lattice_quotient_count(spec, a)
    return torsion_count(M, a) == lq and lq <= height_box_count(M.q, d, a.degree)


def _as_rfn(a: FqPoly):
    from .polys import RationalFn

    return RationalFn(a)


def torsion_chain(M: TModule, a):
    """(|A[a]|, |A[a(T^j)]|) with j = j(A); the first never exceeds the second."""
    from .tmodule import j_invariant

    a = as_fqpoly(a, M.F)
    j = j_invariant(M)
    return torsion_count(M, a), torsion_count(M, a.substitute_power(j))
