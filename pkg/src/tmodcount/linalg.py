"""Dense linear algebra over whatever field the entries live in.

Entries may be exact (``RationalFn``, ``Fraction``) or precision-tracked
(``LocalFieldElem``); mixing is allowed and promotes to the local field.
Pivots are chosen by smallest valuation so that approximate entries lose
as little precision as possible.  Matrices are tuples of row tuples.
"""

from __future__ import annotations

from fractions import Fraction

from .localfield import LocalFieldElem, frobenius
from .polys import RationalFn


def is_zero(x) -> bool:
    if isinstance(x, (LocalFieldElem, RationalFn)):
        return x.is_zero()
    return x == 0


def zero_like(x):
    if isinstance(x, RationalFn):
        return x.zero()
    if isinstance(x, LocalFieldElem):
        return x.K.exact_zero()
    return Fraction(0)


def one_like(x):
    if isinstance(x, RationalFn):
        return x.one()
    if isinstance(x, LocalFieldElem):
        return x.K.exact_one()
    return Fraction(1)


def _pivot_score(x):
    if isinstance(x, LocalFieldElem):
        return x.val
    return 0


def frob(x, j: int = 1):
    return frobenius(x, j)


def matrix(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def identity(m: int, one, zero) -> tuple:
    return tuple(tuple(one if i == j else zero for j in range(m)) for i in range(m))


def scalar_matrix(m: int, s, zero) -> tuple:
    return tuple(tuple(s if i == j else zero for j in range(m)) for i in range(m))


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_neg(A):
    return tuple(tuple(-a for a in r) for r in A)


def mat_scale(s, A):
    return tuple(tuple(s * a for a in r) for r in A)


def mat_mul(A, B):
    cols = list(zip(*B))
    out = []
    for r in A:
        row = []
        for c in cols:
            acc = None
            for a, b in zip(r, c):
                if is_zero(a) or is_zero(b):
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else zero_like(r[0]))
        out.append(tuple(row))
    return tuple(out)


def mat_vec(A, v):
    out = []
    for r in A:
        acc = None
        for a, x in zip(r, v):
            if is_zero(a):
                continue
            t = a * x
            acc = t if acc is None else acc + t
        if acc is None:
            acc = zero_like(v[0]) if isinstance(v[0], (RationalFn, Fraction)) else v[0] * 0
        out.append(acc)
    return tuple(out)


def mat_frob(A, j: int = 1):
    return tuple(tuple(frob(a, j) for a in r) for r in A)


def mat_pow(A, k: int):
    m = len(A)
    s = A[0][0]
    result = identity(m, one_like(s), zero_like(s))
    base = A
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


def is_zero_matrix(A) -> bool:
    return all(is_zero(a) for r in A for a in r)


def is_scalar_matrix(A, s=None) -> bool:
    """A == s*1 (any s if s is None)."""
    m = len(A)
    if s is None:
        s = A[0][0]
    for i in range(m):
        for j in range(m):
            d = A[i][j] - s if i == j else A[i][j]
            if not is_zero(d):
                return False
    return True


def transpose(A):
    return tuple(zip(*A))


def rref(A):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = [list(r) for r in A]
    nrows = len(R)
    ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        cands = [i for i in range(r, nrows) if not is_zero(R[i][c])]
        if not cands:
            continue
        piv = min(cands, key=lambda i: (_pivot_score(R[i][c]), i))
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c] if not isinstance(R[r][c], (LocalFieldElem, RationalFn)) else R[r][c].inverse()
        R[r] = [inv * x for x in R[r]]
        for i in range(nrows):
            if i != r and not is_zero(R[i][c]):
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(x) for x in R), pivots


def rank(A) -> int:
    return len(rref(A)[1])


def nullspace(A):
    """Basis of the right kernel {x : A x = 0}, one vector per free column,
    in increasing order of the free column."""
    ncols = len(A[0])
    R, pivots = rref(A)
    sample = A[0][0]
    zero, one = zero_like(sample), one_like(sample)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(tuple(v))
    return basis


def det(A):
    """Determinant by elimination (valuation pivoting)."""
    M = [list(r) for r in A]
    m = len(M)
    sample = M[0][0]
    d = one_like(sample)
    for c in range(m):
        cands = [i for i in range(c, m) if not is_zero(M[i][c])]
        if not cands:
            return zero_like(sample) if not isinstance(sample, LocalFieldElem) else sample * 0
        piv = min(cands, key=lambda i: (_pivot_score(M[i][c]), i))
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        p = M[c][c]
        d = d * p
        inv = p.inverse() if isinstance(p, (LocalFieldElem, RationalFn)) else 1 / p
        for i in range(c + 1, m):
            if not is_zero(M[i][c]):
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def solve(A, b):
    """Solve A x = b for square invertible A."""
    m = len(A)
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, pivots = rref(aug)
    if pivots != list(range(m)):
        raise ZeroDivisionError("singular system")
    return tuple(R[i][m] for i in range(m))


def inverse(A):
    m = len(A)
    sample = A[0][0]
    I = identity(m, one_like(sample), zero_like(sample))
    aug = [list(r) + list(e) for r, e in zip(A, I)]
    R, pivots = rref(aug)
    if pivots[:m] != list(range(m)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(R[i][m:]) for i in range(m))


def is_nilpotent(N) -> bool:
    return is_zero_matrix(mat_pow(N, len(N)))
