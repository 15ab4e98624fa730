"""Twisted polynomials sum_i A_i tau^i with tau c = c^q tau.

Coefficients are m x m matrices (1 x 1 in the scalar case) whose entries are
exact elements of F_q(T) or precision-tracked local-field elements.  A twisted
polynomial acts on column vectors as the F_q-linear map x -> sum A_i x^(q^i).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch
from .finitefield import gf
from .linalg import (
    identity,
    is_zero,
    is_zero_matrix,
    mat_add,
    mat_frob,
    mat_mul,
    mat_neg,
    mat_vec,
    matrix,
    one_like,
    scalar_matrix,
    zero_like,
)
from .localfield import LocalFieldElem, frobenius
from .parsing import Evaluator
from .polys import FqPoly, RationalFn

_SCALARS = (RationalFn, LocalFieldElem, FqPoly, int, Fraction)


class TwistedPoly:
    __slots__ = ("q", "m", "coeffs", "_zero")

    def __init__(self, q: int, m: int, coeffs, zero=None):
        self.q = q
        self.m = m
        cs = [matrix(A) for A in coeffs]
        for A in cs:
            if len(A) != m or any(len(r) != m for r in A):
                raise DimensionMismatch(f"coefficient is not {m}x{m}")
        if zero is None:
            zero = RationalFn.from_int(gf(q), 0)
        self._zero = zero
        while cs and is_zero_matrix(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)

    # constructors
    @classmethod
    def scalar(cls, q: int, cs) -> "TwistedPoly":
        """Scalar twisted polynomial sum cs[i] tau^i."""
        F = gf(q)
        cs = [_as_scalar(c, F) for c in cs]
        return cls(q, 1, [((c,),) for c in cs])

    @classmethod
    def constant(cls, q: int, m: int, c) -> "TwistedPoly":
        F = gf(q)
        c = _as_scalar(c, F)
        z = zero_like(c)
        return cls(q, m, [scalar_matrix(m, c, z)])

    @classmethod
    def tau(cls, q: int, m: int = 1, k: int = 1) -> "TwistedPoly":
        F = gf(q)
        one = RationalFn.from_int(F, 1)
        z = one.zero()
        Z = scalar_matrix(m, z, z)
        return cls(q, m, [Z] * k + [identity(m, one, z)])

    @classmethod
    def identity(cls, q: int, m: int = 1) -> "TwistedPoly":
        return cls.tau(q, m, 0)

    def _like(self, coeffs) -> "TwistedPoly":
        return TwistedPoly(self.q, self.m, coeffs, self._zero)

    # structure
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int):
        if i < len(self.coeffs):
            return self.coeffs[i]
        z = self._zero
        return scalar_matrix(self.m, z, z)

    def scalar_coeff(self, i: int):
        return self.coeff(i)[0][0]

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else None

    @property
    def constant_term(self):
        return self.coeff(0)

    def _coerce(self, other):
        if isinstance(other, TwistedPoly):
            if other.m != self.m or other.q != self.q:
                raise DimensionMismatch(
                    f"twisted polynomials with (m, q) = ({self.m}, {self.q}) and ({other.m}, {other.q})"
                )
            return other
        if isinstance(other, _SCALARS):
            return TwistedPoly.constant(self.q, self.m, other)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return self._like([mat_add(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return self._like([mat_neg(A) for A in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return self._like([])
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, A in enumerate(self.coeffs):
            if is_zero_matrix(A):
                continue
            for j, B in enumerate(other.coeffs):
                if is_zero_matrix(B):
                    continue
                term = mat_mul(A, mat_frob(B, i) if i else B)
                out[i + j] = term if out[i + j] is None else mat_add(out[i + j], term)
        z = self._zero
        Z = scalar_matrix(self.m, z, z)
        return self._like([c if c is not None else Z for c in out])

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a twisted polynomial")
        result = TwistedPoly.identity(self.q, self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, _SCALARS):
            other = self._coerce(other)
        if not isinstance(other, TwistedPoly):
            return NotImplemented
        if (self.q, self.m) != (other.q, other.m):
            return False
        return (self - other).is_zero()

    __hash__ = None

    # action on points
    def __call__(self, x):
        return tw_eval(self, x)

    def __repr__(self):
        return f"TwistedPoly({render_twisted(self)})"

    def __str__(self):
        return render_twisted(self)


def _as_scalar(c, F):
    if isinstance(c, int):
        return RationalFn.from_int(F, c)
    if isinstance(c, FqPoly):
        return RationalFn(c)
    return c


def tw_add(P: TwistedPoly, Q: TwistedPoly) -> TwistedPoly:
    if (P.m, P.q) != (Q.m, Q.q):
        raise DimensionMismatch("tw_add on twisted polynomials of different shapes")
    return P + Q


def tw_mul(P: TwistedPoly, Q: TwistedPoly) -> TwistedPoly:
    if (P.m, P.q) != (Q.m, Q.q):
        raise DimensionMismatch("tw_mul on twisted polynomials of different shapes")
    return P * Q


def tw_eval(P: TwistedPoly, x):
    """sum_i A_i x^(q^i) for a vector x (a bare scalar is treated as m = 1)."""
    scalar_in = not isinstance(x, (tuple, list))
    xs = (x,) if scalar_in else tuple(x)
    if len(xs) != P.m:
        raise DimensionMismatch(f"point of length {len(xs)} for a {P.m}-dimensional map")
    acc = None
    cur = xs
    for i, A in enumerate(P.coeffs):
        if i:
            cur = tuple(frobenius(c, 1) for c in cur)
        if is_zero_matrix(A):
            continue
        term = mat_vec(A, cur)
        acc = term if acc is None else tuple(a + b for a, b in zip(acc, term))
    if acc is None:
        acc = tuple(c * 0 if isinstance(c, LocalFieldElem) else zero_like(c) for c in xs)
    return acc[0] if scalar_in else acc


def tw_divmod_right(A: TwistedPoly, B: TwistedPoly):
    """Scalar right division: A = Q*B + R with deg R < deg B."""
    if A.m != 1 or B.m != 1:
        raise DimensionMismatch("right division is defined for scalar twisted polynomials")
    if B.is_zero():
        raise ZeroDivisionError("division by the zero twisted polynomial")
    q = A.q
    db = B.degree
    lb = B.scalar_coeff(db)
    Q = TwistedPoly(q, 1, [], A._zero)
    R = A
    while not R.is_zero() and R.degree >= db:
        k = R.degree - db
        c = R.scalar_coeff(R.degree) / frobenius(lb, k)
        term = TwistedPoly(q, 1, [((A._zero,),)] * k + [((c,),)], A._zero)
        Q = Q + term
        newR = R - term * B
        if not newR.is_zero() and newR.degree >= R.degree:
            # approximate leading coefficient did not cancel exactly; drop it
            newR = TwistedPoly(q, 1, newR.coeffs[: R.degree], A._zero)
        R = newR
    return Q, R


# ---------------------------------------------------------------- text form

def _render_scalar(c) -> str:
    s = str(c)
    if any(ch in s for ch in " +-/") and not (s.startswith("(") and s.endswith(")")):
        return f"({s})"
    return s


def _render_matrix(A) -> str:
    return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in A) + "]"


def render_twisted(P: TwistedPoly) -> str:
    """Text form ``a0 + a1*t + a2*t^2`` (t stands for tau)."""
    if P.is_zero():
        return "0"
    parts = []
    for i, A in enumerate(P.coeffs):
        if is_zero_matrix(A):
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if P.m == 1:
            c = A[0][0]
            if mono and not is_zero(c - one_like(c)):
                parts.append(f"{_render_scalar(c)}*{mono}")
            elif mono:
                parts.append(mono)
            else:
                parts.append(str(c))
        else:
            one = one_like(A[0][0])
            z = zero_like(A[0][0])
            if mono and all(is_zero(A[r][s] - (one if r == s else z)) for r in range(P.m) for s in range(P.m)):
                parts.append(mono)
            else:
                mat = _render_matrix(A)
                parts.append(f"{mat}*{mono}" if mono else mat)
    return " + ".join(parts)


def scalar_env(F):
    """Callbacks that read integers, T and the field generator g as F_q(T) elements."""

    def number(k):
        return RationalFn.from_int(F, k)

    def name(s):
        if s == "T":
            return RationalFn.T(F)
        if s == "g":
            return RationalFn(FqPoly.const(F, F.generator))
        raise ValueError(f"unknown name {s!r}")

    return number, name


def parse_twisted(text: str, q: int, m: int = 1, line: int = 1, col: int = 1, source=None) -> TwistedPoly:
    """Read the ``a0 + a1*t + ...`` form; matrices as ``[[a, b], [c, d]]``."""
    F = gf(q)
    number, scalar_name = scalar_env(F)

    def name(s):
        if s == "t":
            return TwistedPoly.tau(q, m)
        return scalar_name(s)

    def rows(items):
        if len(items) != m or any(not isinstance(r, list) or len(r) != m for r in items):
            raise ValueError(f"expected a {m}x{m} matrix")
        entries = [[_as_scalar(x, F) for x in r] for r in items]
        for r in entries:
            for x in r:
                if isinstance(x, TwistedPoly):
                    raise ValueError("matrix entries must be scalars")
        return TwistedPoly(q, m, [entries])

    value = Evaluator(number, name, rows=rows, source=source).parse(text, line, col)
    if not isinstance(value, TwistedPoly):
        value = TwistedPoly.constant(q, m, value)
    return value
