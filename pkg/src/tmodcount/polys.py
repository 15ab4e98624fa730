"""The rings A = F_q[T] and k = F_q(T).

``FqPoly`` is a dense polynomial over F_q (coefficients low to high, encoded
field ints); ``RationalFn`` is a reduced fraction with monic denominator.
Degrees of exponential-series denominators grow like n*q^n, so products skip
zero coefficients and reduction avoids gcds when one side is a constant.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .finitefield import GF, gf


def _trim(cs):
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    return tuple(cs[:n])


class FqPoly:
    __slots__ = ("F", "c")

    def __init__(self, F: GF, coeffs=()):
        self.F = F
        self.c = _trim(list(coeffs))

    # constructors
    @classmethod
    def T(cls, F: GF) -> "FqPoly":
        return cls(F, (0, 1))

    @classmethod
    def const(cls, F: GF, a: int) -> "FqPoly":
        return cls(F, (a,))

    @classmethod
    def monomial(cls, F: GF, k: int, a: int = 1) -> "FqPoly":
        return cls(F, [0] * k + [a])

    def _coerce(self, other):
        if isinstance(other, FqPoly):
            if other.F is not self.F:
                raise ValueError(f"polynomials over {self.F} and {other.F}")
            return other
        if isinstance(other, int):
            return FqPoly(self.F, (self.F.from_int(other),))
        return NotImplemented

    @property
    def degree(self) -> int:
        """Degree, with -1 standing for the zero polynomial (degree -inf)."""
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_constant(self) -> bool:
        return len(self.c) <= 1

    @property
    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def monic(self) -> "FqPoly":
        if not self.c or self.c[-1] == 1:
            return self
        inv = self.F.inv(self.c[-1])
        return FqPoly(self.F, [self.F.mul(inv, a) for a in self.c])

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F, a, b = self.F, self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = F.add(out[i], y)
        return FqPoly(F, out)

    __radd__ = __add__

    def __neg__(self):
        return FqPoly(self.F, [self.F.neg(a) for a in self.c])

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
        F = self.F
        a, b = self.c, other.c
        if not a or not b:
            return FqPoly(F)
        sa = [(i, x) for i, x in enumerate(a) if x]
        sb = [(j, y) for j, y in enumerate(b) if y]
        if len(sa) > len(sb):
            sa, sb = sb, sa
        out = [0] * (len(a) + len(b) - 1)
        add, mul = F.add, F.mul
        for i, x in sa:
            for j, y in sb:
                out[i + j] = add(out[i + j], mul(x, y))
        return FqPoly(F, out)

    __rmul__ = __mul__

    def scale(self, a: int) -> "FqPoly":
        return FqPoly(self.F, [self.F.mul(a, x) for x in self.c])

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = FqPoly(self.F, (1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        r = list(self.c)
        db = other.degree
        inv = F.inv(other.lc)
        qt = [0] * max(len(r) - db, 0)
        tail = [(j, y) for j, y in enumerate(other.c[:-1]) if y]
        for k in range(len(r) - 1, db - 1, -1):
            a = r[k]
            if a == 0:
                continue
            f = F.mul(a, inv)
            qt[k - db] = f
            r[k] = 0
            for j, y in tail:
                idx = k - db + j
                r[idx] = F.sub(r[idx], F.mul(f, y))
        return FqPoly(F, qt), FqPoly(F, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, FqPoly):
            return NotImplemented
        return self.F is other.F and self.c == other.c

    def __hash__(self):
        return hash((self.F.p, self.F.n, self.c))

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.c):
            acc = self.F.add(self.F.mul(acc, x), a)
        return acc

    def substitute_power(self, j: int) -> "FqPoly":
        """a(T^j)."""
        if j == 1 or self.is_constant():
            return self
        out = [0] * (j * self.degree + 1)
        for i, a in enumerate(self.c):
            out[i * j] = a
        return FqPoly(self.F, out)

    def frobenius(self, j: int = 1) -> "FqPoly":
        """a^(q^j); coefficients lie in F_q, so this is a(T^(q^j))."""
        return self.substitute_power(self.F.order**j)

    def derivative(self) -> "FqPoly":
        F = self.F
        return FqPoly(F, [F.mul(F.from_int(i), a) for i, a in enumerate(self.c)][1:])

    def key(self):
        """Sort key: degree first, then coefficients from the top down."""
        return (self.degree, tuple(reversed(self.c)))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return f"FqPoly({self})"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if a == 0:
                continue
            s = self.F.render(a)
            if self.F.n > 1 and "+" in s:
                s = f"({s})"
            if i == 0:
                terms.append(s)
            else:
                mono = "T" if i == 1 else f"T^{i}"
                terms.append(mono if a == 1 else f"{s}*{mono}")
        return " + ".join(terms)


def poly_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: FqPoly, b: FqPoly) -> FqPoly:
    if a.is_zero() or b.is_zero():
        return FqPoly(a.F)
    return ((a * b) // poly_gcd(a, b)).monic()


def polys_of_degree(F: GF, d: int, monic: bool = False):
    """All polynomials of exact degree d (d = -1 yields the zero polynomial)."""
    if d < 0:
        yield FqPoly(F)
        return
    leads = [1] if monic else range(1, F.order)
    for lead in leads:
        for low in product(range(F.order), repeat=d):
            yield FqPoly(F, low[::-1] + (lead,))


def polys_up_to(F: GF, d: int, monic: bool = False):
    """All polynomials of degree <= d in increasing key order."""
    if not monic:
        yield FqPoly(F)
    for k in range(0, d + 1):
        yield from sorted(polys_of_degree(F, k, monic), key=FqPoly.key)


def monic_divisors(a: FqPoly):
    """Monic divisors of a nonzero polynomial, by brute force over degrees."""
    F = a.F
    out = []
    for k in range(0, a.degree + 1):
        for b in polys_of_degree(F, k, monic=True):
            if (a % b).is_zero():
                out.append(b)
    return out


class RationalFn:
    """An element num/den of F_q(T) in canonical form (gcd 1, den monic)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        if isinstance(num, RationalFn) and den is None:
            self.num, self.den = num.num, num.den
            return
        if den is None:
            den = FqPoly(num.F, (1,))
        if isinstance(den, int):
            den = FqPoly(num.F, (den % num.F.p,))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = FqPoly(num.F, (1,))
            elif not (num.is_constant() or den.is_constant()):
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num // g, den // g
            lc = den.lc
            if lc != 1:
                inv = num.F.inv(lc)
                num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @property
    def F(self) -> GF:
        return self.num.F

    @classmethod
    def from_int(cls, F: GF, k: int) -> "RationalFn":
        return cls(FqPoly(F, (F.from_int(k),)))

    @classmethod
    def T(cls, F: GF) -> "RationalFn":
        return cls(FqPoly.T(F))

    def zero(self) -> "RationalFn":
        return RationalFn(FqPoly(self.F))

    def one(self) -> "RationalFn":
        return RationalFn(FqPoly(self.F, (1,)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.degree == 0 and self.num.c == (1,)

    def _coerce(self, other):
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, FqPoly):
            return RationalFn(other)
        if isinstance(other, int):
            return RationalFn.from_int(self.F, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        if other.den.degree == 0:
            return RationalFn(self.num + other.num * self.den, self.den)
        if self.den.degree == 0:
            return RationalFn(self.num * other.den + other.num, other.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, _reduced=True)

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
        a, b, c, d = self.num, self.den, other.num, other.den
        if a.is_zero() or c.is_zero():
            return self.zero()
        if not (a.is_constant() or d.is_constant()):
            g = poly_gcd(a, d)
            if g.degree > 0:
                a, d = a // g, d // g
        if not (c.is_constant() or b.is_constant()):
            g = poly_gcd(c, b)
            if g.degree > 0:
                c, b = c // g, b // g
        return RationalFn(a * c, b * d, _reduced=True).normalized()

    __rmul__ = __mul__

    def normalized(self) -> "RationalFn":
        lc = self.den.lc
        if lc == 1:
            return self
        inv = self.F.inv(lc)
        return RationalFn(self.num.scale(inv), self.den.scale(inv), _reduced=True)

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in F_q(T)")
        return RationalFn(self.den, self.num, _reduced=True).normalized()

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFn(self.num**k, self.den**k, _reduced=True)

    def frobenius(self, j: int = 1) -> "RationalFn":
        return RationalFn(self.num.frobenius(j), self.den.frobenius(j), _reduced=True)

    def substitute_power(self, j: int) -> "RationalFn":
        return RationalFn(self.num.substitute_power(j), self.den.substitute_power(j), _reduced=True)

    def height_size(self) -> int:
        """max(|num|, |den|) at the infinite place: q^max(deg num, deg den)."""
        return self.F.order ** max(self.num.degree, self.den.degree, 0)

    def valuation_inf(self) -> int:
        """The 1/T-adic valuation deg den - deg num (raises on zero)."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        return self.den.degree - self.num.degree

    def key(self):
        return (self.den.key(), self.num.key())

    def __eq__(self, other):
        if isinstance(other, (int, FqPoly)):
            other = self._coerce(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFn({self})"

    def __str__(self):
        n = str(self.num)
        if self.den.degree == 0:
            return n
        d = str(self.den)
        if len(self.num.c) > 1 and " " in n:
            n = f"({n})"
        if " " in d:
            d = f"({d})"
        return f"{n}/{d}"


def rational_size(x) -> int:
    """Height contribution max(|num|, |den|) of a coordinate.

    In characteristic p this is q^deg; in characteristic 0 (``Fraction``) the
    ordinary magnitude of the reduced numerator and denominator.
    """
    if isinstance(x, RationalFn):
        return x.height_size()
    x = Fraction(x)
    return max(abs(x.numerator), x.denominator)


def height(z) -> int:
    """The height max_i max(|a_i|, |b_i|) of a tuple of rationals."""
    if not isinstance(z, (tuple, list)):
        z = (z,)
    return max((rational_size(x) for x in z), default=1)


def coerce_fq(q_or_field) -> GF:
    return q_or_field if isinstance(q_or_field, GF) else gf(q_or_field)
