"""Precision-tracked elements of non-Archimedean local fields.

Two flavors are supported:

* ``LaurentField(q, e, f)``: F_{q^f}((u)) with u^e = 1/T, a tame extension of
  k_inf = F_q((1/T)) of ramification e and residue degree f.
* ``PadicField(p)``: Q_p.

Elements carry an absolute precision P: the value is known modulo u^P (p^P).
Every operation propagates precision; nothing silently invents digits.
Exact inputs (``RationalFn``, ``Fraction``, ``int``) are promoted on contact
at whatever precision the other operand can use.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import FlavorMismatch, InexactZero, InexactZeroInverse, ValidationError
from .finitefield import field, gf, prime_power
from .polys import FqPoly, RationalFn, height  # noqa: F401  (height re-exported)

MAX_Q = 16
MAX_P = 13


class LaurentField:
    kind = "laurent"

    def __init__(self, q: int, e: int = 1, f: int = 1):
        p, s = prime_power(q)
        if q > MAX_Q:
            raise ValidationError(f"q = {q} exceeds the supported bound {MAX_Q}")
        if e < 1 or f < 1:
            raise ValidationError("ramification and residue degree must be >= 1")
        if gcd(e, p) != 1:
            raise ValidationError(f"wild ramification e = {e} in characteristic {p}")
        self.p, self.s, self.q, self.e, self.f = p, s, q, e, f
        self.base = gf(q)
        self.residue = field(p, s * f)
        self.emb = self.base.embedding(self.residue)

    def __eq__(self, other):
        return isinstance(other, LaurentField) and (self.q, self.e, self.f) == (other.q, other.e, other.f)

    def __hash__(self):
        return hash(("laurent", self.q, self.e, self.f))

    def __repr__(self):
        return f"LaurentField(q={self.q}, e={self.e}, f={self.f})"

    @property
    def residue_size(self) -> int:
        return self.residue.order

    @property
    def abs_base(self) -> int:
        return self.q

    def zero(self, prec: int) -> "LocalFieldElem":
        return LocalFieldElem(self, None, (), prec)

    def uniformizer(self, prec: int) -> "LocalFieldElem":
        return LocalFieldElem(self, 1, (1,), prec)

    def from_digits(self, val: int, digits, prec: int) -> "LocalFieldElem":
        """sum_k digits[k] u^(val + k) + O(u^prec); leading zeros are stripped."""
        ds = list(digits)[: max(prec - val, 0)]
        k = 0
        while k < len(ds) and ds[k] == 0:
            k += 1
        if k == len(ds):
            return self.zero(prec)
        return LocalFieldElem(self, val + k, tuple(ds[k:]), prec)

    def exact_one(self):
        return RationalFn.from_int(self.base, 1)

    def exact_zero(self):
        return RationalFn.from_int(self.base, 0)

    def exact(self, k: int):
        return RationalFn.from_int(self.base, k)

    def residue_reps(self):
        """Representatives of the residue field, as digits."""
        return list(range(self.residue.order))

    def embed(self, x, prec: int) -> "LocalFieldElem":
        return _embed_laurent(self, x, prec, None)

    def embed_rel(self, x, rel: int) -> "LocalFieldElem":
        return _embed_laurent(self, x, None, rel)

    def compatible(self, x) -> bool:
        if isinstance(x, RationalFn):
            return x.F is self.base
        if isinstance(x, FqPoly):
            return x.F is self.base
        return isinstance(x, int)


class PadicField:
    kind = "padic"

    def __init__(self, p: int):
        from .finitefield import _is_prime

        if not _is_prime(p):
            raise ValidationError(f"{p} is not prime")
        if p > MAX_P:
            raise ValidationError(f"p = {p} exceeds the supported bound {MAX_P}")
        self.p = p
        self.q = p
        self.e = 1
        self.f = 1

    def __eq__(self, other):
        return isinstance(other, PadicField) and self.p == other.p

    def __hash__(self):
        return hash(("padic", self.p))

    def __repr__(self):
        return f"PadicField(p={self.p})"

    @property
    def residue_size(self) -> int:
        return self.p

    @property
    def abs_base(self) -> int:
        return self.p

    def zero(self, prec: int) -> "LocalFieldElem":
        return LocalFieldElem(self, None, 0, prec)

    def uniformizer(self, prec: int) -> "LocalFieldElem":
        return LocalFieldElem(self, 1, 1, prec)

    def from_digits(self, val: int, digits, prec: int) -> "LocalFieldElem":
        ds = list(digits)[: max(prec - val, 0)]
        unit = 0
        for d in reversed(ds):
            unit = unit * self.p + d
        return _padic_normalize(self, val, unit, prec)

    def exact_one(self):
        return Fraction(1)

    def exact_zero(self):
        return Fraction(0)

    def exact(self, k: int):
        return Fraction(k)

    def residue_reps(self):
        return list(range(self.p))

    def embed(self, x, prec: int) -> "LocalFieldElem":
        return _embed_padic(self, x, prec, None)

    def embed_rel(self, x, rel: int) -> "LocalFieldElem":
        return _embed_padic(self, x, None, rel)

    def compatible(self, x) -> bool:
        return isinstance(x, (int, Fraction))


# ---------------------------------------------------------------- digits

def _conv(F, a, b, r):
    """First r coefficients of the product of two digit sequences."""
    a = a[:r]
    b = b[:r]
    if not a or not b:
        return [0] * r
    if F.n == 1:
        p = F.p
        m = min(len(a), len(b))
        nb = ((m * (p - 1) ** 2).bit_length() + 8) // 8
        A = int.from_bytes(b"".join(x.to_bytes(nb, "little") for x in a), "little")
        B = int.from_bytes(b"".join(x.to_bytes(nb, "little") for x in b), "little")
        C = (A * B).to_bytes(nb * (len(a) + len(b)), "little")
        out = [int.from_bytes(C[nb * k : nb * (k + 1)], "little") % p for k in range(r)]
        return out
    out = [0] * r
    add, mul = F.add, F.mul
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(min(len(b), r - i)):
            y = b[j]
            if y:
                out[i + j] = add(out[i + j], mul(x, y))
    return out


def _series_inv(F, a, r):
    """Inverse of a power series with a[0] != 0, to r terms."""
    inv0 = F.inv(a[0])
    b = [inv0]
    k = 1
    while k < r:
        k2 = min(2 * k, r)
        # b <- b + b (1 - a b)
        ab = _conv(F, a, b, k2)
        e = [F.neg(x) for x in ab]
        e[0] = F.add(e[0], 1)
        corr = _conv(F, b, e, k2)
        b = b + [0] * (k2 - len(b))
        b = [F.add(x, y) for x, y in zip(b, corr)]
        k = k2
    return b[:r]


# ---------------------------------------------------------------- elements

class LocalFieldElem:
    """An element of a LaurentField or PadicField known to absolute precision.

    ``val`` is None for an element indistinguishable from zero.  The payload
    ``_d`` is a tuple of residue digits (laurent) or the integer unit part
    modulo p^(prec - val) (p-adic).
    """

    __slots__ = ("K", "val", "_d", "prec")

    def __init__(self, K, val, payload, prec):
        self.K = K
        self.val = val
        self._d = payload
        self.prec = prec

    # -- basic accessors
    @property
    def flavor(self) -> str:
        return self.K.kind

    def is_zero(self) -> bool:
        return self.val is None

    @property
    def rel_prec(self) -> int:
        return 0 if self.val is None else self.prec - self.val

    @property
    def digits(self) -> list[int]:
        if self.val is None:
            return []
        if self.K.kind == "laurent":
            return list(self._d)
        out, u = [], self._d
        for _ in range(self.prec - self.val):
            u, d = divmod(u, self.K.p)
            out.append(d)
        return out

    def valuation(self) -> int:
        if self.val is None:
            raise InexactZero(f"element is zero modulo the uniformizer^{self.prec}")
        return self.val

    def val_bound(self) -> int:
        """valuation if known, else the precision (a lower bound)."""
        return self.prec if self.val is None else self.val

    def coefficient(self, k: int) -> int:
        """Digit of u^k (p^k); requires k < prec."""
        if k >= self.prec:
            raise ValueError("digit beyond precision")
        if self.val is None or k < self.val:
            return 0
        return self.digits[k - self.val]

    def key(self, P: int | None = None):
        """Hashable key; two elements agree modulo u^P iff their keys match."""
        P = self.prec if P is None else P
        if P > self.prec:
            raise ValueError(f"key at {P} digits but only {self.prec} known")
        if self.val is None or self.val >= P:
            return (None,)
        ds = self.digits[: P - self.val]
        return (self.val, tuple(ds))

    def truncate(self, P: int) -> "LocalFieldElem":
        if P >= self.prec:
            return self
        return self.K.from_digits(self.val if self.val is not None else P, self.digits, P)

    def zero(self):
        return self.K.exact_zero()

    def one(self):
        return self.K.exact_one()

    # -- coercion
    def _coerce(self, other, rel=None):
        if isinstance(other, LocalFieldElem):
            if other.K != self.K:
                raise FlavorMismatch(f"{self.K} vs {other.K}")
            return other
        if isinstance(other, (int, Fraction, RationalFn, FqPoly)):
            if not self.K.compatible(other):
                raise FlavorMismatch(f"cannot promote {type(other).__name__} into {self.K}")
            if rel is not None:
                return self.K.embed_rel(other, rel)
            return self.K.embed(other, self.prec)
        return None

    def _rel_for_mul(self):
        return max(self.rel_prec, 1) if self.val is not None else 1

    # -- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _add(self, o)

    __radd__ = __add__

    def __neg__(self):
        if self.val is None:
            return self
        if self.K.kind == "laurent":
            F = self.K.residue
            return LocalFieldElem(self.K, self.val, tuple(F.neg(d) for d in self._d), self.prec)
        m = self.K.p ** (self.prec - self.val)
        return LocalFieldElem(self.K, self.val, (-self._d) % m, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _add(self, -o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _add(o, -self)

    def __mul__(self, other):
        if isinstance(other, LocalFieldElem):
            o = self._coerce(other)
        else:
            o = self._coerce(other, rel=self._rel_for_mul())
        if o is None:
            return NotImplemented
        return _mul(self, o)

    __rmul__ = __mul__

    def inverse(self) -> "LocalFieldElem":
        if self.val is None:
            raise InexactZeroInverse(f"inverting an element that is 0 mod uniformizer^{self.prec}")
        r = self.prec - self.val
        if self.K.kind == "laurent":
            ds = _series_inv(self.K.residue, list(self._d), r)
            return LocalFieldElem(self.K, -self.val, tuple(ds), r - self.val)
        m = self.K.p**r
        return LocalFieldElem(self.K, -self.val, pow(self._d, -1, m), r - self.val)

    def __truediv__(self, other):
        if isinstance(other, LocalFieldElem):
            o = self._coerce(other)
            return _mul(self, o.inverse())
        if isinstance(other, (int, Fraction, RationalFn, FqPoly)):
            if not self.K.compatible(other):
                raise FlavorMismatch(f"cannot promote {type(other).__name__} into {self.K}")
            if isinstance(other, FqPoly):
                other = RationalFn(other)
            if isinstance(other, int):
                other = self.K.exact(other)
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            inv = 1 / other if isinstance(other, Fraction) else other.inverse()
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other, rel=self._rel_for_mul())
        if o is None:
            return NotImplemented
        return _mul(o, self.inverse())

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.K.embed(1, max(self.rel_prec, 1))
        if self.K.kind == "laurent":
            # x^k = prod_i (x^(p^i))^(k_i), the p-power maps being cheap
            p = self.K.p
            result = None
            i = 0
            while k:
                k, d = divmod(k, p)
                if d:
                    term = _pow_small(power_p(self, i), d)
                    result = term if result is None else _mul(result, term)
                i += 1
            return result
        return _pow_small(self, k)

    # -- comparisons
    def __eq__(self, other):
        if not isinstance(other, LocalFieldElem):
            return NotImplemented
        return (self.K, self.val, self._d, self.prec) == (other.K, other.val, other._d, other.prec)

    def __hash__(self):
        return hash((self.K, self.val, self._d, self.prec))

    def agrees(self, other, P: int | None = None) -> bool:
        """True iff self - other vanishes modulo u^P (default: joint precision)."""
        d = self - other
        P = d.prec if P is None else P
        if d.prec < P:
            raise ValueError("not enough precision to compare")
        return d.val is None or d.val >= P

    def __repr__(self):
        return render(self)

    __str__ = __repr__


def _pow_small(x, k):
    result = x
    for _ in range(k - 1):
        result = _mul(result, x)
    return result


def _padic_normalize(K, val, unit, prec):
    if val >= prec:
        return K.zero(prec)
    p = K.p
    m = p ** (prec - val)
    unit %= m
    if unit == 0:
        return K.zero(prec)
    while unit % p == 0:
        unit //= p
        val += 1
    return LocalFieldElem(K, val, unit % (p ** (prec - val)), prec)


def _add(x: LocalFieldElem, y: LocalFieldElem) -> LocalFieldElem:
    K = x.K
    prec = min(x.prec, y.prec)
    if x.val is None or x.val >= prec:
        return y.truncate(prec) if y.val is not None else K.zero(prec)
    if y.val is None or y.val >= prec:
        return x.truncate(prec)
    if K.kind == "laurent":
        F = K.residue
        lo = min(x.val, y.val)
        n = prec - lo
        out = [0] * n
        for v, ds in ((x.val, x._d), (y.val, y._d)):
            off = v - lo
            for k in range(min(len(ds), n - off)):
                if ds[k]:
                    out[off + k] = F.add(out[off + k], ds[k])
        return K.from_digits(lo, out, prec)
    lo = min(x.val, y.val)
    p = K.p
    s = x._d * p ** (x.val - lo) + y._d * p ** (y.val - lo)
    return _padic_normalize(K, lo, s, prec)


def _mul(x: LocalFieldElem, y: LocalFieldElem) -> LocalFieldElem:
    K = x.K
    if x.val is None or y.val is None:
        if x.val is None and y.val is None:
            return K.zero(x.prec + y.prec)
        if x.val is None:
            return K.zero(x.prec + y.val)
        return K.zero(y.prec + x.val)
    r = min(x.prec - x.val, y.prec - y.val)
    val = x.val + y.val
    if K.kind == "laurent":
        ds = _conv(K.residue, list(x._d), list(y._d), r)
        return LocalFieldElem(K, val, tuple(ds), val + r)
    m = K.p**r
    return LocalFieldElem(K, val, (x._d * y._d) % m, val + r)


def power_p(x: LocalFieldElem, i: int) -> LocalFieldElem:
    """x^(p^i) in characteristic p (coefficient-wise, spreading digits)."""
    if x.K.kind != "laurent":
        raise FlavorMismatch("p-power Frobenius needs a characteristic-p field")
    if i == 0:
        return x
    Q = x.K.p**i
    if x.val is None:
        return x.K.zero(x.prec * Q)
    F = x.K.residue
    r = x.prec - x.val
    out = [0] * (r * Q)
    for k, d in enumerate(x._d):
        if d:
            out[k * Q] = F.pow(d, Q)
    return LocalFieldElem(x.K, x.val * Q, tuple(out[: (r - 1) * Q + 1] + [0] * (Q - 1)), x.prec * Q)


def frobenius(x, j: int = 1):
    """x^(q^j).  Exact inputs (RationalFn) are handled exactly."""
    if isinstance(x, RationalFn):
        return x.frobenius(j)
    if isinstance(x, LocalFieldElem):
        if x.K.kind != "laurent":
            raise FlavorMismatch("Frobenius is only defined in characteristic p")
        return power_p(x, x.K.s * j)
    if isinstance(x, (int,)):
        return x
    raise FlavorMismatch(f"no Frobenius on {type(x).__name__}")


def field_add(x, y):
    return x + y


def field_mul(x, y):
    return x * y


def field_inv(x):
    return x.inverse()


def valuation(x) -> int:
    if isinstance(x, LocalFieldElem):
        return x.valuation()
    if isinstance(x, RationalFn):
        return x.valuation_inf()
    raise TypeError(f"no valuation on {type(x).__name__}")


def absolute_value(x: LocalFieldElem) -> tuple[int, Fraction]:
    """|x| as an exact pair (base, exponent): q^(-v/e) or p^(-v)."""
    v = x.valuation()
    return x.K.abs_base, Fraction(-v, x.K.e)


# ---------------------------------------------------------------- embeddings

def _embed_laurent(K: LaurentField, x, prec, rel):
    if isinstance(x, int):
        x = RationalFn.from_int(K.base, x)
    if isinstance(x, FqPoly):
        x = RationalFn(x)
    if not isinstance(x, RationalFn):
        raise FlavorMismatch(f"cannot embed {type(x).__name__} into {K}")
    if x.F is not K.base:
        raise FlavorMismatch(f"F_{x.F.order}(T) does not embed into {K}")
    if x.is_zero():
        return K.zero(prec if prec is not None else rel)
    e = K.e
    val = e * (x.den.degree - x.num.degree)
    r = rel if prec is None else prec - val
    if r <= 0:
        return K.zero(prec)
    emb = K.emb
    R = K.residue

    def rev_series(poly):
        cs = poly.c
        d = poly.degree
        out = [0] * r
        k = 0
        while k * e < r and k <= d:
            out[k * e] = emb[cs[d - k]]
            k += 1
        return out

    N = rev_series(x.num)
    if x.den.degree == 0:
        inv = R.inv(emb[x.den.c[0]])
        ds = [R.mul(inv, d) for d in N]
    else:
        D = rev_series(x.den)
        ds = _conv(R, N, _series_inv(R, D, r), r)
    return LocalFieldElem(K, val, tuple(ds), val + r)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _embed_padic(K: PadicField, x, prec, rel):
    if isinstance(x, (RationalFn, FqPoly)):
        raise FlavorMismatch("function-field element cannot embed into Q_p")
    x = Fraction(x)
    if x == 0:
        return K.zero(prec if prec is not None else rel)
    p = K.p
    a, b = x.numerator, x.denominator
    va, vb = _vp(a, p), _vp(b, p)
    val = va - vb
    r = rel if prec is None else prec - val
    if r <= 0:
        return K.zero(prec)
    m = p**r
    unit = (a // p**va) * pow(b // p**vb, -1, m) % m
    return LocalFieldElem(K, val, unit, val + r)


def embed(x, K, precision: int) -> LocalFieldElem:
    """Embed an exact global element into the local field K to absolute precision."""
    if precision < 1:
        raise ValidationError("precision must be >= 1")
    return K.embed(x, precision)


# ---------------------------------------------------------------- extensions

def lift(x: LocalFieldElem, K2: LaurentField) -> LocalFieldElem:
    """Image of x under F_{q^f1}((u1)) -> F_{q^f2}((u2)), u1 = u2^(e2/e1)."""
    K1 = x.K
    if K1 == K2:
        return x
    if K2.e % K1.e or K2.f % K1.f or K1.q != K2.q:
        raise FlavorMismatch(f"{K1} does not embed into {K2}")
    k = K2.e // K1.e
    emb = K1.residue.embedding(K2.residue)
    if x.val is None:
        return K2.zero(x.prec * k)
    out = [0] * (len(x._d) * k)
    for i, d in enumerate(x._d):
        out[i * k] = emb[d]
    return LocalFieldElem(K2, x.val * k, tuple(out[: (len(x._d) - 1) * k + 1] + [0] * (k - 1)), x.prec * k)


def descend(x: LocalFieldElem, K1: LaurentField):
    """Preimage of x in the subfield K1, or None if x does not lie there."""
    K2 = x.K
    if K2.e % K1.e or K2.f % K1.f:
        return None
    k = K2.e // K1.e
    emb = K1.residue.embedding(K2.residue)
    back = {b: a for a, b in enumerate(emb)}
    if x.val is None:
        return K1.zero(x.prec // k)
    if x.val % k:
        return None
    P1 = x.prec // k
    ds = []
    full = x.digits
    for i, d in enumerate(full):
        pos = x.val + i
        if pos % k:
            if d:
                return None
            continue
        if pos // k >= P1:
            break
        if d not in back:
            return None
        ds.append(back[d])
    return K1.from_digits(x.val // k, ds, P1)


# ---------------------------------------------------------------- rendering

def _render_digit(F, d):
    s = F.render(d)
    return f"({s})" if "+" in s or "*" in s else s


def render(x: LocalFieldElem) -> str:
    K = x.K
    if K.kind == "padic":
        if x.val is None:
            return f"O({K.p}^{x.prec})"
        return f"{K.p}^{x.val}*{x.digits} + O({K.p}^{x.prec})"
    tail = f"O(u^{x.prec})"
    if x.val is None:
        return tail
    F = K.residue
    terms = []
    for k, d in enumerate(x._d):
        if d == 0:
            continue
        mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
        ds = _render_digit(F, d)
        if not mono:
            terms.append(ds)
        elif d == 1:
            terms.append(mono)
        else:
            terms.append(f"{ds}*{mono}")
    return f"u^{x.val}*({' + '.join(terms)}) + {tail}"


@lru_cache(maxsize=None)
def laurent(q: int, e: int = 1, f: int = 1) -> LaurentField:
    return LaurentField(q, e, f)


@lru_cache(maxsize=None)
def padic(p: int) -> PadicField:
    return PadicField(p)
