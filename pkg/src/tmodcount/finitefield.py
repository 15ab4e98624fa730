"""Finite fields F_{p^n} with precomputed log/antilog tables.

Elements are plain ints: the base-p encoding of the coefficient vector of a
polynomial in the generator ``g`` (``sum c_i p^i`` stands for ``sum c_i g^i``).
The defining polynomials are chosen Conway-style: for every proper divisor
``d`` of ``n`` the element ``g^((p^n-1)/(p^d-1))`` of F_{p^n} is the generator
of F_{p^d}.  This makes the subfield embeddings F_{p^d} -> F_{p^n} mutually
compatible, which the torsion search relies on when it compares points found
in different extensions.
"""

from __future__ import annotations

from functools import lru_cache

MAX_ORDER = 1024


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, s) with q = p**s, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    s, r = 0, q
    while r % p == 0:
        r //= p
        s += 1
    if r != 1 or not _is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return p, s


def _digits(a: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        a, r = divmod(a, p)
        out.append(r)
    return out


def _undigits(ds, p: int) -> int:
    a = 0
    for c in reversed(ds):
        a = a * p + c
    return a


def _power_table(poly: list[int], p: int, n: int) -> list[int] | None:
    """Powers g^0, g^1, ... of g modulo the monic ``poly`` (low-to-high, length
    n, leading 1 implicit).  Returns None unless g has order p^n - 1."""
    order = p**n - 1
    cur = [1] + [0] * (n - 1)
    table = []
    for k in range(order):
        enc = _undigits(cur, p)
        if k > 0 and enc == 1:
            return None
        table.append(enc)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(n):
                cur[i] = (cur[i] - top * poly[i]) % p
    if _undigits(cur, p) != 1:
        return None
    return table


class GF:
    """The finite field with p**n elements."""

    def __init__(self, p: int, n: int, poly: list[int], exp: list[int]):
        self.p = p
        self.n = n
        self.order = p**n
        self.poly = tuple(poly)
        m = self.order - 1
        self._m = m
        self._exp = exp + exp
        self._log = [None] * self.order
        for k, a in enumerate(exp):
            self._log[a] = k
        if p == 2:
            self._add = None
        else:
            q = self.order
            ds = [_digits(a, p, n) for a in range(q)]
            self._add = [
                [_undigits([(x + y) % p for x, y in zip(ds[a], ds[b])], p) for b in range(q)]
                for a in range(q)
            ]
            self._neg = [_undigits([(-x) % p for x in ds[a]], p) for a in range(q)]

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def __reduce__(self):
        return (field, (self.p, self.n))

    # arithmetic on encoded ints
    def add(self, a: int, b: int) -> int:
        if self._add is None:
            return a ^ b
        return self._add[a][b]

    def neg(self, a: int) -> int:
        if self._add is None:
            return a
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._exp[(self._m - self._log[a]) % self._m]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0
        return self._exp[(self._log[a] * k) % self._m]

    def from_int(self, k: int) -> int:
        return k % self.p

    def log(self, a: int) -> int:
        return self._log[a]

    def gen_power(self, k: int) -> int:
        return self._exp[k % self._m]

    @property
    def generator(self) -> int:
        return self._exp[1] if self.order > 2 else 1

    def elements(self):
        return range(self.order)

    def is_prime_field(self) -> bool:
        return self.n == 1

    def embedding(self, big: "GF") -> list[int]:
        """Image of every element of self in ``big`` (requires self ⊆ big)."""
        return _embedding(self.p, self.n, big.n)

    def render(self, a: int) -> str:
        if self.n == 1:
            return str(a)
        terms = []
        for i, c in reversed(list(enumerate(_digits(a, self.p, self.n)))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("g" if i == 1 else f"g^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return "+".join(terms) if terms else "0"


def _eval_in(F: GF, coeffs_low_high: list[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs_low_high):
        acc = F.add(F.mul(acc, x), c)
    return acc


@lru_cache(maxsize=None)
def field(p: int, n: int = 1) -> GF:
    """The (cached) field F_{p^n}."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p**n > MAX_ORDER:
        raise ValueError(f"F_{p}^{n} exceeds the supported size {MAX_ORDER}")
    divisors = [d for d in range(1, n) if n % d == 0]
    subs = [(d, field(p, d)) for d in divisors]
    for enc in range(p**n):
        poly = _digits(enc, p, n)
        if poly[0] == 0:
            continue
        exp = _power_table(poly, p, n)
        if exp is None:
            continue
        F = GF(p, n, poly, exp)
        ok = True
        for d, S in subs:
            r = F.gen_power((p**n - 1) // (p**d - 1))
            # minimal polynomial of the subfield generator, monic, low-to-high
            if _eval_in(F, list(S.poly) + [1], r) != 0:
                ok = False
                break
        if ok:
            return F
    raise ValueError(f"no compatible primitive polynomial for F_{p}^{n}")


@lru_cache(maxsize=None)
def _embedding(p: int, d: int, n: int) -> list[int]:
    if n % d:
        raise ValueError(f"F_{p}^{d} is not a subfield of F_{p}^{n}")
    S, B = field(p, d), field(p, n)
    if d == n:
        return list(range(S.order))
    step = (B.order - 1) // (S.order - 1)
    out = [0] * S.order
    for a in range(1, S.order):
        out[a] = B.gen_power(S.log(a) * step)
    return out


def gf(q: int) -> GF:
    """F_q for a prime power q."""
    p, s = prime_power(q)
    return field(p, s)
