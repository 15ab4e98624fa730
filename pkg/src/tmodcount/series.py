"""Truncated multivariate power series with exact or local-field coefficients.

A series is a dict from exponent tuples to coefficients plus an optional
total-degree bound ``trunc``: terms of higher degree are discarded by
products.  ``trunc = None`` marks an honest polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .linalg import is_zero, one_like, zero_like
from .localfield import LocalFieldElem
from .parsing import Evaluator
from .polys import FqPoly, RationalFn

_SCALARS = (RationalFn, LocalFieldElem, FqPoly, int, Fraction)


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Series:
    __slots__ = ("nvars", "terms", "trunc")

    def __init__(self, nvars: int, terms=None, trunc: int | None = None):
        self.nvars = nvars
        self.trunc = trunc
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != nvars:
                raise ValueError(f"exponent {k} for {nvars} variables")
            if trunc is not None and sum(k) > trunc:
                continue
            if isinstance(c, FqPoly):
                c = RationalFn(c)
            if not is_zero(c):
                clean[k] = c
        self.terms = clean

    @classmethod
    def variable(cls, nvars: int, i: int, one, trunc=None) -> "Series":
        k = [0] * nvars
        k[i] = 1
        return cls(nvars, {tuple(k): one}, trunc)

    @classmethod
    def constant(cls, nvars: int, c, trunc=None) -> "Series":
        return cls(nvars, {(0,) * nvars: c}, trunc)

    def _coerce(self, other):
        if isinstance(other, Series):
            if other.nvars != self.nvars:
                raise ValueError("series in different numbers of variables")
            return other
        if isinstance(other, _SCALARS):
            return Series.constant(self.nvars, other, None)
        return NotImplemented

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, k):
        return self.terms.get(tuple(k))

    def sample(self):
        for c in self.terms.values():
            return c
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return Series(self.nvars, out, _min_trunc(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return Series(self.nvars, {k: -c for k, c in self.terms.items()}, self.trunc)

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
        tr = _min_trunc(self.trunc, other.trunc)
        out = {}
        for ka, a in self.terms.items():
            da = sum(ka)
            for kb, b in other.terms.items():
                if tr is not None and da + sum(kb) > tr:
                    continue
                k = tuple(x + y for x, y in zip(ka, kb))
                t = a * b
                out[k] = out[k] + t if k in out else t
        return Series(self.nvars, out, tr)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _SCALARS):
            if isinstance(other, int):
                s = self.sample()
                other = one_like(s) * other if s is not None else Fraction(other)
            inv = other.inverse() if hasattr(other, "inverse") else 1 / other
            return self * inv
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a series")
        s = self.sample()
        result = Series.constant(self.nvars, one_like(s) if s is not None else Fraction(1), self.trunc)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncate(self, D: int) -> "Series":
        return Series(self.nvars, self.terms, _min_trunc(self.trunc, D))

    def derivative(self, i: int) -> "Series":
        """Formal partial derivative; k x^(k-1) uses k in the prime field."""
        out = {}
        for k, c in self.terms.items():
            if k[i] == 0:
                continue
            nk = list(k)
            nk[i] -= 1
            out[tuple(nk)] = c * k[i]
        tr = None if self.trunc is None else self.trunc - 1
        return Series(self.nvars, out, tr)

    def min_coeff_valuation(self, nonconstant: bool = False):
        vals = []
        for k, c in self.terms.items():
            if nonconstant and not any(k):
                continue
            if isinstance(c, LocalFieldElem):
                vals.append(c.val_bound())
            elif isinstance(c, RationalFn):
                vals.append(c.valuation_inf())
            else:
                fr = Fraction(c)
                vals.append(0 if fr == 0 else None)
        return vals

    def __call__(self, point):
        return evaluate(self, point)

    def partial(self, assign: dict) -> "Series":
        """Substitute values for some variables; the result keeps the others."""
        keep = [i for i in range(self.nvars) if i not in assign]
        cache = {}
        out = {}
        for k, c in self.terms.items():
            t = c
            for i, v in assign.items():
                if k[i]:
                    key = (i, k[i])
                    if key not in cache:
                        cache[key] = assign[i] ** k[i]
                    t = t * cache[key]
            nk = tuple(k[i] for i in keep)
            out[nk] = out[nk] + t if nk in out else t
        return Series(len(keep), out, self.trunc)

    def compose(self, subs: list["Series"], D: int) -> "Series":
        """self(subs[0], ..., subs[n-1]) truncated at total degree D."""
        nv = subs[0].nvars
        subs = [s.truncate(D) for s in subs]
        powers = {}

        def pw(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = subs[i] ** e if e > 1 else subs[i]
            return powers[(i, e)]

        acc = Series(nv, {}, D)
        for k, c in self.terms.items():
            t = Series.constant(nv, c, D)
            for i, e in enumerate(k):
                if e:
                    t = t * pw(i, e)
            acc = acc + t
        return acc.truncate(D)

    def shift(self, center) -> "Series":
        """Re-expand around ``center``: returns G(s) = self(center + s)."""
        n = self.nvars
        s = self.sample()
        one = one_like(s) if s is not None else Fraction(1)
        subs = [Series.variable(n, i, one) + center[i] for i in range(n)]
        D = self.trunc if self.trunc is not None else self.degree
        return self.compose(subs, D) if D >= 0 else self

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"Series({render_series(self)})"


def _pow_cached(cache, i, x, k):
    key = (i, k)
    if key not in cache:
        cache[key] = x**k
    return cache[key]


def evaluate(S: Series, point):
    """Value of S at a point (tuple of scalars or local-field elements)."""
    if len(point) != S.nvars:
        raise ValueError(f"point of length {len(point)} for {S.nvars} variables")
    cache = {}
    acc = None
    for k, c in S.terms.items():
        t = c
        for i, e in enumerate(k):
            if e:
                t = t * _pow_cached(cache, i, point[i], e)
        acc = t if acc is None else acc + t
    if acc is None:
        for x in point:
            if isinstance(x, LocalFieldElem):
                return x.K.zero(x.prec)
        return zero_like(point[0]) if point else Fraction(0)
    return acc


def monomial_str(k, names) -> str:
    parts = []
    for e, nm in zip(k, names):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def render_series(S: Series, names=None) -> str:
    names = names or [f"x{i + 1}" for i in range(S.nvars)]
    items = sorted(S.terms.items(), key=lambda kc: (sum(kc[0]), tuple(-e for e in kc[0])))
    parts = []
    for k, c in items:
        mono = monomial_str(k, names)
        cs = str(c)
        if any(ch in cs for ch in " +-/") and not (cs.startswith("(") and cs.endswith(")")):
            cs = f"({cs})"
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts) if parts else "0"


def parse_series(text: str, names, ring, line: int = 1, col: int = 1, source=None, extra=None) -> Series:
    """Read a polynomial / truncated series in the named variables.

    ``ring`` supplies ``number(k)`` and ``name(s)`` callbacks for scalars
    (see ``scalar_ring``).  ``sum(a, b, ...)`` is accepted as a wrapper.
    """
    number, scalar_name = ring
    n = len(names)
    index = {nm: i for i, nm in enumerate(names)}
    one = number(1)

    def name(s):
        if s in index:
            return Series.variable(n, index[s], one)
        if extra and s in extra:
            return extra[s]
        return scalar_name(s)

    def call(fn, args):
        if fn == "sum":
            acc = Series(n, {})
            for a in args:
                acc = acc + a
            return acc
        raise ValueError(f"unknown function {fn!r}")

    value = Evaluator(number, name, call, source=source).parse(text, line, col)
    if not isinstance(value, Series):
        value = Series.constant(n, value)
    return value


def scalar_ring(K):
    """Scalar callbacks for a field flavor: F_q(T) for laurent, Q for p-adic."""
    from .localfield import LaurentField
    from .twisted import scalar_env

    if isinstance(K, LaurentField):
        number, name = scalar_env(K.base)

        def name2(s):
            if s == "u":
                return RationalFn.T(K.base).inverse() if K.e == 1 else _bad_u(K)
            return name(s)

        return number, name2

    def number_q(k):
        return Fraction(k)

    def name_q(s):
        if s == "p":
            return Fraction(K.p)
        raise ValueError(f"unknown name {s!r}")

    return number_q, name_q


def _bad_u(K):
    raise ValueError("u is not a rational function when e > 1")


def all_exponents(nvars: int, D: int):
    for k in iproduct(range(D + 1), repeat=nvars):
        if sum(k) <= D:
            yield k
