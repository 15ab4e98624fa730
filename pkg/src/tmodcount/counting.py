"""Bounded-height rational points on analytic sets, and hypersurface covers.

Heights: for z in F_q(T), H(a/b) = q^max(deg a, deg b) in lowest terms; for
z in Q the archimedean max(|a|, b).  The height of a point is the max over
its coordinates.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb, gcd

from .errors import BudgetExceeded, InsufficientData, KernelEmpty, ValidationError
from .hensel import AnalyticMap, vbound
from .linalg import is_zero, nullspace, zero_like
from .localfield import LaurentField, LocalFieldElem, PadicField
from .polys import FqPoly, RationalFn, height, poly_gcd, polys_up_to
from .series import Series, evaluate

MAX_DEPTH = 12


# ---------------------------------------------------------------- enumeration


def _fq_rationals(F, s: int):
    """All x in F_q(T) with max(deg num, deg den) <= s, reduced, den monic."""
    zero = FqPoly(F, ())
    out = [RationalFn(zero)]
    dens = list(polys_up_to(F, s, monic=True))
    nums = [a for a in polys_up_to(F, s) if not a.is_zero()]
    for b in dens:
        for a in nums:
            if b.degree == 0 or poly_gcd(a, b).degree == 0:
                out.append(RationalFn(a, b, _reduced=True))
    return out


def _q_rationals(t: int):
    out = [Fraction(0)]
    for b in range(1, t + 1):
        for a in range(1, t + 1):
            if gcd(a, b) == 1:
                out.append(Fraction(a, b))
                out.append(Fraction(-a, b))
    return out


def point_sort_key(z):
    return (height(z), tuple(_coord_key(x) for x in z))


def _coord_key(x):
    if isinstance(x, RationalFn):
        return x.key()
    return (x.denominator, x.numerator)


def rationals_1d(flavor, t: int):
    """Height-<=t elements of Q_K, sorted by height then (den, num)."""
    if t < 1:
        raise ValidationError("height bound must be >= 1")
    if isinstance(flavor, LaurentField):
        F = flavor.base
        s = int(math.floor(math.log(t, F.order) + 1e-9))
        pts = _fq_rationals(F, s)
    else:
        pts = _q_rationals(t)
    return sorted(pts, key=lambda x: point_sort_key((x,)))


def enumerate_rationals(n: int, t: int, flavor):
    """Points of Q_K^n of height <= t in canonical order (a generator)."""
    base = rationals_1d(flavor, t)
    if n == 1:
        yield from ((x,) for x in base)
        return
    yield from sorted(product(base, repeat=n), key=point_sort_key)


def local_valuation(x, K) -> float:
    """Valuation of an exact rational in K (u-units); +inf at 0."""
    if is_zero(x):
        return math.inf
    if isinstance(K, LaurentField):
        return K.e * x.valuation_inf()
    fr = Fraction(x)
    v, a, b = 0, fr.numerator, fr.denominator
    while a % K.p == 0:
        a //= K.p
        v += 1
    while b % K.p == 0:
        b //= K.p
        v -= 1
    return v


# ---------------------------------------------------------------- analytic sets


@dataclass(frozen=True)
class AlgebraicPartSpec:
    """Declared components of W^alg: each a list of exact polynomials."""

    components: tuple = ()

    def contains(self, z) -> bool:
        for comp in self.components:
            if all(is_zero(evaluate(P, tuple(z))) for P in comp):
                return True
        return False


@dataclass(frozen=True, eq=False)
class AnalyticSetSpec:
    """W = Phi(B_1^h) (image form) or {F = 0} (zero-locus form) inside K^m.

    ``map_builder(precision)`` returns the image map; it lets series such as
    an exponential pick a truncation adequate for the precision in use.
    """

    form: str
    K: object
    ambient_dim: int
    source_dim: int = 0
    map_builder: object = None
    F: AnalyticMap | None = None
    chart: object = None
    graph: bool = False
    label: str = ""

    def __post_init__(self):
        if self.form not in ("image", "zero_locus"):
            raise ValidationError(f"unknown form {self.form!r}")
        if self.form == "image" and self.map_builder is None:
            raise ValidationError("image form needs a map")
        if self.form == "zero_locus" and self.F is None:
            raise ValidationError("zero-locus form needs equations")

    def image_map(self, precision: int) -> AnalyticMap:
        return self.map_builder(precision)

    @property
    def integral(self) -> bool:
        """Does Phi send B_1^h into B_1^m? (all coefficients integral)"""
        if self.form != "image":
            return False
        Phi = self.image_map(10)
        for S in Phi.components:
            for c in S.terms.values():
                if _cval(c, self.K) < 0:
                    return False
        return True


def _cval(c, K):
    if isinstance(c, LocalFieldElem):
        return c.val_bound()
    return local_valuation(c, K)


def image_set(K, Phi, label="", graph=None) -> AnalyticSetSpec:
    """Image form from a fixed map (components in h variables)."""
    h, d = Phi.nvars, Phi.ncomp
    if graph is None:
        graph = _is_graph(Phi)
    return AnalyticSetSpec("image", K, d, h, lambda _p: Phi, graph=graph, label=label)


def _is_graph(Phi: AnalyticMap) -> bool:
    h = Phi.nvars
    if Phi.ncomp < h:
        return False
    for i in range(h):
        S = Phi.components[i]
        k = tuple(1 if j == i else 0 for j in range(h))
        if set(S.terms) != {k} or not _is_one(S.terms[k]):
            return False
    return True


def _is_one(c):
    if isinstance(c, LocalFieldElem):
        return False
    return is_zero(c - 1) if not isinstance(c, RationalFn) else c.is_one()


def zero_locus_set(K, F: AnalyticMap, label="", chart=None) -> AnalyticSetSpec:
    return AnalyticSetSpec("zero_locus", K, F.nvars, F=F, chart=chart, label=label)


# ---------------------------------------------------------------- membership


def _embed_point(K, z, prec):
    return tuple(x if isinstance(x, LocalFieldElem) else K.embed(x, prec) for x in z)


def _diff_vals(Phi, x, z):
    vals = Phi(x)
    return [vbound(a - b) for a, b in zip(vals, z)]


def membership(W: AnalyticSetSpec, z, precision: int, max_depth: int = MAX_DEPTH) -> bool:
    K = W.K
    if len(z) != W.ambient_dim:
        raise ValidationError(f"point of length {len(z)} in a {W.ambient_dim}-dimensional set")
    if W.form == "zero_locus":
        vals = W.F(_embed_point(K, z, precision + 8)) if not _all_exact(W.F, z) else W.F(tuple(z))
        return all((vbound(v) >= precision) if isinstance(v, LocalFieldElem) else is_zero(v) for v in vals)
    Phi = W.image_map(precision)
    work = precision + 8
    zl = _embed_point(K, z, work)
    h = W.source_dim
    if W.graph:
        x = zl[:h]
        if any(vbound(c) < 0 for c in x):
            return False
        return min(_diff_vals(Phi, x, zl)) >= precision
    return _subdivide(Phi, zl, K, precision, work, max_depth)


def _all_exact(F, z):
    if any(isinstance(x, LocalFieldElem) for x in z):
        return False
    return all(not isinstance(c, LocalFieldElem) for S in F.components for c in S.terms.values())


def _nonconst_cmin(Phi, K):
    out = []
    for S in Phi.components:
        vals = [_cval(c, K) for k, c in S.terms.items() if any(k)]
        out.append(min(vals, default=math.inf))
    return out


def _digit_elem(K, d, prec):
    if d == 0:
        return None
    if isinstance(K, LaurentField):
        return K.from_digits(0, [d], prec)
    return K.embed(d, prec)


def _subdivide(Phi, z, K, precision, work, max_depth):
    """Is there x in B_1^h with v(Phi(x) - z) >= precision?  Cells are
    c + u^k B_1^h; a cell is dropped when some component differs from z at
    the centre by less than the variation bound cmin + k."""
    h = Phi.nvars
    cmin = _nonconst_cmin(Phi, K)
    reps = [_digit_elem(K, d, work) for d in K.residue_reps()]
    u = K.uniformizer(work)
    cells = [(tuple(K.zero(work) for _ in range(h)), 0)]
    while cells:
        c, k = cells.pop()
        dv = _diff_vals(Phi, c, z)
        if min(dv) >= precision:
            return True
        if any(d < min(precision, cm + k) for d, cm in zip(dv, cmin)):
            continue
        if k >= max_depth:
            raise BudgetExceeded(f"membership undecided at subdivision depth {max_depth}")
        uk = u**k
        for r in product(reps, repeat=h):
            child = tuple(ci + uk * ri if ri is not None else ci for ci, ri in zip(c, r))
            cells.append((child, k + 1))
    return False


# ---------------------------------------------------------------- splitting


@dataclass(frozen=True)
class Piece:
    """Points whose coordinates in ``inverted`` have negative valuation (and
    the others not); mapped into B_1^m by z_i -> 1/z_i on those coordinates,
    which preserves height."""

    inverted: tuple

    @property
    def tag(self) -> str:
        if not self.inverted:
            return "id"
        return "inv(" + ",".join(str(i + 1) for i in self.inverted) + ")"

    def matches(self, z, K) -> bool:
        return all((local_valuation(x, K) < 0) == (i in self.inverted) for i, x in enumerate(z))

    def transform(self, z):
        return tuple(1 / x if i in self.inverted else x for i, x in enumerate(z))


def split_by_unit_polydisc(W: AnalyticSetSpec, t: int = 1):
    """Pieces partitioning W's rational points by valuation sign pattern.
    An image of B_1^h under an integral map stays in B_1^m: one piece."""
    if W.integral:
        return [Piece(())]
    m = W.ambient_dim
    pieces = []
    for r in range(m + 1):
        for inv in _subsets(m, r):
            pieces.append(Piece(inv))
    return pieces


def _subsets(m, r):
    from itertools import combinations

    return list(combinations(range(m), r))


# ---------------------------------------------------------------- counting


def _graph_points(W, t, precision, base):
    """Fast path for graphs x -> (x, f(x)): look f(x) up among rationals."""
    K = W.K
    Phi = W.image_map(precision)
    h = W.source_dim
    work = precision + 8
    lookup = {}
    for y in base:
        lookup.setdefault(_embed_point(K, (y,), work)[0].key(precision), []).append(y)
    src = [x for x in base if local_valuation(x, K) >= 0]
    out = []
    for x in product(src, repeat=h):
        xl = _embed_point(K, x, work)
        vals = Phi(xl)[h:]
        if any(v.prec < precision for v in vals):
            raise BudgetExceeded(f"graph values lost precision below {precision}")
        choices = [lookup.get(v.key(precision), []) for v in vals]
        for ys in product(*choices):
            z = tuple(x) + tuple(ys)
            if height(z) <= t:
                out.append(z)
    return out


def rational_points(W: AnalyticSetSpec, t: int, precision: int, piece: Piece | None = None):
    """Members of W(Q_K) of height <= t (optionally within one piece), canonical order."""
    K = W.K
    base = rationals_1d(K, t)
    if W.form == "image" and W.graph:
        pts = _graph_points(W, t, precision, base)
    else:
        pts = [z for z in enumerate_rationals(W.ambient_dim, t, K) if membership(W, z, precision)]
    if piece is not None:
        pts = [z for z in pts if piece.matches(z, K)]
    return sorted(set(pts), key=point_sort_key)


def transcendent_points(W, Walg: AlgebraicPartSpec, t: int, precision: int):
    if precision < 10:
        raise ValidationError("precision must be >= 10")
    out = []
    for piece in split_by_unit_polydisc(W, t):
        out.extend(z for z in rational_points(W, t, precision, piece) if not Walg.contains(z))
    return sorted(out, key=point_sort_key)


def count_transcendent(W, Walg: AlgebraicPartSpec, t: int, precision: int) -> int:
    return len(transcendent_points(W, Walg, t, precision))


# ---------------------------------------------------------------- hypersurface covers


def monomials(d: int, delta: int):
    """Exponent vectors of total degree <= delta, graded lex (x1 > x2 > ...)."""
    if d < 1 or delta < 0:
        raise ValidationError("need d >= 1 and delta >= 0")
    out = []
    for deg in range(delta + 1):
        block = []
        for combo in combinations_with_replacement(range(d), deg):
            k = [0] * d
            for i in combo:
                k[i] += 1
            block.append(tuple(k))
        out.extend(sorted(block, reverse=True))
    return out


def nu(d: int, delta: int) -> int:
    return comb(d + delta, d) - 1


@dataclass(frozen=True)
class Hypersurface:
    degree: int
    monomials: tuple
    coeffs: tuple

    def __call__(self, z):
        acc = None
        for k, c in zip(self.monomials, self.coeffs):
            if is_zero(c):
                continue
            t = c
            for x, e in zip(z, k):
                if e:
                    t = t * x**e
            acc = t if acc is None else acc + t
        return acc if acc is not None else zero_like(self.coeffs[0])

    def contains(self, z) -> bool:
        return is_zero(self(z))

    @property
    def actual_degree(self) -> int:
        return max(sum(k) for k, c in zip(self.monomials, self.coeffs) if not is_zero(c))

    def render(self, names=None) -> str:
        names = names or [f"z{i + 1}" for i in range(len(self.monomials[0]))]
        parts = []
        for k, c in zip(self.monomials, self.coeffs):
            if is_zero(c):
                continue
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, k) if e)
            cs = str(c)
            if any(ch in cs for ch in " +-/"):
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


def _row(z, monos, one):
    row = []
    for k in monos:
        t = one
        for x, e in zip(z, k):
            if e:
                t = t * x**e
        row.append(t)
    return row


def _normalize(v):
    lead = next(c for c in v if not is_zero(c))
    inv = lead.inverse() if isinstance(lead, RationalFn) else 1 / lead
    return tuple(c * inv for c in v)


def _probe_points(W, t, precision, count):
    """Exact images of parameters just above the height bound; used only to
    break ties between kernel vectors."""
    if W.form != "image":
        return []
    Phi = W.image_map(precision)
    if any(S.trunc is not None or any(isinstance(c, LocalFieldElem) for c in S.terms.values()) for S in Phi.components):
        return []
    K = W.K
    t2 = t * K.residue_size if isinstance(K, LaurentField) else 2 * t + 1
    xs = [x for x in rationals_1d(K, t2) if local_valuation(x, K) >= 0 and height((x,)) > t]
    out = []
    for x in product(xs, repeat=W.source_dim):
        out.append(tuple(evaluate(S, x) for S in Phi.components))
        if len(out) >= count:
            break
    return out


def cover_by_hypersurfaces(W: AnalyticSetSpec, t: int, delta: int, precision: int, points=None):
    """Greedy cover of S(Q_K, t) by degree-<=delta hypersurfaces."""
    if W.form != "image":
        raise ValidationError("covers are built for sets in image form")
    d = W.ambient_dim
    monos = monomials(d, delta)
    batch_size = nu(d, delta)
    if points is None:
        points = transcendent_points(W, AlgebraicPartSpec(), t, precision)
    if not points:
        return []
    one = _one_of(points[0])
    probes = [_row(z, monos, one) for z in _probe_points(W, t, precision, 2 * batch_size)]
    uncovered = list(points)
    cover = []
    while uncovered:
        batch = uncovered[:batch_size]
        rows = [_row(z, monos, one) for z in batch]
        kernel = nullspace(rows + probes) if probes else []
        if not kernel:
            kernel = nullspace(rows)
        if not kernel:
            raise KernelEmpty("no hypersurface through the batch")
        best, best_cov = None, -1
        for v in kernel:
            H = Hypersurface(delta, tuple(monos), _normalize(v))
            cov = sum(1 for z in uncovered if H.contains(z))
            if cov > best_cov:
                best, best_cov = H, cov
        cover.append(best)
        uncovered = [z for z in uncovered if not best.contains(z)]
    return cover


def _one_of(z):
    x = z[0]
    if isinstance(x, RationalFn):
        return x.one()
    return Fraction(1)


# ---------------------------------------------------------------- reports


CSV_HEADER = ("t", "count", "cover_size", "precision", "elapsed_ms")


@dataclass
class CountReport:
    rows: list = field(default_factory=list)  # (t, count, cover_size, precision, elapsed_ms)

    def add(self, t, count, cover_size, precision, elapsed_ms=None):
        self.rows.append((t, count, cover_size, precision, elapsed_ms))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, n, c, p, ms in self.rows:
            w.writerow([t, n, "" if c is None else c, p, "" if ms is None else f"{ms:.1f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountReport":
        rd = csv.reader(io.StringIO(text))
        header = tuple(next(rd))
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {header}")
        rep = cls()
        for r in rd:
            if not r:
                continue
            t, n, c, p, ms = r
            rep.add(int(t), int(n), int(c) if c else None, int(p), float(ms) if ms else None)
        return rep


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float


def slope_estimate(report: CountReport, column: int = 1) -> SlopeFit:
    """Least-squares slope of log N against log t (column 1: counts, 2: cover sizes)."""
    pts = [(r[0], r[column]) for r in report.rows if r[column] is not None and r[column] >= 1]
    if len(pts) < 3:
        raise InsufficientData("need at least three rows with N >= 1")
    xs = [math.log(t) for t, _ in pts]
    ys = [math.log(n) for _, n in pts]
    if len(set(xs)) < 2:
        raise InsufficientData("need at least two distinct t values")
    slope, intercept = statistics.linear_regression(xs, ys)
    res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return SlopeFit(slope, intercept, res)
