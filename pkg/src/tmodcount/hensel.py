"""Newton iteration and implicit functions over non-archimedean fields.

The same driver serves F_q((u)) and Q_p: all that is used is that the
absolute value is ultrametric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .errors import (
    EvaluationDivergence,
    HenselConditionFailed,
    HypothesisFailed,
    LiftDivergence,
    SingularBlock,
    SingularJacobian,
    TruncationInsufficient,
)
from .linalg import det, identity, inverse, is_zero, one_like, solve, zero_like
from .localfield import LocalFieldElem
from .polys import RationalFn
from .series import Series, evaluate

MARGIN = 5
INF = math.inf


class AnalyticMap:
    """A tuple of series in ``nvars`` variables, optionally split as (n, m)."""

    def __init__(self, components, split: tuple[int, int] | None = None):
        comps = tuple(components)
        if not comps:
            raise ValueError("an analytic map needs at least one component")
        nv = comps[0].nvars
        if any(c.nvars != nv for c in comps):
            raise ValueError("components in different numbers of variables")
        if split is not None and sum(split) != nv:
            raise ValueError(f"split {split} does not add up to {nv} variables")
        self.components = comps
        self.split = split

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def ncomp(self) -> int:
        return len(self.components)

    @cached_property
    def partials(self):
        return tuple(tuple(c.derivative(j) for j in range(self.nvars)) for c in self.components)

    def __call__(self, point):
        _check_domain(self.components, point)
        return tuple(_local(evaluate(c, point), point) for c in self.components)

    def partial(self, assign: dict) -> "AnalyticMap":
        return AnalyticMap([c.partial(assign) for c in self.components])

    def __repr__(self):
        return f"AnalyticMap({list(self.components)!r}, split={self.split})"


def _local(v, point):
    """Promote an exact value to the local field of the point, if any."""
    if isinstance(v, LocalFieldElem):
        return v
    for x in point:
        if isinstance(x, LocalFieldElem):
            return x.K.embed(v, x.prec) if not is_zero(v) else x.K.zero(x.prec)
    return v


def vbound(x):
    """Valuation, or a lower bound for inexact zeros; +inf for exact zero."""
    if isinstance(x, LocalFieldElem):
        return x.val_bound()
    if is_zero(x):
        return INF
    if isinstance(x, RationalFn):
        return x.valuation_inf()
    raise TypeError(f"no valuation for {type(x).__name__}")


def coeff_valuation(c, K) -> int | float:
    if isinstance(c, LocalFieldElem):
        return c.val_bound()
    if is_zero(c):
        return INF
    if isinstance(c, RationalFn):
        return K.e * c.valuation_inf()
    fr = Fraction(c)
    p = K.p
    v, a, b = 0, fr.numerator, fr.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def tail_bound(S: Series, point) -> int | float:
    """Lower bound for the valuation of the discarded tail of S at a point:
    min coefficient valuation + (D + 1) * min v(x_i)."""
    if S.trunc is None:
        return INF
    K = next((x.K for x in point if isinstance(x, LocalFieldElem)), None)
    if K is None:
        return INF
    cmin = min((coeff_valuation(c, K) for c in S.terms.values()), default=INF)
    vmin = min(vbound(x) if isinstance(x, LocalFieldElem) else coeff_valuation(x, K) for x in point)
    if vmin <= 0:
        raise EvaluationDivergence(
            f"point with valuation {vmin} lies outside the open unit polydisc of a truncated series"
        )
    return cmin + (S.trunc + 1) * vmin


def _check_domain(series, point, target=None):
    for S in series:
        if S.trunc is None:
            continue
        b = tail_bound(S, point)
        if target is not None and b < target:
            raise TruncationInsufficient(
                f"tail of a degree-{S.trunc} truncation only bounded by valuation {b} < {target}"
            )


def jacobian(F: AnalyticMap, z0):
    """Matrix of formal partial derivatives evaluated at z0 (k x^(k-1), k mod p)."""
    _check_domain(F.components, z0)
    return tuple(tuple(_local(evaluate(d, z0), z0) for d in row) for row in F.partials)


@dataclass(frozen=True)
class NewtonStep:
    residual: float  # v(F(x_k))
    det_val: int  # v(det J(x_k))
    next_residual: float  # v(F(x_{k+1}))
    cap: float = INF  # working precision of F(x_{k+1})

    @property
    def quadratic_ok(self) -> bool:
        """v_{k+1} >= 2 v_k - 2 v(det J), short of the working precision."""
        return self.next_residual >= min(2 * self.residual - 2 * self.det_val, self.cap)


def _det_val(J) -> int:
    d = det(J)
    if is_zero(d):
        raise SingularJacobian("Jacobian is singular at working precision")
    return vbound(d)


def newton_refine(F: AnalyticMap, x, guard: bool = True):
    """One step x - J^{-1} F(x), guarded by v(F(x)) > 2 v(det J)."""
    if F.ncomp != F.nvars:
        raise ValueError("newton_refine needs a square system")
    Fx = F(x)
    J = jacobian(F, x)
    dv = _det_val(J)
    vF = min(vbound(c) for c in Fx)
    if guard and not vF > 2 * dv:
        raise HenselConditionFailed(vF, dv)
    if vF == INF:
        return tuple(x)
    delta = solve(J, Fx)
    return tuple(xi - di for xi, di in zip(x, delta))


@dataclass
class NewtonResult:
    point: tuple
    residual: float
    steps: list = field(default_factory=list)


def _pad(x: LocalFieldElem, prec: int) -> LocalFieldElem:
    if x.prec >= prec:
        return x
    if x.val is None:
        return x.K.zero(prec)
    return x.K.from_digits(x.val, x.digits, prec)


def _cap(values, default):
    return min((c.prec for c in values if isinstance(c, LocalFieldElem)), default=default)


def _as_local(K, xs, prec):
    return tuple(x if isinstance(x, LocalFieldElem) else K.embed(x, prec) for x in xs)


def newton_solve(F: AnalyticMap, x0, K, target: int, max_steps: int = 64) -> NewtonResult:
    """Iterate newton_refine until v(F(x)) >= target.

    Exact starting values are embedded with enough guard digits to absorb
    the loss from inverting the Jacobian.
    """
    probe = _as_local(K, x0, target + 4)
    dv = _det_val(jacobian(F, probe))
    low = min((vbound(x) for x in probe if not is_zero(x)), default=0)
    work = target + 2 * abs(dv) + 4 + max(0, -low)
    # a starting guess carries no precision information: pad it
    x = tuple(_pad(xi, work) for xi in probe)
    Fx = F(x)
    # widen the working precision by what one evaluation of F loses
    loss = work - _cap(Fx, work)
    if loss > 0:
        work += loss
        x = tuple(_pad(xi, work) for xi in x)
        Fx = F(x)
    v = min(vbound(c) for c in Fx)
    steps = []
    for _ in range(max_steps):
        if v >= target:
            return NewtonResult(x, v, steps)
        J = jacobian(F, x)
        dv = _det_val(J)
        if not v > 2 * dv:
            raise HenselConditionFailed(v, dv)
        delta = solve(J, Fx)
        # Newton corrects its own errors, so the iterate may be re-padded
        x = tuple(_pad(xi - di, work) for xi, di in zip(x, delta))
        Fx = F(x)
        v_new = min(vbound(c) for c in Fx)
        steps.append(NewtonStep(v, dv, v_new, _cap(Fx, INF)))
        if v_new <= v:
            cap = _cap(Fx, work)
            raise LiftDivergence(
                f"Newton stalled at residual valuation {v_new} (working precision {cap}, target {target})"
            )
        v = v_new
    raise LiftDivergence(f"no convergence to {target} digits in {max_steps} steps")


# ---------------------------------------------------------------- implicit functions


def _series_inverse_matrix(A, D):
    """Inverse of a square matrix of series with invertible constant term, mod degree D+1."""
    m = len(A)
    nv = A[0][0].nvars
    A0 = tuple(tuple(a.coeff((0,) * nv) or zero_like(_any(A)) for a in r) for r in A)
    try:
        A0inv = inverse(A0)
    except ZeroDivisionError as exc:
        raise SingularBlock("constant term of the Jacobian block is singular") from exc
    X = [[Series.constant(nv, A0inv[i][j], D) for j in range(m)] for i in range(m)]
    one = one_like(_any(A))
    two_I = [[Series.constant(nv, one * 2 if i == j else zero_like(one), D) for j in range(m)] for i in range(m)]
    for _ in range(max(1, math.ceil(math.log2(D + 1))) + 1):
        AX = _smat_mul(A, X)
        X = _smat_mul(X, [[two_I[i][j] - AX[i][j] for j in range(m)] for i in range(m)])
    return X


def _any(A):
    for r in A:
        for a in r:
            s = a.sample()
            if s is not None:
                return s
    return Fraction(1)


def _smat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


@dataclass
class SolutionChart:
    """Local graph y = f(z) of the zero set of F near ``center``."""

    F: AnalyticMap
    K: object
    center: tuple  # full point (free and dependent coordinates)
    free: tuple  # indices of the free coordinates
    dep: tuple  # indices of the solved-for coordinates
    radius: int
    det_val: int
    target: int

    @property
    def z0(self):
        return tuple(self.center[i] for i in self.free)

    @property
    def y0(self):
        return tuple(self.center[i] for i in self.dep)

    def contains(self, zs) -> bool:
        for z, c in zip(zs, self.z0):
            d = z - c if isinstance(z, LocalFieldElem) else self.K.embed(z, self.target) - c
            if vbound(d) < self.radius:
                return False
        return True

    def evaluate(self, zs):
        """f(z*) by Newton iteration in the fiber over z*."""
        if len(zs) != len(self.free):
            raise ValueError(f"expected {len(self.free)} free coordinates")
        if not self.contains(zs):
            raise HypothesisFailed(f"point lies outside the chart radius {self.radius}")
        zs = _as_local(self.K, zs, self.target + self.radius + MARGIN)
        G = self.F.partial(dict(zip(self.free, zs)))
        res = newton_solve(G, self.y0, self.K, self.target)
        return res.point

    def full_point(self, zs, ys):
        pt = [None] * (len(self.free) + len(self.dep))
        for i, z in zip(self.free, zs):
            pt[i] = z
        for i, y in zip(self.dep, ys):
            pt[i] = y
        return tuple(pt)

    def residual(self, zs) -> float:
        ys = self.evaluate(zs)
        zs = _as_local(self.K, zs, self.target + self.radius + MARGIN)
        return min(vbound(c) for c in self.F(self.full_point(zs, ys)))

    def series(self, D: int):
        """Taylor expansion of f in s = z - z0, to total degree D."""
        return implicit_series(self.F, self.free, self.dep, self.center, D)


def implicit_series(F: AnalyticMap, free, dep, center, D: int):
    """Formal Newton iteration in the power-series ring: returns f(z0 + s) - y0
    as m series in len(free) variables, correct to degree D."""
    n, m = len(free), len(dep)
    sample = next((c.sample() for c in F.components if c.sample() is not None), Fraction(1))
    one = one_like(sample)
    s_vars = [Series.variable(n, i, one, D) for i in range(n)]
    w = [Series(n, {}, D) for _ in range(m)]
    Jcols = [[F.partials[i][j] for j in dep] for i in range(F.ncomp)]
    for _ in range(2 * max(1, math.ceil(math.log2(D + 1))) + 4):
        subs = [None] * F.nvars
        for k, i in enumerate(free):
            subs[i] = s_vars[k] + center[i]
        for k, i in enumerate(dep):
            subs[i] = w[k] + center[i]
        G = [c.compose(subs, D) for c in F.components]
        if all(g.is_zero() for g in G):
            break
        J = [[d.compose(subs, D) for d in row] for row in Jcols]
        Jinv = _series_inverse_matrix(J, D)
        corr = _smat_mul(Jinv, [[g] for g in G])
        w = [(w[k] - corr[k][0]).truncate(D) for k in range(m)]
    return w


def implicit_solve(F: AnalyticMap, z0, K, target: int) -> SolutionChart:
    """Chart of the zero set of F through z0 (Newton in the fibers).

    The default split solves for the last m coordinates; if that block of
    the Jacobian is singular, every other choice of m columns is tried.
    """
    nv, m = F.nvars, F.ncomp
    if F.split is not None and F.split[1] != m:
        raise ValueError(f"split {F.split} does not match {m} equations")
    if m > nv:
        raise ValueError("more equations than variables")
    pt = _as_local(K, z0, target + MARGIN)
    vF = min(vbound(c) for c in F(pt))
    if vF < target - MARGIN:
        raise HypothesisFailed(f"F(z0) has valuation {vF}; z0 is not a zero to precision {target}")
    J = jacobian(F, pt)
    default = tuple(range(nv - m, nv))
    orders = [default] + [c for c in combinations(range(nv), m) if c != default]
    for dep in orders:
        block = tuple(tuple(J[i][j] for j in dep) for i in range(m))
        d = det(block)
        if is_zero(d):
            continue
        dv = vbound(d)
        free = tuple(i for i in range(nv) if i not in dep)
        return SolutionChart(F, K, tuple(z0), free, dep, 2 * dv + 1, dv, target)
    raise SingularBlock("no choice of columns gives an invertible Jacobian block")
