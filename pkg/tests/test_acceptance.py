"""Acceptance criteria 1-11, one test each.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``pytest_terminal_summary`` in conftest.py) and
also when this file is run directly.
"""

import math
import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from itertools import product
from pathlib import Path

import pytest

from conftest import rand_laurent, rand_padic
from tmodcount.counting import (
    AlgebraicPartSpec,
    count_transcendent,
    cover_by_hypersurfaces,
    enumerate_rationals,
    image_set,
    rational_points,
)
from tmodcount.errors import BudgetError
from tmodcount.expmap import (
    LatticeQuotientSpec,
    exp_coeffs,
    exp_eval,
    lattice_quotient_count,
    verify_functional_equation,
)
from tmodcount.finitefield import gf
from tmodcount.graphs import exp_graph
from tmodcount.hensel import AnalyticMap, implicit_solve, newton_solve
from tmodcount.localfield import frobenius, laurent, padic
from tmodcount.polys import FqPoly, RationalFn, polys_up_to
from tmodcount.series import parse_series, scalar_ring
from tmodcount.tmodule import (
    anderson_coleman_example,
    carlitz,
    j_invariant,
    nilpotent_example,
    torsion_count,
    torsion_points,
)

ROOT = Path(__file__).resolve().parents[1]
RESULTS = {}
MARGIN = 5


@contextmanager
def criterion(n, title, limit=None):
    """Record PASS/FAIL for criterion n, including its time limit."""
    t0 = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - t0
        if limit is not None and elapsed >= limit:
            note = f"{elapsed:.1f} s, limit {limit} s"
            raise AssertionError(f"criterion {n} took {note}")
        status, note = "PASS", f"{elapsed:.1f} s"
    except BaseException as exc:
        note = note or f"{type(exc).__name__}: {exc}"[:120]
        raise
    finally:
        RESULTS[n] = f"[{status}] criterion {n:2d}: {title} ({note})"


def Tpoly(q):
    return FqPoly.T(gf(q))


# 1 ---------------------------------------------------------------------------

def _laws(K, rand, rng, frob):
    for _ in range(1000):
        x, y = rand(rng, K), rand(rng, K)
        vx, vy = x.valuation(), y.valuation()
        s = x + y
        assert s.val_bound() >= min(vx, vy)
        if vx != vy:
            assert s.valuation() == min(vx, vy)
        assert (x * y).valuation() == vx + vy
        inv = x.inverse()
        assert (x * inv - 1).val_bound() >= min(x.rel_prec, inv.rel_prec)
        if frob:
            q = K.q
            fx, fy = frobenius(x, 1), frobenius(y, 1)
            assert (fx + fy).agrees(frobenius(s, 1), q * s.prec)
            p = x * y
            assert (fx * fy).agrees(frobenius(p, 1), min((fx * fy).prec, q * p.prec))


def test_c01_field_laws():
    rng = random.Random(1)
    with criterion(1, "field laws, 1000 checks per flavor", limit=5):
        _laws(laurent(2), rand_laurent, rng, True)
        _laws(laurent(3), rand_laurent, rng, True)
        _laws(padic(5), rand_padic, rng, False)


# 2 ---------------------------------------------------------------------------

def _fe_min(M, N, rng, count=20, prec=40):
    K = laurent(M.q)
    E = exp_coeffs(M, N)
    t = Tpoly(M.q)
    worst = math.inf
    done = 0
    while done < count:
        z = tuple(rand_laurent(rng, K, prec=prec, vrange=(1, 8)) for _ in range(M.m))
        try:
            exp_eval(E, z if M.m > 1 else z[0], prec)
        except BudgetError:
            continue  # not a convergent point at this truncation
        for a in (t, t + 1, t * t):
            worst = min(worst, verify_functional_equation(M, E, a, z, prec))
        done += 1
    return worst


def test_c02_functional_equation():
    rng = random.Random(2)
    with criterion(2, "exp functional equation, residual >= 35", limit=30):
        for q in (2, 3):
            assert _fe_min(carlitz(q), 6, rng) >= 35
        assert _fe_min(anderson_coleman_example(2, 40), 4, rng) >= 35


# 3 ---------------------------------------------------------------------------

def test_c03_exp_coefficients():
    with criterion(3, "e1, e2 exact for q = 2, 3"):
        for q in (2, 3):
            T = RationalFn.T(gf(q))
            E = exp_coeffs(carlitz(q), 2)
            # hand recursion: e_n (T^{q^n} - T) = e_{n-1}^q
            assert E[1][0][0] == 1 / (T**q - T)
            assert E[2][0][0] == 1 / ((T ** (q * q) - T) * (T**q - T) ** q)


# 4 ---------------------------------------------------------------------------

def test_c04_torsion():
    with criterion(4, "carlitz(3) torsion 3/9/9 and A[T] points", limit=60):
        M = carlitz(3)
        t = Tpoly(3)
        for a, n in ((t, 3), (t * t, 9), (t * t + 1, 9)):
            assert torsion_count(M, a) == n
            assert lattice_quotient_count(LatticeQuotientSpec(1), a) == n
        pts = torsion_points(M, t, precision=30, ext_budget=(2, 2), strict=True)
        assert len(pts) == 3
        assert all(p.residual >= 30 - MARGIN for p in pts)


# 5 ---------------------------------------------------------------------------

def test_c05_j_invariant():
    with criterion(5, "j-invariants 1 / 2 / 1"):
        assert j_invariant(carlitz(2)) == 1
        assert j_invariant(carlitz(3)) == 1
        assert j_invariant(nilpotent_example(2)) == 2
        assert j_invariant(anderson_coleman_example(2, 30)) == 1


# 6 ---------------------------------------------------------------------------

def test_c06_remark_chain():
    with criterion(6, "|A[a]| <= |A[a(T^j)]| on the nilpotent module"):
        M = nilpotent_example(2)
        j = j_invariant(M)
        for a in polys_up_to(gf(2), 2):
            if a.is_zero():
                continue
            assert torsion_count(M, a) <= torsion_count(M, a.substitute_power(j))


# 7 ---------------------------------------------------------------------------

def test_c07_hensel():
    with criterion(7, "Hensel digits, Artin-Schreier series, quadratic steps", limit=5):
        Q5 = padic(5)
        F = AnalyticMap([parse_series("x^2 + 1", ("x",), scalar_ring(Q5))])
        res = newton_solve(F, (2,), Q5, 5)
        digits = res.point[0].digits[:5]
        x = sum(d * 5**i for i, d in enumerate(digits))
        assert (x * x + 1) % 5**5 == 0 and x % 5 == 2
        assert digits == [2, 1, 2, 1, 3]
        steps = list(res.steps)

        K = laurent(2)
        G = AnalyticMap([parse_series("y^2 - y - x", ("x", "y"), scalar_ring(K))], (1, 1))
        ch = implicit_solve(G, (0, 0), K, 40)
        (w,) = ch.series(2**5)
        expect = {(2**i,): 1 for i in range(6)}  # -sum x^(q^i); signs vanish in char 2
        assert {k: c for k, c in w.terms.items()} == expect
        rng = random.Random(7)
        for _ in range(10):
            z = rand_laurent(rng, K, prec=40, vrange=(1, 4))
            fiber = G.partial({0: z})
            steps += newton_solve(fiber, (0,), K, 40).steps
        assert steps and all(s.quadratic_ok for s in steps)


# 8 ---------------------------------------------------------------------------

def test_c08_enumeration():
    with criterion(8, "enumeration matches brute force", limit=10):
        F = gf(2)
        for t, s in ((1, 0), (2, 1), (4, 2), (8, 3)):
            brute = set()
            for b in polys_up_to(F, s):
                if not b.is_zero():
                    brute.update(RationalFn(a, b) for a in polys_up_to(F, s))
            got = [z[0] for z in enumerate_rationals(1, t, laurent(2))]
            assert len(got) == len(brute) and set(got) == brute
            if t == 2:
                assert len(got) == 8


# 9 ---------------------------------------------------------------------------

def test_c09_carlitz_graph_count():
    with criterion(9, "Carlitz exp graph N = 1, stable at precision 60", limit=120):
        W = exp_graph(carlitz(2))
        none = AlgebraicPartSpec()
        for t in (2, 4, 8, 16):
            assert count_transcendent(W, none, t, 30) == 1
            assert count_transcendent(W, none, t, 60) == 1


# 10 --------------------------------------------------------------------------

def test_c10_parabola_cover():
    with criterion(10, "parabola cover: 1 at delta 2, sound at delta 1, monotone", limit=60):
        K = laurent(2)
        ring = scalar_ring(K)
        W = image_set(K, AnalyticMap([parse_series(s, ("x1",), ring) for s in ("x1", "x1^2")]))
        T = RationalFn.T(gf(2))
        for t in (2, 4, 8, 16):
            pts = rational_points(W, t, 30)
            sizes = []
            for delta in (1, 2, 3):
                cover = cover_by_hypersurfaces(W, t, delta, 30, points=pts)
                assert all(H.actual_degree <= delta for H in cover)
                assert all(any(H.contains(z) for H in cover) for z in pts)
                sizes.append(len(cover))
            assert sizes == sorted(sizes, reverse=True)
            (H,) = cover_by_hypersurfaces(W, t, 2, 30, points=pts)
            # proportional to y - x^2: vanishes on the whole curve, two terms
            assert all(H.contains((x, x * x)) for x in (T, T + 1, 1 / (T * T + T + 1)))
            assert sum(1 for c in H.coeffs if c != 0) == 2


# 11 --------------------------------------------------------------------------

RUNS = [
    ["count", "--flavor", "fq", "--q", "2", "--set", "data/carlitz-exp-graph.set", "--t", "2,4,8,16",
     "--precision", "30"],
    ["count", "--flavor", "fq", "--q", "2", "--set", "data/parabola.set", "--t", "1,2,4,8,16", "--delta", "2"],
    ["cover", "--flavor", "fq", "--q", "2", "--set", "data/parabola.set", "--t", "2,4,8", "--delta", "1"],
    ["enumerate", "--flavor", "fq", "--q", "3", "--t", "1,3,9"],
    ["exp-check", "--module", "carlitz", "--q", "2", "--a", "T;T+1", "--z", "u;u^3"],
    ["torsion", "--module", "data/carlitz.tmod", "--q", "3", "--a", "T"],
]


def _run_all(tmp, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    outs = []
    for k, argv in enumerate(RUNS):
        path = tmp / f"run{seed}_{k}.csv"
        cmd = [sys.executable, "-m", "tmodcount.cli", *argv, "--out", str(path)]
        subprocess.run(cmd, cwd=ROOT, env=env, check=True, capture_output=True)
        outs.append(path.read_bytes())
    return outs


def test_c11_determinism(tmp_path):
    with criterion(11, "byte-identical outputs across runs"):
        first = _run_all(tmp_path, 1)
        second = _run_all(tmp_path, 2)
        assert all(first) and first == second


if __name__ == "__main__":
    rc = pytest.main([__file__, "-q"])
    sys.exit(rc)
