from fractions import Fraction

import pytest

from tmodcount.finitefield import gf
from tmodcount.localfield import laurent, padic
from tmodcount.polys import RationalFn
from tmodcount.roots import local_roots, newton_slopes


def test_newton_slopes(Q5):
    # 25 + 5x^2 + x^3: (2, 1) lies above the segment from (0, 2) to (3, 0)
    cs = [Q5.embed(Fraction(c), 20) for c in (25, 0, 5, 1)]
    assert [s for s, _, _ in newton_slopes(cs)] == [Fraction(2, 3)]
    # 25 + 5x + 5x^3: one root of valuation 1, two units
    cs = [Q5.embed(Fraction(c), 20) for c in (25, 5, 0, 5)]
    assert [(s, i, j) for s, i, j in newton_slopes(cs)] == [(1, 0, 1), (0, 1, 3)]


def test_roots_of_unity_q5(Q5):
    # x^4 - 1 splits over Q_5; x^5 - 1 has only the root 1
    assert len(local_roots([-1, 0, 0, 0, 1], Q5, 12)) == 4
    rs = local_roots([-1, 0, 0, 0, 0, 1], Q5, 12)
    assert len(rs) == 1 and rs[0].agrees(Q5.embed(1, 12), 12)


def test_roots_multiply_back(Q5):
    # (x - 1/5)(x - 3)(x - 26) expanded
    roots = [Fraction(1, 5), Fraction(3), Fraction(26)]
    cs = [Fraction(1)]
    for r in roots:
        cs = [Fraction(0)] + cs
        for i in range(len(cs) - 1):
            cs[i] -= r * cs[i + 1]
    found = local_roots(cs, Q5, 15)
    assert len(found) == 3
    for r in roots:
        assert any(f.agrees(Q5.embed(r, 15), 14) for f in found)


def test_zero_root(F2):
    T = RationalFn.T(gf(2))
    rs = local_roots([0, T, 1], F2, 10)
    keys = sorted((r.val if r.val is not None else 99) for r in rs)
    assert keys == [-1, 99]


def test_anderson_coleman_relation():
    K = laurent(2)
    T = RationalFn.T(gf(2))
    rs = local_roots([1, -T, 1], K, 20)
    assert sorted(r.valuation() for r in rs) == [-1, 1]
    for r in rs:
        assert (r * r - T * r + 1).val_bound() >= 18


def test_no_roots_without_extension():
    # x^2 + T over F_3((u)) needs u^2 = 1/T
    K = laurent(3)
    T = RationalFn.T(gf(3))
    assert local_roots([T, 0, 1], K, 10) == []
    assert len(local_roots([T, 0, 1], laurent(3, 2, 2), 10)) == 2
