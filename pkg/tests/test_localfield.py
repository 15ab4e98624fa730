from fractions import Fraction

import pytest

from conftest import rand_laurent, rand_padic
from tmodcount.errors import FlavorMismatch, InexactZero
from tmodcount.finitefield import gf
from tmodcount.localfield import (
    absolute_value,
    descend,
    embed,
    field_inv,
    frobenius,
    laurent,
    lift,
    padic,
    render,
    valuation,
)
from tmodcount.polys import FqPoly, RationalFn


def T_of(q):
    return RationalFn.T(gf(q))


# -- worked examples

def test_char2_cancellation(F2):
    x = F2.from_digits(0, [1, 1], 6)
    assert (x + x).is_zero()


def test_inverse_of_T_is_uniformizer(F2):
    x = field_inv(embed(T_of(2), F2, 8))
    assert x.valuation() == 1 and x.digits[0] == 1
    assert all(d == 0 for d in x.digits[1:])


def test_geometric_series(F2):
    x = F2.from_digits(0, [1, 1], 4)  # 1 - u = 1 + u in char 2
    y = field_inv(x)
    assert y.digits == [1, 1, 1, 1]
    assert (x * y - 1).val_bound() >= 4


def test_absolute_values():
    assert absolute_value(embed(T_of(2) ** 2 + 1, laurent(2), 5)) == (2, 2)
    u = laurent(3, e=2).uniformizer(6)
    assert absolute_value(u) == (3, Fraction(-1, 2))  # u^2 = 1/T
    assert absolute_value(u.inverse()) == (3, Fraction(1, 2))
    assert absolute_value(embed(50, padic(5), 10)) == (5, -2)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_polynomial_absolute_value_is_q_to_degree(q, rng):
    from conftest import rand_poly

    for d in range(5):
        a = rand_poly(rng, q, d)
        assert absolute_value(embed(RationalFn(a), laurent(q), 10)) == (q, d)


def test_embed_examples(F2):
    T = T_of(2)
    t = embed(T, F2, 5)
    assert t.valuation() == -1 and t.digits[0] == 1 and not any(t.digits[1:])
    x = embed(1 / (T + 1), F2, 5)
    assert x.valuation() == 1 and x.digits == [1, 1, 1, 1]
    assert ((T + 1) * x - 1).val_bound() >= 4
    y = embed(Fraction(1, 3), padic(5), 3)
    assert y.digits == [2, 3, 1]  # 3^-1 mod 125 = 42 = 2 + 3*5 + 1*25
    assert (3 * y - 1).val_bound() >= 3


def test_embed_is_a_ring_map(rng):
    from conftest import rand_rfn

    K = laurent(3)
    for _ in range(40):
        a, b = rand_rfn(rng, 3), rand_rfn(rng, 3)
        P = 12
        ea, eb = K.embed_rel(a, P), K.embed_rel(b, P)
        assert (ea + eb).agrees(K.embed(a + b, 40), min((ea + eb).prec, 40))
        prod = ea * eb
        assert prod.agrees(K.embed(a * b, 40), min(prod.prec, 40))


def test_frobenius_examples():
    K = laurent(2)
    u = K.uniformizer(6)
    fu = frobenius(u, 1)
    assert fu.val == 2 and fu.digits[0] == 1 and not any(fu.digits[1:])
    x = frobenius(K.from_digits(0, [1, 1], 6), 1)
    assert x.digits[:3] == [1, 0, 1]
    # F_3((u)) with residue field F_9: x -> x^3 maps c u^-1 to c^3 u^-3
    K9 = laurent(3, f=2)
    c = K9.residue.generator
    y = frobenius(K9.from_digits(-1, [c], 5), 1)
    assert y.val == -3 and y.digits[0] == K9.residue.pow(c, 3)


def test_frobenius_rejects_padic(Q5):
    with pytest.raises(FlavorMismatch):
        frobenius(Q5.uniformizer(4), 1)


def test_inexact_zero(F2):
    z = F2.zero(5)
    with pytest.raises(InexactZero):
        valuation(z)
    with pytest.raises(InexactZero):
        field_inv(z)


def test_render(F2):
    x = F2.from_digits(-1, [1, 0, 1], 2)
    assert render(x) == "u^-1*(1 + u^2) + O(u^2)"


def test_lift_and_descend():
    K1, K2 = laurent(3), laurent(3, e=2, f=2)
    x = embed(1 / (T_of(3) + 1), K1, 8)
    y = lift(x, K2)
    assert y.val == 2 * x.val
    back = descend(y, K1)
    assert back is not None and back.agrees(x, 8)
    assert descend(K2.uniformizer(6), K1) is None


# -- laws on random elements

FLAVORS = [("F2", lambda: laurent(2), rand_laurent), ("F3", lambda: laurent(3), rand_laurent),
           ("Q5", lambda: padic(5), rand_padic)]


@pytest.mark.parametrize("name,mk,rand", FLAVORS, ids=[f[0] for f in FLAVORS])
def test_ultrametric(name, mk, rand, rng):
    K = mk()
    for _ in range(200):
        x, y = rand(rng, K), rand(rng, K)
        s = x + y
        vx, vy = x.valuation(), y.valuation()
        assert s.val_bound() >= min(vx, vy)
        if vx != vy:
            assert s.valuation() == min(vx, vy)
        assert (x * y).valuation() == vx + vy


@pytest.mark.parametrize("name,mk,rand", FLAVORS, ids=[f[0] for f in FLAVORS])
def test_inverse_round_trip(name, mk, rand, rng):
    K = mk()
    for _ in range(200):
        x = rand(rng, K)
        y = x.inverse()
        assert y.valuation() == -x.valuation()
        r = x * y - 1
        assert r.val_bound() >= min(x.rel_prec, y.rel_prec)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_frobenius_endomorphism(q, rng):
    K = laurent(q)
    for _ in range(1000):
        x, y = rand_laurent(rng, K), rand_laurent(rng, K)
        P = min((x + y).prec, (x * y).prec)
        fx, fy = frobenius(x, 1), frobenius(y, 1)
        assert (fx + fy).agrees(frobenius(x + y, 1), q * P)
        assert (fx * fy).agrees(frobenius(x * y, 1), min((fx * fy).prec, q * (x * y).prec))


def test_frobenius_matches_power(rng):
    K = laurent(3)
    for _ in range(50):
        x = rand_laurent(rng, K)
        assert frobenius(x, 1).agrees(x**3, (x**3).prec)


def test_precision_doubling_agrees(rng):
    from conftest import rand_rfn

    K = laurent(2)
    for _ in range(30):
        a, b = rand_rfn(rng, 2), rand_rfn(rng, 2)
        if b.is_zero():
            continue
        lo = K.embed(a, 10) / K.embed(b, 10) + K.embed(a, 10) ** 2
        hi = K.embed(a, 20) / K.embed(b, 20) + K.embed(a, 20) ** 2
        assert hi.agrees(lo, lo.prec)
