import math

import pytest

from conftest import rand_laurent, rand_poly
from tmodcount.errors import ConstantPolynomial, ExpDivergence, HypothesisFailed, TruncationInsufficient
from tmodcount.finitefield import gf
from tmodcount.linalg import identity
from tmodcount.localfield import embed, laurent
from tmodcount.polys import FqPoly, RationalFn
from tmodcount.expmap import (
    LatticeQuotientSpec,
    check_prop22_bijection,
    exp_coeffs,
    exp_eval,
    height_box_count,
    lattice_quotient_count,
    log_coeffs,
    log_eval,
    torsion_chain,
    verify_functional_equation,
)
from tmodcount.tmodule import anderson_coleman_example, carlitz, nilpotent_example, torsion_count


def Tpoly(q):
    return FqPoly.T(gf(q))


@pytest.mark.parametrize("q", [2, 3])
def test_carlitz_coefficients(q):
    T = RationalFn.T(gf(q))
    E = exp_coeffs(carlitz(q), 3)
    assert E[0] == identity(1, T.one(), T.zero())
    assert E[1][0][0] == 1 / (T**q - T)
    assert E[2][0][0] == 1 / ((T ** (q * q) - T) * (T**q - T) ** q)
    # e_n (T^{q^n} - T) = e_{n-1}^q
    for n in range(1, 4):
        assert E[n][0][0] * (T ** (q**n) - T) == E[n - 1][0][0] ** q


@pytest.mark.parametrize("M", [carlitz(2), nilpotent_example(2), anderson_coleman_example(2, 20)],
                         ids=["carlitz", "nilpotent", "ac"])
def test_recursion_is_stable_under_extension(M):
    E4, E6 = exp_coeffs(M, 4), exp_coeffs(M, 6)
    for n in range(5):
        assert E4[n] == E6[n]


def test_log_coefficients():
    for q in (2, 3):
        T = RationalFn.T(gf(q))
        L = log_coeffs(exp_coeffs(carlitz(q), 3))
        assert L[0][0][0] == T.one()
        assert L[1][0][0] == -1 / (T**q - T)


def test_exp_of_zero():
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 6)
    assert exp_eval(E, K.zero(20), 20).is_zero()


def test_carlitz_isometry(rng):
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 6)
    for _ in range(50):
        z = rand_laurent(rng, K, prec=40, vrange=(1, 5))
        assert exp_eval(E, z, 40).valuation() == z.valuation()


def test_exp_diverges_at_large_point():
    # term valuations -3, -4, -4, 0: not yet decaying at N = 3
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 3)
    with pytest.raises(ExpDivergence):
        exp_eval(E, embed(RationalFn.T(gf(2)) ** 3, K, 30), 30)


def test_truncation_insufficient():
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 3)
    with pytest.raises(TruncationInsufficient):
        exp_eval(E, K.uniformizer(200), 200)


def test_log_exp_round_trip(rng):
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 6)
    L = log_coeffs(E)
    for _ in range(20):
        w = rand_laurent(rng, K, prec=40, vrange=(1, 4))
        back = exp_eval(E, log_eval(L, w, 40), 40)
        assert back.agrees(w, 38)
        back = log_eval(L, exp_eval(E, w, 40), 40)
        assert back.agrees(w, 38)


def test_functional_equation_carlitz():
    K = laurent(2)
    E = exp_coeffs(carlitz(2), 6)
    assert verify_functional_equation(carlitz(2), E, Tpoly(2), K.uniformizer(40), 40) >= 35
    assert verify_functional_equation(carlitz(2), E, FqPoly.const(gf(2), 1), K.uniformizer(40), 40) == math.inf


def test_functional_equation_anderson_coleman():
    M = anderson_coleman_example(2, 40)
    K = laurent(2)
    E = exp_coeffs(M, 4)
    u = K.uniformizer(40)
    z = (u**5, u**7)
    assert verify_functional_equation(M, E, Tpoly(2), z, 40) >= 35


def test_lattice_quotient_examples():
    t3, t2 = Tpoly(3), Tpoly(2)
    assert lattice_quotient_count(LatticeQuotientSpec(1), t3) == 3
    for q in (2, 3):
        t = Tpoly(q)
        assert lattice_quotient_count(LatticeQuotientSpec(1), t * t) == q * q
    assert lattice_quotient_count(LatticeQuotientSpec(2), t2) == 4
    with pytest.raises(ConstantPolynomial):
        lattice_quotient_count(LatticeQuotientSpec(1), FqPoly.const(gf(2), 1))


@pytest.mark.parametrize("q", [2, 3])
def test_lattice_quotient_closed_form(q, rng):
    for deg in (1, 2, 3):
        a = rand_poly(rng, q, deg)
        for d in (1, 2):
            assert lattice_quotient_count(LatticeQuotientSpec(d), a) == q ** (d * deg)


def test_height_box_count_brute_force():
    # reduced fractions alpha/beta, deg alpha < deg beta <= 2, beta monic, over F_2
    from tmodcount.polys import poly_gcd, polys_up_to

    F = gf(2)
    n = 0
    for beta in polys_up_to(F, 2, monic=True):
        for alpha in polys_up_to(F, max(beta.degree - 1, -1)) if beta.degree else [FqPoly(F)]:
            if alpha.is_zero() and beta.degree:
                continue
            if alpha.is_zero() or poly_gcd(alpha, beta).degree == 0:
                n += 1
    assert height_box_count(2, 1, 2) == n


def test_prop22_bijection():
    assert check_prop22_bijection(carlitz(3), Tpoly(3), 1)
    t = Tpoly(2)
    assert check_prop22_bijection(carlitz(2), t * t + t, 1)
    with pytest.raises(HypothesisFailed):
        check_prop22_bijection(nilpotent_example(2), t, 1)


def test_torsion_chain():
    M = nilpotent_example(2)
    t = Tpoly(2)
    for a in (t, t * t, t + 1, t * t + t):
        lo, hi = torsion_chain(M, a)
        assert lo == torsion_count(M, a) and lo <= hi
