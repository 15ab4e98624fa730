import itertools
from fractions import Fraction

import pytest

from conftest import rand_poly
from tmodcount.errors import DependentBasis, ExtensionBudgetExceeded, NotNilpotent, ValidationError
from tmodcount.finitefield import gf
from tmodcount.linalg import is_nilpotent, mat_sub, scalar_matrix
from tmodcount.localfield import embed, laurent, lift
from tmodcount.polys import FqPoly, RationalFn
from tmodcount.series import parse_series, scalar_ring
from tmodcount.tmodule import (
    SubvarietySpec,
    anderson_coleman_c,
    anderson_coleman_example,
    carlitz,
    direct_sum,
    dphi,
    j_invariant,
    lie_invariant,
    new_tmodule,
    nilpotent_example,
    phi,
    torsion_count,
    torsion_points,
    torsion_in_subvariety,
)
from tmodcount.twisted import TwistedPoly, tw_eval


def Tpoly(q):
    return FqPoly.T(gf(q))


def T_of(q):
    return RationalFn.T(gf(q))


# -- construction

def test_constructors():
    C = carlitz(3)
    assert C.m == 1 and is_nilpotent(C.N)
    M = nilpotent_example(2)
    assert M.m == 2
    T = T_of(2)
    one, z = T.one(), T.zero()
    bad = TwistedPoly(2, 2, [((T + 1, z), (z, T)), ((one, z), (z, one))])
    with pytest.raises(NotNilpotent):
        new_tmodule(2, 2, bad)


def test_anderson_coleman_c():
    c = anderson_coleman_c(2, 30)
    assert c.valuation() == 1
    T = T_of(2)
    assert (c * c - T * c + 1).val_bound() >= 30


def test_anderson_coleman_differential():
    M = anderson_coleman_example(2, 30)
    T = T_of(2)
    D = dphi(M, Tpoly(2))
    assert D == scalar_matrix(2, T, T.zero())


# -- Phi and dPhi

def test_phi_examples():
    T = T_of(2)
    tau = TwistedPoly.tau(2)
    t = Tpoly(2)
    assert phi(carlitz(2), t * t) == T**2 + (T**2 + T) * tau + tau**2
    assert phi(carlitz(2), FqPoly.const(gf(2), 1)) == TwistedPoly.identity(2)
    assert phi(carlitz(3), t + 1) == (T_of(3) + 1) + TwistedPoly.tau(3)


@pytest.mark.parametrize("M", [carlitz(2), carlitz(3), nilpotent_example(2), nilpotent_example(3)],
                         ids=["c2", "c3", "n2", "n3"])
def test_phi_homomorphism(M, rng):
    for _ in range(15):
        a = rand_poly(rng, M.q, rng.randint(0, 3))
        b = rand_poly(rng, M.q, rng.randint(0, 3))
        assert phi(M, a * b) == phi(M, a) * phi(M, b)
        assert phi(M, a + b) == phi(M, a) + phi(M, b)
        D = dphi(M, a)
        a_rf = RationalFn(a)
        assert is_nilpotent(mat_sub(D, scalar_matrix(M.m, a_rf, a_rf.zero())))


def test_dphi_examples():
    t = Tpoly(2)
    T = T_of(2)
    assert dphi(carlitz(2), t * t + 1) == (((T * T + 1),),)
    assert dphi(nilpotent_example(2), t * t) == scalar_matrix(2, T * T, T.zero())


def test_j_invariant():
    assert j_invariant(carlitz(2)) == 1
    assert j_invariant(carlitz(5)) == 1
    assert j_invariant(nilpotent_example(2)) == 2
    assert j_invariant(anderson_coleman_example(2, 20)) == 1


def test_j_is_power_of_p():
    for M in (nilpotent_example(2), nilpotent_example(3)):
        j = j_invariant(M)
        p = M.F.p
        assert j in (1, p, p * p)
        T = T_of(M.q)
        for k in (1, 2, 3):
            assert dphi(M, Tpoly(M.q) ** (j * k)) == scalar_matrix(2, T ** (j * k), T.zero())


def test_lie_invariant():
    M = nilpotent_example(2)
    assert lie_invariant(M, [(1, 0)])
    assert not lie_invariant(M, [(0, 1)])
    assert lie_invariant(carlitz(3), [(1,)])
    with pytest.raises(DependentBasis):
        lie_invariant(M, [(1, 0), (1, 0)])


# -- torsion

def test_torsion_count_examples():
    t = Tpoly(3)
    assert torsion_count(carlitz(3), t) == 3
    t2 = Tpoly(2)
    assert torsion_count(carlitz(2), t2 * t2 + t2) == 4
    assert torsion_count(nilpotent_example(2), FqPoly.const(gf(2), 1)) == 1


@pytest.mark.parametrize("q", [2, 3])
def test_carlitz_count_is_q_to_degree(q, rng):
    for d in range(1, 4):
        a = rand_poly(rng, q, d)
        assert torsion_count(carlitz(q), a) == q**d


def test_zero_annihilator_rejected():
    with pytest.raises(ValidationError):
        torsion_count(nilpotent_example(2), FqPoly(gf(2), []))


def test_torsion_points_carlitz3():
    pts = torsion_points(carlitz(3), Tpoly(3), precision=30, ext_budget=(2, 2))
    assert len(pts) == 3
    nonzero = [p for p in pts if p.coords[0].val is not None]
    assert len(nonzero) == 2
    for p in nonzero:
        assert p.valuations == (Fraction(-1, 2),)
        x = p.coords[0]
        T = embed(T_of(3), x.K, x.prec + 4)
        assert (x * x + T).val_bound() >= 25  # x^2 = -T
        assert p.residual >= 25


def test_torsion_points_carlitz2_rational():
    pts = torsion_points(carlitz(2), Tpoly(2), precision=20, ext_budget=(1, 1))
    vals = sorted((p.coords[0].val if p.coords[0].val is not None else 99) for p in pts)
    assert vals == [-1, 99]  # x = T and x = 0
    one = torsion_points(carlitz(2), FqPoly.const(gf(2), 1), precision=10)
    assert len(one) == 1 and one[0].coords[0].is_zero()


def test_torsion_budget_exceeded():
    with pytest.raises(ExtensionBudgetExceeded):
        torsion_points(carlitz(3), Tpoly(3), precision=20, ext_budget=(1, 1), strict=True)


def test_torsion_is_a_vector_space():
    pts = torsion_points(carlitz(3), Tpoly(3) ** 2, precision=24, ext_budget=(2, 2))
    assert len(pts) == 9
    K = laurent(3, 2, 2)
    xs = [lift(p.coords[0], K) for p in pts]
    keys = {x.key(10) for x in xs}
    for a, b in itertools.combinations(xs, 2):
        assert (a + b).key(10) in keys  # closed under addition
    for a in xs:
        assert (-a).key(10) in keys  # and under F_3 scaling


def test_torsion_in_subvariety():
    q = 3
    M = direct_sum(carlitz(q), carlitz(q))
    K = laurent(q)
    ring = scalar_ring(K)
    names = ("x1", "x2")
    shifted = SubvarietySpec((parse_series("x2 - x1 - 1", names, ring),), names)
    graph = SubvarietySpec((parse_series("x2 - T*x1 - x1^3", names, ring),), names)
    empty = SubvarietySpec((parse_series("1", names, ring),), names)
    t = Tpoly(q)
    assert torsion_in_subvariety(M, shifted, t, precision=24) == 0
    assert torsion_in_subvariety(M, graph, t, precision=24) == 3
    assert torsion_in_subvariety(M, empty, t, precision=24) == 0
