import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from tmodcount.finitefield import gf
from tmodcount.localfield import laurent, padic
from tmodcount.polys import FqPoly, RationalFn

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rand_laurent(rng, K, prec=12, vrange=(-3, 3)):
    """Random element of K with a nonzero leading digit."""
    v = rng.randint(*vrange)
    n = prec - v
    ds = [rng.randrange(1, K.residue.order)] + [rng.randrange(K.residue.order) for _ in range(n - 1)]
    return K.from_digits(v, ds, prec)


def rand_padic(rng, K, prec=10, vrange=(-2, 2)):
    v = rng.randint(*vrange)
    ds = [rng.randrange(1, K.p)] + [rng.randrange(K.p) for _ in range(prec - v - 1)]
    return K.from_digits(v, ds, prec)


def rand_poly(rng, q, deg, monic=False):
    F = gf(q)
    cs = [rng.randrange(q) for _ in range(deg)] + [1 if monic else rng.randrange(1, q)]
    return FqPoly(F, cs)


def rand_rfn(rng, q, deg=2):
    num = rand_poly(rng, q, rng.randint(0, deg))
    den = rand_poly(rng, q, rng.randint(0, deg), monic=True)
    return RationalFn(num, den)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def F2():
    return laurent(2)


@pytest.fixture
def Q5():
    return padic(5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
