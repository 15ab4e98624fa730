import itertools

import pytest

from tmodcount.finitefield import field, gf, prime_power


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16])
def test_field_axioms(q):
    F = gf(q)
    els = list(F.elements())
    assert len(els) == q
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.add(F.sub(a, b), b) == a
        if b:
            assert F.mul(F.div(a, b), b) == a
    for a in els:
        assert F.pow(a, q) == a  # Frobenius fixes F_q


@pytest.mark.parametrize("p,d,n", [(2, 2, 4), (3, 2, 4), (2, 1, 3), (2, 2, 6), (3, 1, 2)])
def test_subfield_embedding_is_a_ring_map(p, d, n):
    small, big = field(p, d), field(p, n)
    emb = small.embedding(big)
    assert len(set(emb)) == small.order
    for a, b in itertools.product(range(small.order), repeat=2):
        assert emb[small.add(a, b)] == big.add(emb[a], emb[b])
        assert emb[small.mul(a, b)] == big.mul(emb[a], emb[b])


def test_embeddings_compose():
    # F_2 -> F_4 -> F_16 agrees with F_2 -> F_16, F_4 -> F_16 with the tower
    f4, f16 = field(2, 2), field(2, 4)
    e416 = f4.embedding(f16)
    e24 = field(2, 1).embedding(f4)
    e216 = field(2, 1).embedding(f16)
    assert [e416[e24[a]] for a in range(2)] == list(e216)


@pytest.mark.parametrize("q,ps", [(8, (2, 3)), (9, (3, 2)), (13, (13, 1))])
def test_prime_power(q, ps):
    assert prime_power(q) == ps


@pytest.mark.parametrize("q", [1, 6, 12, 15])
def test_not_prime_power(q):
    with pytest.raises(ValueError):
        prime_power(q)
