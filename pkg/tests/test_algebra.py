import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvtt.algebra import Algebra, AlgebraError, Generator
from bvtt.field import QQ

MIXED = Algebra(QQ, [Generator("x", 1), Generator("y", 2, nilpotent=3), Generator("z", 1),
                     Generator("w", 3)], 7)


def all_monomials(alg):
    return [m for n in alg.degrees for m in alg.basis(n)]


def word(m):
    return [i for i, e in enumerate(m) for _ in range(e)]


def sort_sign(alg, letters):
    """Koszul sign of bubble-sorting a word of generator indices."""
    w = list(letters)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if alg.generators[w[j]].odd and alg.generators[w[j + 1]].odd:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    return sign, w


def oracle_product(alg, a, b):
    sign, w = sort_sign(alg, word(a) + word(b))
    exps = tuple(w.count(i) for i in range(alg.ngens))
    if any(e >= g.bound for e, g in zip(exps, alg.generators)):
        return None
    if alg.monomial_degree(exps) > alg.cap:
        return None
    return sign, exps


def test_products_match_word_sorting_oracle():
    ms = all_monomials(MIXED)
    for a, b in itertools.product(ms, repeat=2):
        assert MIXED.mono_mul(a, b) == oracle_product(MIXED, a, b)


def test_associative_and_graded_commutative_exhaustively():
    alg = MIXED
    ms = all_monomials(alg)
    for a, b in itertools.product(ms, repeat=2):
        x, y = alg.monomial(a), alg.monomial(b)
        sign = -1 if alg.monomial_degree(a) * alg.monomial_degree(b) % 2 else 1
        assert x * y == (y * x).scale(sign)
    for a, b, c in itertools.product(ms[:12], repeat=3):
        x, y, z = alg.monomial(a), alg.monomial(b), alg.monomial(c)
        assert (x * y) * z == x * (y * z)


def test_exterior_dimensions():
    alg = Algebra(QQ, [Generator(f"e{i}", 1) for i in range(5)], 5)
    assert [alg.dim(n) for n in range(6)] == [comb(5, n) for n in range(6)]
    assert alg.gen("e1") * alg.gen("e1") == alg.zero()


def test_cap_and_nilpotency_truncate():
    y = MIXED.gen("y")
    assert y * y * y == MIXED.zero()
    assert MIXED.dim(8) == 0


@pytest.mark.parametrize("gens, msg", [
    ([Generator("a", 1), Generator("a", 1)], "duplicate"),
    ([Generator("a", -1)], "negative"),
    ([Generator("a", 2)], "nilpotency"),
    ([Generator("a", 1, bidegree=(1, 1))], "bidegree"),
])
def test_rejects_bad_presentations(gens, msg):
    with pytest.raises(AlgebraError, match=msg):
        Algebra(QQ, gens, 3)


def test_vector_round_trip():
    for n in MIXED.degrees:
        for i in range(MIXED.dim(n)):
            x = MIXED.basis_element(n, i)
            assert MIXED.from_vector(MIXED.to_vector(x, n), n) == x


elements = st.lists(st.tuples(st.integers(0, 40), st.integers(-3, 3)), max_size=4)


def build(spec):
    ms = all_monomials(MIXED)
    x = MIXED.zero()
    for i, c in spec:
        x = x + MIXED.monomial(ms[i % len(ms)]).scale(c)
    return x


@settings(max_examples=80, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms_on_random_elements(a, b, c):
    x, y, z = build(a), build(b), build(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert MIXED.one() * x == x
