import itertools
import random

import pytest

from bvtt.algebra import Algebra, Generator
from bvtt.field import QQ
from bvtt.gallery import random_nilpotent_ce
from bvtt.linalg import SparseMatrix
from bvtt.operators import (GradedOperator, MultiVector, OperatorError, adjoint, commutator,
                            commutator_witness, conjugate, derivation_from_images, interior_product,
                            is_derivation, koszul_deviation_witness, koszul_order, lie_from_ce,
                            schouten)


def random_operator(rng, alg, shift, density=0.3):
    blocks = {}
    for n in alg.degrees:
        rows, cols = alg.dim(n + shift), alg.dim(n)
        if rows and cols:
            blocks[n] = SparseMatrix(rows, cols, {(i, j): rng.randint(-2, 2) for i in range(rows)
                                                  for j in range(cols) if rng.random() < density}, alg.field)
    return GradedOperator(alg, shift, blocks)


def random_mv(rng, alg, p):
    odd = [i for i, g in enumerate(alg.generators) if g.degree == 1]
    return MultiVector(alg, {k: rng.choice([0, 1, -1, 2]) for k in itertools.combinations(odd, p)})


def test_known_orders():
    rng = random.Random(0)
    alg, d = random_nilpotent_ce(rng, 4)
    assert koszul_order(d, 3) == 1
    pi = random_mv(rng, alg, 2)
    assert koszul_order(interior_product(pi), 3) == 2
    assert koszul_order(interior_product(random_mv(rng, alg, 3)), 4) == 3
    assert koszul_order(GradedOperator.identity(alg), 2) == 0


def test_commutator_route_agrees_with_deviation_oracle():
    rng = random.Random(4)
    alg = Algebra(QQ, [Generator("a", 1), Generator("b", 1), Generator("y", 2, nilpotent=2),
                       Generator("c", 1)], 5)
    ops = [random_operator(rng, alg, s, rng.choice([0.05, 0.2])) for s in (-2, -1, 0, 1) for _ in range(4)]
    ops += [interior_product(random_mv(rng, alg, 2)),
            derivation_from_images(alg, {"a": alg.gen("y"), "y": alg.gen("a") * alg.gen("y")}, 1)]
    for t in ops:
        for n in range(1, 5):
            fast = commutator_witness(t, n)
            slow = koszul_deviation_witness(t, n)
            assert (fast is None) == (slow is None), (t, n)


def test_derivations():
    rng = random.Random(1)
    alg, d = random_nilpotent_ce(rng, 4, extra_even=True)
    assert is_derivation(d)
    assert not is_derivation(interior_product(MultiVector(alg, {(0, 1): 1})))
    with pytest.raises(OperatorError):
        derivation_from_images(alg, {"e1": alg.gen("e2")}, 1)


def test_interior_product_composes_contractions():
    alg = Algebra(QQ, [Generator(f"e{i}", 1) for i in range(1, 4)], 3)
    g = alg.gen
    i12 = interior_product(MultiVector(alg, {(0, 1): 1}))
    # i_{∂1∧∂2} = i_∂1 ∘ i_∂2 on e1 e2 gives i_∂1(-e1) = -1
    assert i12.apply(g("e1") * g("e2")) == alg.one().scale(-1)
    assert i12.apply(g("e1") * g("e2") * g("e3")) == g("e3").scale(-1)


def test_schouten_matches_operator_oracle():
    """i_[v,w] = [[i_v, d], i_w] on CE models, an independent route through operators."""
    rng = random.Random(7)
    checked = 0
    for _ in range(30):
        alg, d = random_nilpotent_ce(rng, 4)
        lie = lie_from_ce(alg, d)
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        v, w = random_mv(rng, alg, p), random_mv(rng, alg, q)
        s = schouten(v, w, lie)
        rhs = commutator(commutator(interior_product(v), d), interior_product(w))
        lhs = interior_product(s) if not s.is_zero() else GradedOperator.zero(alg, 1 - p - q)
        assert lhs == rhs
        checked += not s.is_zero()
    assert checked > 10


def test_schouten_graded_antisymmetry():
    rng = random.Random(8)
    for _ in range(20):
        alg, d = random_nilpotent_ce(rng, 4)
        lie = lie_from_ce(alg, d)
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        v, w = random_mv(rng, alg, p), random_mv(rng, alg, q)
        sign = -(-1) ** ((p - 1) * (q - 1))
        assert schouten(v, w, lie) == schouten(w, v, lie).scale(sign)


def test_conjugate_and_adjoint():
    rng = random.Random(2)
    alg, d = random_nilpotent_ce(rng, 3)
    ident = GradedOperator.identity(alg)
    assert conjugate(ident, d) == d
    assert adjoint(adjoint(d)) == d
    assert adjoint(d).shift == -1
