import random

import pytest

from bvtt import gallery
from bvtt.quasiabelian import (CertificateError, dd_lemma, induced_bracket_on_homology,
                               zigzag_certificate)
from bvtt.textformat import build

from oracles import dense, dense_matmul, dense_rank


def bv(name):
    return build(gallery.get(name).document()).bv


def oracle_dd(b):
    """dΔ-lemma from dense ranks only.

    dim(Ker d ∩ Im Δ) = rk Δ - rk dΔ and dim(Ker Δ ∩ Im d) = rk d - rk Δd;
    both contain Im dΔ, so equal dimensions decide the lemma.
    """
    def rk(*blocks):
        rows = dense(blocks[0])
        for m in blocks[1:]:
            rows = dense_matmul(rows, dense(m))
        return dense_rank(rows) if rows and rows[0] else 0

    d, D = b.d, b.delta
    for n in b.algebra.degrees:
        e = rk(d.block(n - 1), D.block(n))
        if rk(D.block(n + 1)) - rk(d.block(n), D.block(n + 1)) != e:
            return False
        if rk(d.block(n - 1)) - rk(D.block(n), d.block(n - 1)) != e:
            return False
    return True


@pytest.mark.parametrize("name, want", [("square_bicomplex", True), ("abelian_torus", True),
                                        ("heisenberg", False), ("delta_only", False),
                                        ("poisson_nilmanifold", False)])
def test_gallery_dd_lemma(name, want):
    b = bv(name)
    assert dd_lemma(b).verdict is want
    assert oracle_dd(b) is want


def test_random_square_dot_sums_agree_with_oracle():
    rng = random.Random(12)
    for _ in range(10):
        b = gallery.random_block_sum(rng, blocks=("square", "dot", "zigzag", "d_arrow"))
        assert dd_lemma(b).verdict == oracle_dd(b)


def test_zigzag_certificate_on_square():
    z = zigzag_certificate(bv("square_bicomplex"))
    assert z.valid, z.problems
    assert z.betti_A == z.betti_kernel == z.betti_H_delta


def test_zigzag_requires_dd_lemma():
    with pytest.raises(CertificateError):
        zigzag_certificate(bv("delta_only"))


def test_induced_bracket():
    assert induced_bracket_on_homology(bv("square_bicomplex")).is_zero
    assert induced_bracket_on_homology(bv("heisenberg")).is_zero


@pytest.mark.parametrize("name", ["heisenberg", "square_bicomplex", "abelian_torus",
                                  "poisson_nilmanifold"])
def test_verdicts_do_not_depend_on_the_sign_of_delta(name):
    from bvtt.bv import BVStructure
    from bvtt.degeneration import degenerates_at_E1

    b = bv(name)
    flipped = BVStructure(b.algebra, b.d, [-op for op in b.deltas])
    assert dd_lemma(flipped).verdict == dd_lemma(b).verdict
    assert degenerates_at_E1(flipped).verdict == degenerates_at_E1(b).verdict
    assert induced_bracket_on_homology(flipped).is_zero == induced_bracket_on_homology(b).is_zero
