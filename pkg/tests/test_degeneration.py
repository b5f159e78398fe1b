import random

import pytest

from bvtt import gallery
from bvtt.bv import BVStructure
from bvtt.degeneration import (DegenerationError, build_cyclic, default_truncation,
                               degenerates_at_E1, induced_delta_on_homology, max_truncation,
                               spectral_pages, u_freeness)
from bvtt.operators import GradedOperator
from bvtt.textformat import build

from oracles import dense, dense_betti


def bv(name):
    return build(gallery.get(name).document()).bv


def test_cyclic_complex_squares_to_zero_and_u_is_a_chain_map():
    c = build_cyclic(bv("square_bicomplex"), 3)
    assert c.is_complex()
    for n in c.degrees:
        lhs = c.differential(n + 2) @ c.u_map(n)
        rhs = c.u_map(n + 1) @ c.differential(n)
        # u^(M+1) = 0 truncates the top slice; compare below it
        assert lhs == rhs


def test_total_homology_matches_dense_oracle():
    rng = random.Random(9)
    for _ in range(10):
        b = gallery.random_block_sum(rng)
        c = build_cyclic(b, 2)
        blocks = {n: dense(c.differential(n)) for n in range(c.lo - 1, c.hi + 1)}
        dims = {n: c.dim(n) for n in c.degrees}
        want = dense_betti(blocks, dims)
        got = {n: h.dim for n, h in c.total_homology().items()}
        assert got == want


def test_delta_only_has_nonzero_first_differential():
    b = bv("delta_only")
    e1 = degenerates_at_E1(b)
    assert e1.verdict is False
    assert e1.certificate["first_nonzero_differential"] == 1
    assert u_freeness(b).verdict is False
    assert any(not m.is_zero() for m in induced_delta_on_homology(b).values())


def test_pages_stabilise_and_shrink():
    c = build_cyclic(bv("square_bicomplex"), default_truncation(bv("square_bicomplex")))
    pages = spectral_pages(c)
    totals = [p.total for p in pages]
    assert totals == sorted(totals, reverse=True)
    tot = sum(h.dim for h in c.total_homology().values())
    assert pages[-1].total == tot


def test_trivial_families():
    rng = random.Random(1)
    for _ in range(5):
        assert degenerates_at_E1(gallery.random_d_only(rng)).verdict is True
        assert u_freeness(gallery.random_d_only(rng)).verdict is True
        b = gallery.random_delta_only(rng)
        assert degenerates_at_E1(b).verdict is False
        assert u_freeness(b).verdict is False


def test_random_block_sums_criteria_agree():
    rng = random.Random(17)
    seen = set()
    for _ in range(15):
        b = gallery.random_block_sum(rng)
        v1, v2 = degenerates_at_E1(b).verdict, u_freeness(b).verdict
        assert v1 == v2
        seen.add(v1)
    assert seen == {True, False}


def test_rejects_non_bv_input():
    b = bv("square_bicomplex")
    # doubling Δ on degree 5 only breaks [d, Δ] = 0
    blocks = dict(b.delta.blocks)
    blocks[5] = blocks[5].scale(2)
    bad = BVStructure(b.algebra, b.d, [GradedOperator(b.algebra, -1, blocks)])
    with pytest.raises(DegenerationError):
        degenerates_at_E1(bad)


def test_truncation_cap_from_environment(monkeypatch):
    monkeypatch.setenv("BTT_MAX_U", "3")
    assert max_truncation() == 3
    # the cap never prevents the pair (M, M + 1) from being compared
    assert degenerates_at_E1(bv("square_bicomplex"), 5).M == 5
