import pytest

from bvtt import gallery
from bvtt.bv import verify_bv, verify_bv_infinity
from bvtt.textformat import build, reduce_mod

from oracles import dense, dense_betti


@pytest.mark.parametrize("name", gallery.names())
def test_manifest_replays(name):
    rep = gallery.replay(gallery.get(name))
    assert rep.ok, rep.failures


def test_heisenberg_betti_from_dense_oracle():
    doc = gallery.get("heisenberg").document()
    alg, d = doc.algebra, doc.d()
    blocks = {n: dense(d.block(n)) for n in alg.degrees}
    dims = {n: alg.dim(n) for n in alg.degrees}
    assert [dense_betti(blocks, dims)[n] for n in alg.degrees] == [1, 2, 2, 1]
    assert gallery.betti_numbers(alg, d) == [1, 2, 2, 1]


@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("name", gallery.names())
def test_reductions_are_valid_inputs(name, p):
    built = build(reduce_mod(gallery.get(name).document(), p))
    if built.kind == "bv":
        assert verify_bv(built.bv, brackets=False).ok
    elif built.kind == "bv_infinity":
        assert verify_bv_infinity(built.bv).ok


def test_unknown_entry():
    with pytest.raises(KeyError, match="unknown gallery entry"):
        gallery.get("nope")


def test_abelian_torus_is_trivial():
    b = build(gallery.abelian_torus(4)).bv
    assert b.delta.is_zero()
