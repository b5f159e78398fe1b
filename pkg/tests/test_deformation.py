import itertools
import random
from fractions import Fraction

import pytest

from bvtt import gallery
from bvtt.deformation import (DeformationSeries, DgLie, DgLieError, MCError, Obstruction,
                              char_p_probe, first_order_representative, mc_residual, solve_mc,
                              to_dg_lie, tt_solve_mc, verify_series)
from bvtt.field import FieldSpec
from bvtt.textformat import build, parse, reduce_mod

from oracles import dense, solvable


def built(name):
    return build(gallery.get(name).document())


def torus():
    return build(gallery.abelian_torus(3))


def exhaustively_obstructed(l, alpha):
    """R₂ stays outside Im ∂ for every representative ξ₁ + ∂c, c ∈ {-1, 0, 1}^dim L⁰."""
    f = l.field
    rep = first_order_representative(l, alpha)
    d0, d1 = l.d(0), dense(l.d(1))
    for c in itertools.product((-1, 0, 1), repeat=l.dim(0)):
        xi = [a + b for a, b in zip(rep, d0 @ [f(x) for x in c])] if l.dim(0) else rep
        r2 = [x * Fraction(-1, 2) for x in l.bracket(1, xi, 1, xi)]
        if solvable(d1, r2):
            return False
    return True


def test_dg_lie_axioms_and_errors():
    l = to_dg_lie(built("poisson_nilmanifold").bv)
    assert l.check()
    with pytest.raises(DgLieError):
        DgLie(l.field, {0: 1, 1: 1}, {0: l.d(0).__class__.from_dense([[1]], l.field)}, {
            (0, 0): {(0, 0): {0: 1}}})


@pytest.mark.parametrize("method", ["generic", "homotopy"])
def test_poisson_nilmanifold_solves_to_order_8(method):
    l = to_dg_lie(built("poisson_nilmanifold").bv)
    h1 = l.homology(1).dim
    assert h1 > 0
    for i in range(h1):
        alpha = [int(i == j) for j in range(h1)]
        res = solve_mc(l, alpha, 8, method)
        assert isinstance(res, DeformationSeries)
        assert verify_series(l, res.coefficients)


def test_tt_solver_keeps_delta_closed_terms():
    b = torus().bv
    res = tt_solve_mc(b, [1, 0, 0], 8)
    assert isinstance(res, DeformationSeries) and res.method == "tt"
    for x in res.coefficients:
        assert not any(b.delta.block(2) @ x)


def test_tt_solver_needs_dd_lemma():
    with pytest.raises(MCError):
        tt_solve_mc(built("heisenberg").bv, [1, 0], 3)


def test_obstructed_entry():
    l = built("obstructed_dglie").dglie
    alpha = gallery.obstructed_class()
    res = solve_mc(l, alpha, 4)
    assert isinstance(res, Obstruction) and res.order == 2
    assert any(res.class_coordinates)
    assert l.homology(2).dim > 0
    assert exhaustively_obstructed(l, alpha)
    # ∂R₂ = 0 always
    assert not any(l.d(2) @ res.witness)


def test_search_is_minimal():
    hname, gname, *_ = gallery.search_obstructed()
    assert (hname, gname) == ("abelian2", "heisenberg")


def test_h2_free_inputs_are_unobstructed():
    rng = random.Random(5)
    for _ in range(5):
        l = gallery.random_h2_free_dglie(rng)
        assert l.homology(2).dim == 0
        h1 = l.homology(1).dim
        for i in range(h1):
            res = solve_mc(l, [int(i == j) for j in range(h1)], 4)
            assert isinstance(res, DeformationSeries)


def test_residual_catches_a_wrong_series():
    l = to_dg_lie(built("poisson_nilmanifold").bv)
    res = solve_mc(l, [1, 1, 0, 0], 3)
    assert verify_series(l, res.coefficients)
    k = next(k for k in range(l.dim(1)) if any(l.d(1) @ l.basis_vector(1, k)))
    xis = [list(x) for x in res.coefficients]
    xis[0][k] = xis[0][k] + 1
    assert any(mc_residual(l, xis)[0])


def test_bad_inputs():
    l = to_dg_lie(built("poisson_nilmanifold").bv)
    with pytest.raises(MCError):
        solve_mc(l, [1], 2)
    with pytest.raises(MCError):
        solve_mc(l, [1, 0, 0, 0], 2, method="newton")
    l2 = l.over(FieldSpec.prime(2))
    with pytest.raises(MCError):
        solve_mc(l2, [1, 0, 0, 0], 2)


def test_char_p_probe_on_reductions():
    doc = gallery.get("poisson_nilmanifold").document()
    for p in (5, 7):
        l = build(reduce_mod(doc, p)).bv
        probe = char_p_probe(to_dg_lie(l))
        assert probe.all_solved and probe.order == p - 1
    with pytest.raises(MCError):
        char_p_probe(to_dg_lie(build(reduce_mod(doc, 3)).bv))


def test_char_p_probe_explicit_class_finds_obstruction():
    doc = reduce_mod(gallery.get("obstructed_dglie").document(), 5)
    l = build(doc).dglie
    # every basis class lifts; the obstruction lives on a sum of them
    assert char_p_probe(l).all_solved
    probe = char_p_probe(l, [gallery.obstructed_class()])
    assert not probe.all_solved
    assert isinstance(probe.results[0], Obstruction) and probe.results[0].order == 2
