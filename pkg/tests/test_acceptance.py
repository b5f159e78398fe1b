"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import contextlib
import random

import pytest

from bvtt import cli, gallery
from bvtt.bv import BVStructure, build_hierarchy, verify_bv_infinity, verify_conjugation_identity
from bvtt.deformation import (DeformationSeries, Obstruction, char_p_probe, solve_mc, to_dg_lie,
                              tt_solve_mc, verify_series)
from bvtt.degeneration import degenerates_at_E1, u_freeness
from bvtt.linalg import homology, kernel_basis, rank, rref
from bvtt.quasiabelian import dd_lemma, induced_bracket_on_homology, zigzag_certificate
from bvtt.textformat import build, dumps, parse, reduce_mod
from bvtt.transfer import TransferredLInfinity

from matrix import EXPECTED, EXTRA, STRUCTURE_COMMANDS, document_text
from oracles import dense, dense_betti, dense_kernel_dim, dense_rank, dense_rref
from test_bv import delta_positions, mutate
from test_deformation import exhaustively_obstructed
from test_linalg import random_matrix



def structure(name):
    st = gallery.get(name).document().structure
    return (st[0], dict(st[1])) if st else (None, {})


CLASSICAL = [n for n in gallery.names() if structure(n)[0] == "bv"]


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {title}")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {title}")
    return run


def bv(name):
    return build(gallery.get(name).document()).bv


def basis_classes(dim):
    return [[int(i == j) for j in range(dim)] for i in range(dim)]


def test_criterion_1_hierarchy_soundness(criterion):
    with criterion(1, "hierarchy soundness"):
        hierarchy_entries = [n for n in gallery.names() if "lambda" in structure(n)[1]]
        assert hierarchy_entries == ["heisenberg_hierarchy"]
        for name in hierarchy_entries:
            b = bv(name)
            assert verify_bv_infinity(b).ok and verify_conjugation_identity(b).ok
        rng = random.Random(2024)
        for _ in range(20):
            alg, d, lam = gallery.random_hierarchy_input(rng)
            assert max(alg.dim(n) for n in alg.degrees) <= 32
            b = build_hierarchy(alg, d, lam)
            first, second = verify_bv_infinity(b).ok, verify_conjugation_identity(b).ok
            assert first == second is True
        # every single-entry mutation of Δ₁ is caught
        b = bv("heisenberg_hierarchy")
        for n, r, c in delta_positions(b):
            m = BVStructure(b.algebra, b.d, [mutate(b.deltas[0], n, r, c)] + b.deltas[1:], b.lam)
            caught_conj = not verify_conjugation_identity(m).ok
            caught_hier = not verify_bv_infinity(m).ok
            assert caught_conj
            if (r, c) in b.deltas[0].block(n).entries:
                assert caught_hier


def test_criterion_2_degeneration_equivalence(criterion):
    with criterion(2, "degeneration equivalence"):
        for name in CLASSICAL:
            b = bv(name)
            assert degenerates_at_E1(b).verdict == u_freeness(b).verdict
        rng = random.Random(77)
        inputs = [gallery.random_block_sum(rng) for _ in range(45)]
        inputs += [gallery.random_koszul_bv(rng) for _ in range(10)]
        verdicts = set()
        for b in inputs:
            v = degenerates_at_E1(b).verdict
            assert v is not None and v == u_freeness(b).verdict
            verdicts.add(v)
        assert verdicts == {True, False}
        for _ in range(5):
            b = gallery.random_delta_only(rng)
            assert degenerates_at_E1(b).verdict is False and u_freeness(b).verdict is False
            b = gallery.random_d_only(rng)
            assert degenerates_at_E1(b).verdict is True and u_freeness(b).verdict is True


def test_criterion_3_dd_lemma_chain(criterion):
    with criterion(3, "dΔ-lemma chain"):
        rng = random.Random(303)
        inputs = [bv("square_bicomplex")]
        inputs += [gallery.random_block_sum(rng, blocks=("square", "dot")) for _ in range(50)]
        passing = 0
        for b in inputs:
            if not dd_lemma(b):
                continue
            passing += 1
            assert degenerates_at_E1(b).verdict is True
            z = zigzag_certificate(b)
            assert z.valid, z.problems
            assert induced_bracket_on_homology(b).is_zero
        assert passing == len(inputs)


def test_criterion_4_btt_in_characteristic_zero(criterion):
    with criterion(4, "BTT consequence in characteristic 0"):
        passing = [n for n in CLASSICAL if degenerates_at_E1(bv(n)).verdict]
        assert set(passing) == {"square_bicomplex", "abelian_torus", "poisson_nilmanifold"}
        solved = 0
        for name in passing:
            b = bv(name)
            assert induced_bracket_on_homology(b).is_zero
            l = to_dg_lie(b)
            t = TransferredLInfinity(l)
            for x in t.basis():
                for y in t.basis():
                    assert not any(t.bracket(x, y)[1])
            dd = bool(dd_lemma(b))
            for alpha in basis_classes(l.homology(1).dim):
                for method in ("generic", "homotopy"):
                    res = solve_mc(l, alpha, 8, method)
                    assert isinstance(res, DeformationSeries) and len(res.coefficients) == 8
                    assert verify_series(l, res.coefficients)
                    solved += 1
                if dd:
                    res = tt_solve_mc(b, alpha, 8)
                    assert isinstance(res, DeformationSeries)
                    assert verify_series(l, res.coefficients)
        assert solved > 0


def test_criterion_5_obstruction_detection(criterion):
    with criterion(5, "obstruction detection"):
        l = build(gallery.get("obstructed_dglie").document()).dglie
        alpha = gallery.obstructed_class()
        res = solve_mc(l, alpha, 8)
        assert isinstance(res, Obstruction) and res.order == 2
        assert any(res.class_coordinates)
        assert exhaustively_obstructed(l, alpha)
        rng = random.Random(55)
        for _ in range(25):
            h = gallery.random_h2_free_dglie(rng)
            assert h.homology(2).dim == 0
            for a in basis_classes(h.homology(1).dim):
                assert isinstance(solve_mc(h, a, 6), DeformationSeries)


def test_criterion_6_characteristic_p_probe(criterion):
    with criterion(6, "characteristic p probe over F_5 and F_7"):
        passing = [n for n in CLASSICAL if degenerates_at_E1(bv(n)).verdict]
        probed = 0
        for name in passing:
            doc = gallery.get(name).document()
            for p in (5, 7):
                b = build(reduce_mod(doc, p)).bv
                assert degenerates_at_E1(b).verdict is True
                probe = char_p_probe(to_dg_lie(b))
                assert probe.all_solved and probe.order == p - 1
                probed += len(probe.results)
        assert probed > 0


def test_criterion_7_linear_algebra_oracle(criterion):
    with criterion(7, "linear-algebra oracle agreement"):
        for name in gallery.names():
            doc = gallery.get(name).document()
            alg, d = doc.algebra, doc.d()
            blocks = {n: dense(d.block(n)) for n in alg.degrees}
            dims = {n: alg.dim(n) for n in alg.degrees}
            betti = dense_betti(blocks, dims)
            for n in alg.degrees:
                m = d.block(n)
                assert rank(m) == dense_rank(blocks[n]) if blocks[n] else rank(m) == 0
                assert len(kernel_basis(m)) == dense_kernel_dim(blocks[n], m.ncols)
                assert homology(d.block(n - 1), m).dim == betti[n]
        rng = random.Random(7)
        for _ in range(100):
            m = random_matrix(rng, gallery.QQ)
            rows = dense(m)
            _, piv = dense_rref(rows)
            assert rref(m).pivots == piv
            assert len(kernel_basis(m)) == m.ncols - len(piv)
        doc = gallery.get("heisenberg").document()
        assert gallery.betti_numbers(doc.algebra, doc.d()) == [1, 2, 2, 1]


def test_criterion_8_round_trip_and_exit_codes(criterion, tmp_path):
    with criterion(8, "format round-trip and exit-code contract"):
        for name in gallery.names():
            doc = gallery.get(name).document()
            assert parse(dumps(doc)) == doc
        path = tmp_path / "in.txt"
        out = tmp_path / "out.json"
        cases = [(key, [cmd], EXPECTED[key][k]) for key in EXPECTED
                 for k, cmd in enumerate(STRUCTURE_COMMANDS)] + EXTRA
        for key, argv, want in cases:
            path.write_text(document_text(key), encoding="utf-8")
            code = cli.main([argv[0], str(path), "--out", str(out)] + argv[1:])
            assert code == want, (key, argv, code)
