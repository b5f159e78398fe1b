"""Built-in example inputs, random families, and the manifests each entry claims.

Every entry is a :class:`~bvtt.textformat.Document`; ``replay`` recomputes
each manifest claim so the test suite can check them all.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .algebra import Algebra, Generator
from .bv import (BVStructure, StructureError, verify_bv, verify_bv_infinity, verify_conjugation_identity)
from .deformation import CoefficientLie, Obstruction, solve_mc, tensor_dg_lie
from .degeneration import degenerates_at_E1, u_freeness
from .field import QQ, FieldSpec
from .linalg import SparseMatrix, homology, inverse, rank
from .operators import (GradedOperator, MultiVector, adjoint, commutator, conjugate, derivation_from_images,
                        interior_product, lie_from_ce, schouten)
from .quasiabelian import dd_lemma, induced_bracket_on_homology, zigzag_certificate
from .report import Report
from .textformat import Document, build, document_from


@dataclass
class GalleryEntry:
    name: str
    description: str
    make: object                 # () -> Document
    manifest: dict = field(default_factory=dict)

    def document(self) -> Document:
        return self.make()


def _ce_algebra(n, field=QQ, bigrading=None):
    gens = [Generator(f"e{i}", 1, bigrading[i - 1] if bigrading else None) for i in range(1, n + 1)]
    return Algebra(field, gens, n)


def _bivector(alg, *pairs):
    return MultiVector(alg, {(alg.generator_index(a), alg.generator_index(b)): c for a, b, c in pairs})


def _heisenberg_algebra():
    alg = _ce_algebra(3, bigrading=[(1, 0), (0, 1), (1, 0)])
    g = alg.gen
    return alg, derivation_from_images(alg, {"e3": g("e1") * g("e2")}, 1)


def heisenberg() -> Document:
    alg, d = _heisenberg_algebra()
    pi = _bivector(alg, ("e1", "e2", 1))
    return document_from(alg, d, multivectors={"pi": pi}, structure=("bv", {"pi": "pi"}))


def heisenberg_hierarchy() -> Document:
    """The same bivector, with the whole hierarchy generated by Λ = i_π."""
    alg, d = _heisenberg_algebra()
    lam = interior_product(_bivector(alg, ("e1", "e2", 1)))
    return document_from(alg, d, operators={"L": lam}, structure=("bv_infinity", {"lambda": "L"}))


def _trivial_product_algebra(gens, cap):
    return Algebra(QQ, gens, cap)


def square_bicomplex() -> Document:
    """a, b = da, c = Δa, e = dΔa with all products zero (degrees 3..5, cap 5)."""
    alg = _trivial_product_algebra([Generator("a", 4, nilpotent=2), Generator("b", 5),
                                    Generator("c", 3), Generator("e", 4, nilpotent=2)], 5)
    g = alg.gen
    d = derivation_from_images(alg, {"a": g("b"), "c": g("e")}, 1)
    delta = derivation_from_images(alg, {"a": g("c"), "b": -g("e")}, -1)
    return document_from(alg, d, operators={"D": delta}, structure=("bv", {"delta": "D"}))


def delta_only() -> Document:
    """d = 0 and Δx = c with trivial products: the simplest non-degenerate input."""
    alg = _trivial_product_algebra([Generator("x", 4, nilpotent=2), Generator("c", 3)], 4)
    delta = derivation_from_images(alg, {"x": alg.gen("c")}, -1)
    return document_from(alg, GradedOperator.zero(alg, 1), operators={"D": delta},
                         structure=("bv", {"delta": "D"}))


def abelian_torus(n=3) -> Document:
    alg = _ce_algebra(n)
    pairs = [(f"e{2 * i + 1}", f"e{2 * i + 2}", 1) for i in range(n // 2)]
    pi = _bivector(alg, *pairs)
    return document_from(alg, GradedOperator.zero(alg, 1), multivectors={"pi": pi},
                         structure=("bv", {"pi": "pi"}))


def jacobi_example() -> Document:
    """Heisenberg with π = -∂1∧∂2 - ∂1∧∂3 and η = ∂3."""
    alg, d = _heisenberg_algebra()
    pi = _bivector(alg, ("e1", "e2", -1), ("e1", "e3", -1))
    eta = MultiVector.dual(alg, "e3")
    return document_from(alg, d, multivectors={"pi": pi, "eta": eta},
                         structure=("bv_infinity", {"pi": "pi", "eta": "eta"}))


def _nilmanifold4():
    alg = _ce_algebra(4)
    g = alg.gen
    return alg, derivation_from_images(alg, {"e3": g("e1") * g("e2")}, 1)


def poisson_nilmanifold() -> Document:
    """Heisenberg × line with the Poisson bivector π = ∂1∧∂4 + ∂2∧∂4 (Δ ≠ 0)."""
    alg, d = _nilmanifold4()
    pi = _bivector(alg, ("e1", "e4", 1), ("e2", "e4", 1))
    return document_from(alg, d, multivectors={"pi": pi}, structure=("bv", {"pi": "pi"}))


def _automorphism(alg, images):
    """Algebra automorphism of an exterior algebra fixed on the generators."""
    def on(m):
        x = alg.one()
        for e, g in zip(m, alg.generators):
            for _ in range(e):
                x = x * images[g.name]
        return x
    return GradedOperator.from_monomial_map(alg, 0, on)


def hermitian_demo() -> Document:
    """Operator calculus only: J on the 4-dimensional nilmanifold model."""
    alg, d = _nilmanifold4()
    g = alg.gen
    J = _automorphism(alg, {"e1": g("e2"), "e2": -g("e1"), "e3": g("e4"), "e4": -g("e3")})
    return document_from(alg, d, operators={"J": J})


# -- coefficient Lie algebras --------------------------------------------------

def _lie(names, brackets):
    consts = {}
    for (a, b), val in brackets.items():
        i, j = names.index(a), names.index(b)
        v = {names.index(k): c for k, c in val.items()}
        consts[i, j] = v
        consts[j, i] = {k: -c for k, c in v.items()}
    return CoefficientLie(list(names), consts)


def heisenberg_lie():
    return _lie(["x", "y", "z"], {("x", "y"): {"z": 1}})


def sl2_lie():
    return _lie(["h", "e", "f"], {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}})


def _small_ce_models():
    """CE models of Lie algebras of dimension <= 5, smallest first."""
    out = []
    for n in range(1, 6):
        alg = _ce_algebra(n)
        out.append((f"abelian{n}", alg, GradedOperator.zero(alg, 1)))
        if n >= 3:
            g = alg.gen
            out.append((f"heisenberg+{n - 3}", alg,
                        derivation_from_images(alg, {"e3": g("e1") * g("e2")}, 1)))
    return out


def search_obstructed(max_weight=2):
    """Smallest (h, g, α) whose order-2 Maurer-Cartan obstruction is nonzero.

    Scans CE models of h (dimension <= 5), coefficient algebras g and classes
    α ∈ H¹ with coordinates in {0, 1} by increasing weight.
    """
    for hname, alg, d in _small_ce_models():
        for gname, g in (("heisenberg", heisenberg_lie()), ("sl2", sl2_lie())):
            l = tensor_dg_lie(g, alg, d, check=False)
            h1 = l.homology(1).dim
            for w in range(1, max_weight + 1):
                for support in itertools.combinations(range(h1), w):
                    alpha = [1 if i in support else 0 for i in range(h1)]
                    res = solve_mc(l, alpha, 2)
                    if isinstance(res, Obstruction):
                        return hname, gname, alg, d, g, alpha
    return None


def obstructed_dglie() -> Document:
    found = search_obstructed()
    if found is None:
        raise RuntimeError("no obstructed dg-Lie found within the search bounds")
    _, gname, alg, d, g, _ = found
    return document_from(alg, d, lies={gname: g}, structure=("dg_lie", {"coefficients": gname}))


def obstructed_class():
    """The class α used by the obstructed entry."""
    return search_obstructed()[5]


ENTRIES = {
    "heisenberg": GalleryEntry(
        "heisenberg", "Koszul BV operator of π = ∂1∧∂2 on the Heisenberg CE algebra", heisenberg,
        {"verify_bv": True, "betti": [1, 2, 2, 1], "degenerates_at_E1": False, "u_freeness": False,
         "dd_lemma": False, "induced_bracket_zero": True, "column_closed": 1}),
    "heisenberg_hierarchy": GalleryEntry(
        "heisenberg_hierarchy", "BV∞ hierarchy generated by Λ = i_π on the Heisenberg CE algebra",
        heisenberg_hierarchy,
        {"verify_bv_infinity": True, "conjugation_identity": True, "delta_degrees": [-1, -3]}),
    "square_bicomplex": GalleryEntry(
        "square_bicomplex", "a, da, Δa, dΔa with trivial products", square_bicomplex,
        {"verify_bv": True, "dd_lemma": True, "degenerates_at_E1": True, "u_freeness": True,
         "zigzag_valid": True, "induced_bracket_zero": True}),
    "delta_only": GalleryEntry(
        "delta_only", "d = 0 with a nonzero Δ", delta_only,
        {"verify_bv": True, "degenerates_at_E1": False, "u_freeness": False}),
    "abelian_torus": GalleryEntry(
        "abelian_torus", "exterior algebra on 3 generators, d = 0, π = ∂1∧∂2", abelian_torus,
        {"verify_bv": True, "delta_zero": True, "degenerates_at_E1": True, "u_freeness": True,
         "dd_lemma": True, "induced_bracket_zero": True}),
    "jacobi_example": GalleryEntry(
        "jacobi_example", "Jacobi pair π = -∂1∧∂2 - ∂1∧∂3, η = ∂3 on the Heisenberg CE algebra",
        jacobi_example,
        {"schouten_conditions": True, "verify_bv_infinity": True, "delta_degrees": [-1, -3]}),
    "poisson_nilmanifold": GalleryEntry(
        "poisson_nilmanifold", "Poisson bivector ∂1∧∂4 + ∂2∧∂4 on the Heisenberg × line CE algebra",
        poisson_nilmanifold,
        {"verify_bv": True, "poisson": True, "delta_zero": False, "degenerates_at_E1": True,
         "u_freeness": True, "dd_lemma": False, "induced_bracket_zero": True}),
    "obstructed_dglie": GalleryEntry(
        "obstructed_dglie", "g ⊗ CE(h) with a nonzero order-2 obstruction (found by search)",
        obstructed_dglie, {"obstruction_order": 2, "h2_nonzero": True}),
    "hermitian_demo": GalleryEntry(
        "hermitian_demo", "demonstration only: J, its conjugate of d and adjoints; no BV claim",
        hermitian_demo, {"demonstration_only": True, "j_squared_sign": True, "dc_squared_zero": True,
                         "adjoint_square_zero": True}),
}


def names():
    return list(ENTRIES)


def get(name) -> GalleryEntry:
    try:
        return ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; choose from {', '.join(ENTRIES)}") from None


def betti_numbers(b_alg, d):
    return [homology(d.block(n - 1), d.block(n)).dim for n in b_alg.degrees]


def replay(entry: GalleryEntry) -> Report:
    """Recompute every manifest claim of an entry."""
    rep = Report(f"gallery:{entry.name}")
    doc = entry.document()
    built = build(doc)
    b = built.bv

    def claim(key, actual):
        want = entry.manifest[key]
        rep.details[key] = actual
        if actual != want:
            rep.fail("manifest mismatch", claim=key, expected=want, actual=actual)

    for key in entry.manifest:
        if key == "verify_bv":
            claim(key, verify_bv(b).ok)
        elif key == "verify_bv_infinity":
            claim(key, verify_bv_infinity(b).ok)
        elif key == "conjugation_identity":
            claim(key, verify_conjugation_identity(b).ok)
        elif key == "delta_degrees":
            claim(key, [x.shift for x in b.deltas])
        elif key == "betti":
            claim(key, betti_numbers(built.algebra, built.d))
        elif key == "degenerates_at_E1":
            claim(key, degenerates_at_E1(b).verdict)
        elif key == "u_freeness":
            claim(key, u_freeness(b).verdict)
        elif key == "dd_lemma":
            claim(key, dd_lemma(b).verdict)
        elif key == "zigzag_valid":
            claim(key, zigzag_certificate(b).valid)
        elif key == "induced_bracket_zero":
            claim(key, induced_bracket_on_homology(b).is_zero)
        elif key == "delta_zero":
            claim(key, b.delta.is_zero())
        elif key == "column_closed":
            from .deformation import to_dg_lie
            try:
                to_dg_lie(b, column=entry.manifest[key])
                claim(key, entry.manifest[key])
            except ValueError as e:
                claim(key, str(e))
        elif key == "schouten_conditions":
            pi, eta = doc.multivectors["pi"], doc.multivectors["eta"]
            lie = lie_from_ce(built.algebra, built.d)
            ok = (schouten(pi, pi, lie) == eta.wedge(pi).scale(2)
                  and schouten(pi, eta, lie).is_zero())
            claim(key, ok)
        elif key == "poisson":
            pi = doc.multivectors["pi"]
            claim(key, schouten(pi, pi, lie_from_ce(built.algebra, built.d)).is_zero())
        elif key == "obstruction_order":
            res = solve_mc(built.dglie, obstructed_class(), 2)
            claim(key, res.order if isinstance(res, Obstruction) else None)
        elif key == "h2_nonzero":
            claim(key, built.dglie.homology(2).dim > 0)
        elif key == "demonstration_only":
            claim(key, doc.structure is None)
        elif key == "j_squared_sign":
            J = doc.operators["J"]
            alg = built.algebra
            sign = GradedOperator(alg, 0, {n: SparseMatrix.identity(alg.dim(n), alg.field).scale(
                alg.field(-1) ** n) for n in alg.degrees})
            claim(key, J @ J == sign)
        elif key == "dc_squared_zero":
            dc = conjugate(doc.operators["J"], built.d)
            claim(key, (dc @ dc).is_zero())
        elif key == "adjoint_square_zero":
            ds = adjoint(built.d)
            claim(key, ds.shift == -1 and (ds @ ds).is_zero())
        else:
            rep.fail("unknown manifest claim", claim=key)
    return rep


# -- random families -----------------------------------------------------------

_BLOCKS = ("dot", "square", "d_arrow", "delta_arrow", "zigzag")


def random_block_sum(rng: random.Random, blocks=_BLOCKS, n_blocks=None, base_change=True,
                     field: FieldSpec = QQ) -> BVStructure:
    """Direct sum of small blocks in a trivial-product algebra (degrees 3..5, cap 5).

    ``dot``: one class; ``square``: a, da, Δa, dΔa; ``d_arrow``: x -> dx;
    ``delta_arrow``: x -> Δx; ``zigzag``: da = b, Δa = c.  A random
    invertible change of basis in each degree is applied when ``base_change``.
    """
    n_blocks = n_blocks or rng.randint(1, 4)
    gens, dmap, xmap = [], {}, {}

    def new(deg):
        name = f"g{len(gens)}"
        gens.append(Generator(name, deg, nilpotent=2 if deg % 2 == 0 else None))
        return name

    for _ in range(n_blocks):
        kind = rng.choice(blocks)
        if kind == "dot":
            new(rng.randint(3, 5))
        elif kind == "square":
            a, b, c, e = new(4), new(5), new(3), new(4)
            dmap[a] = (b, 1)
            dmap[c] = (e, 1)
            xmap[a] = (c, 1)
            xmap[b] = (e, -1)
        elif kind == "d_arrow":
            k = rng.randint(3, 4)
            x, y = new(k), new(k + 1)
            dmap[x] = (y, 1)
        elif kind == "delta_arrow":
            k = rng.randint(4, 5)
            x, y = new(k), new(k - 1)
            xmap[x] = (y, 1)
        else:
            a, b, c = new(4), new(5), new(3)
            dmap[a] = (b, 1)
            xmap[a] = (c, 1)
    alg = Algebra(field, gens, 5)
    d = derivation_from_images(alg, {k: alg.gen(v).scale(c) for k, (v, c) in dmap.items()}, 1)
    delta = derivation_from_images(alg, {k: alg.gen(v).scale(c) for k, (v, c) in xmap.items()}, -1)
    if base_change:
        eta = _random_basis_change(rng, alg)
        d, delta = conjugate(eta, d), conjugate(eta, delta)
    return BVStructure(alg, d, [delta], name="random_block_sum")


def _random_invertible(rng, n, field):
    while True:
        m = SparseMatrix.from_dense([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], field,
                                    ncols=n)
        if rank(m) == n:
            return m


def _random_basis_change(rng, alg):
    blocks = {}
    for n in alg.degrees:
        dim = alg.dim(n)
        blocks[n] = _random_invertible(rng, dim, alg.field) if n > 0 else SparseMatrix.identity(dim, alg.field)
    return GradedOperator(alg, 0, blocks)


def random_delta_only(rng: random.Random) -> BVStructure:
    """d = 0 and Δ ≠ 0: never degenerate."""
    b = random_block_sum(rng, blocks=("delta_arrow",), n_blocks=rng.randint(1, 3))
    return b


def random_d_only(rng: random.Random) -> BVStructure:
    """Δ = 0: always degenerate."""
    return random_block_sum(rng, blocks=("dot", "d_arrow"), n_blocks=rng.randint(1, 4))


def random_nilpotent_ce(rng: random.Random, n: int, field: FieldSpec = QQ, extra_even=False):
    """A random nilpotent CE model: d e_k is a combination of e_i e_j with i < j < k."""
    gens = [Generator(f"e{i}", 1) for i in range(1, n + 1)]
    if extra_even:
        gens.append(Generator("y", 2, nilpotent=2))
    cap = n + (2 if extra_even else 0)
    alg = Algebra(field, gens, cap)
    while True:
        images = {}
        for k in range(3, n + 1):
            x = alg.zero()
            for i, j in itertools.combinations(range(1, k), 2):
                c = rng.choice([0, 0, 1, -1])
                if c:
                    x = x + (alg.gen(f"e{i}") * alg.gen(f"e{j}")).scale(c)
            if x:
                images[f"e{k}"] = x
        d = derivation_from_images(alg, images, 1)
        if (d @ d).is_zero():
            return alg, d


def random_second_order_lambda(rng: random.Random, alg) -> GradedOperator:
    """i_π for a random constant bivector, plus a multiple of ∂/∂y when y is present."""
    odd = [i for i, g in enumerate(alg.generators) if g.degree == 1]
    terms = {}
    for i, j in itertools.combinations(odd, 2):
        c = rng.choice([0, 0, 1, -1, 2])
        if c:
            terms[i, j] = c
    if not terms:
        terms[odd[0], odd[1]] = 1
    lam = interior_product(MultiVector(alg, terms))
    names = [g.name for g in alg.generators]
    if "y" in names:
        c = rng.choice([0, 1, -1])
        if c:
            lam = lam + derivation_from_images(alg, {"y": alg.one().scale(c)}, -2)
    return lam


def random_hierarchy_input(rng: random.Random):
    """(algebra, d, Λ) with per-degree dimension at most 32."""
    n = rng.choice([3, 4, 5])
    alg, d = random_nilpotent_ce(rng, n, extra_even=(n <= 4 and rng.random() < 0.5))
    return alg, d, random_second_order_lambda(rng, alg)


def random_koszul_bv(rng: random.Random) -> BVStructure:
    """Koszul Δ = [i_π, d] on a random nilpotent CE model, redrawn until Δ² = 0."""
    from .bv import koszul_structure
    while True:
        n = rng.choice([3, 4])
        alg, d = random_nilpotent_ce(rng, n)
        terms = {p: rng.choice([0, 1, -1]) for p in itertools.combinations(range(n), 2)}
        pi = MultiVector(alg, {k: v for k, v in terms.items() if v})
        b = koszul_structure(alg, d, pi, name="random_koszul")
        if verify_bv(b, brackets=False).ok:
            return b


def _h2_free_ce(rng: random.Random):
    """A random 2- or 3-dimensional solvable CE model with H² = 0, or None."""
    n = rng.choice([2, 3])
    alg = _ce_algebra(n)
    g = alg.gen
    if n == 2:
        a = rng.choice([1, -1, 2])
        images = {"e2": (g("e1") * g("e2")).scale(a)}
    else:
        a, b, c = rng.choice([1, 2, -1]), rng.choice([1, 2, 3, -2]), rng.choice([0, 1, -1])
        images = {"e2": (g("e1") * g("e2")).scale(a),
                  "e3": (g("e1") * g("e3")).scale(b) + (g("e1") * g("e2")).scale(c)}
    d = derivation_from_images(alg, images, 1)
    if not (d @ d).is_zero():
        return None
    if homology(d.block(1), d.block(2)).dim:
        return None
    return alg, d


def _random_coefficient_lie(rng: random.Random):
    base = rng.choice([heisenberg_lie, sl2_lie, _upper_triangular_lie, _gl2_lie])()
    n = len(base.names)
    m = _random_invertible(rng, n, QQ)
    minv = inverse(m)
    cols = m.columns()
    # new basis x'_a = Σ m[k, a] x_k; [x'_a, x'_b] expressed back through m⁻¹
    consts = {}
    for a, b in itertools.product(range(n), repeat=2):
        acc = [QQ.zero] * n
        for i, ci in enumerate(cols[a]):
            for j, cj in enumerate(cols[b]):
                if ci and cj:
                    for k, c in base.bracket(i, j).items():
                        acc[k] = acc[k] + ci * cj * c
        coords = minv @ acc
        val = {k: c for k, c in enumerate(coords) if c}
        if val:
            consts[a, b] = val
    return CoefficientLie([f"x{i}" for i in range(n)], consts)


def _upper_triangular_lie():
    # basis h1 = E11, h2 = E22, e = E12
    return _lie(["h1", "h2", "e"], {("h1", "e"): {"e": 1}, ("h2", "e"): {"e": -1}})


def _gl2_lie():
    return _lie(["a", "b", "c", "t"], {("a", "b"): {"b": 2}, ("a", "c"): {"c": -2}, ("b", "c"): {"a": 1}})


def random_h2_free_dglie(rng: random.Random):
    """g ⊗ CE(h) with H²(h) = 0, hence H² = 0, for a random basis of g."""
    while True:
        found = _h2_free_ce(rng)
        if found is not None:
            break
    alg, d = found
    return tensor_dg_lie(_random_coefficient_lie(rng), alg, d)
