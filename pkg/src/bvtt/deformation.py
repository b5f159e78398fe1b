"""Dg-Lie algebras, the order-by-order Maurer-Cartan solver and its obstructions.

A Maurer-Cartan series ξ(t) = Σ ξ_k t^k in L^1 solves ∂ξ + ½[ξ, ξ] = 0.
Order by order this reads ∂ξ_k = R_k with R_k = -½ Σ_{i+j=k} [ξ_i, ξ_j];
the first order where R_k is not exact is reported together with the class
of R_k in H²(L).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bv import BracketTable, BVStructure, verify_bv
from .field import FieldSpec, format_scalar
from .linalg import SparseMatrix, homology, is_zero_vector, solve, zero_vector
from .quasiabelian import dd_lemma


class DgLieError(ValueError):
    pass


class MCError(ValueError):
    pass


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _scale(s, u):
    return [s * a for a in u]


class DgLie:
    """A finite dg-Lie algebra with degree-0 bracket and degree +1 differential.

    ``dims[n]`` is the dimension of L^n, ``diff[n]`` the matrix L^n -> L^(n+1)
    and ``table[n, m]`` maps basis index pairs ``(i, j)`` to the sparse
    coordinates ``{k: c}`` of ``[x_i, y_j]`` in L^(n+m).
    """

    def __init__(self, field: FieldSpec, dims: dict, diff: dict, table: dict,
                 labels: dict | None = None, check: bool = True):
        self.field = field
        self.dims = {n: d for n, d in dims.items() if d}
        self.diff = diff
        self.table = table
        self.labels = labels or {}
        if check:
            self.check()

    @property
    def degrees(self):
        return sorted(self.dims)

    def dim(self, n):
        return self.dims.get(n, 0)

    def d(self, n) -> SparseMatrix:
        m = self.diff.get(n)
        if m is None or m.shape != (self.dim(n + 1), self.dim(n)):
            return SparseMatrix.zeros(self.dim(n + 1), self.dim(n), self.field)
        return m

    def bracket(self, n, u, m, v):
        """[u, v] for u ∈ L^n, v ∈ L^m given as coordinate lists."""
        out = zero_vector(self.dim(n + m), self.field)
        tab = self.table.get((n, m))
        if not tab:
            return out
        for (i, j), res in tab.items():
            a, b = u[i], v[j]
            if a and b:
                ab = a * b
                for k, c in res.items():
                    out[k] = out[k] + ab * c
        return out

    def basis_vector(self, n, i):
        v = zero_vector(self.dim(n), self.field)
        v[i] = self.field.one
        return v

    def check(self):
        """∂² = 0, antisymmetry, Jacobi and Leibniz on basis tuples; raises DgLieError."""
        f = self.field
        degs = self.degrees
        for n in degs:
            if not (self.d(n + 1) @ self.d(n)).is_zero():
                raise DgLieError(f"∂² != 0 on L^{n}")
        basis = [(n, i) for n in degs for i in range(self.dim(n))]
        # sparse brackets and differentials keyed by (degree, index)
        br = {}
        for (n, m), tab in self.table.items():
            for (i, j), res in tab.items():
                br[(n, i), (m, j)] = {(n + m, k): f(c) for k, c in res.items() if c}
        dif = {}
        for n in degs:
            for (r, c), v in self.d(n).entries.items():
                dif.setdefault((n, c), {})[n + 1, r] = v

        def bracket(u, v):
            out = {}
            for a, ca in u.items():
                for b, cb in v.items():
                    for k, c in br.get((a, b), {}).items():
                        out[k] = out.get(k, 0) + ca * cb * c
            return {k: c for k, c in out.items() if c}

        def diff(u):
            out = {}
            for a, ca in u.items():
                for k, c in dif.get(a, {}).items():
                    out[k] = out.get(k, 0) + ca * c
            return {k: c for k, c in out.items() if c}

        def comb(*parts):
            out = {}
            for sign, u in parts:
                for k, c in u.items():
                    out[k] = out.get(k, 0) + sign * c
            return {k: c for k, c in out.items() if c}

        def sgn(k):
            return -1 if k % 2 else 1

        unit = {x: {x: f.one} for x in basis}
        for x, y in itertools.product(basis, repeat=2):
            n, m = x[0], y[0]
            xy = br.get((x, y), {})
            if comb((1, xy), (sgn(n * m), br.get((y, x), {}))):
                raise DgLieError(f"antisymmetry fails on L^{n}[{x[1]}], L^{m}[{y[1]}]")
            lhs = diff(xy)
            rhs = comb((1, bracket(diff(unit[x]), unit[y])), (sgn(n), bracket(unit[x], diff(unit[y]))))
            if comb((1, lhs), (-1, rhs)):
                raise DgLieError(f"∂ is not a derivation on L^{n}[{x[1]}], L^{m}[{y[1]}]")
        for x, y, z in itertools.product(basis, repeat=3):
            yz, xy, xz = br.get((y, z)), br.get((x, y)), br.get((x, z))
            if not (yz or xy or xz):
                continue
            lhs = bracket(unit[x], yz or {})
            rhs = comb((1, bracket(xy or {}, unit[z])),
                       (sgn(x[0] * y[0]), bracket(unit[y], xz or {})))
            if comb((1, lhs), (-1, rhs)):
                raise DgLieError(f"Jacobi fails on (L^{x[0]}[{x[1]}], L^{y[0]}[{y[1]}], L^{z[0]}[{z[1]}])")
        return True

    def homology(self, n):
        return homology(self.d(n - 1), self.d(n))

    def over(self, field: FieldSpec) -> "DgLie":
        diff = {n: SparseMatrix(m.nrows, m.ncols, m.entries, field) for n, m in self.diff.items()}
        table = {k: {ij: {kk: field(c) for kk, c in res.items() if field(c)} for ij, res in t.items()}
                 for k, t in self.table.items()}
        return DgLie(field, self.dims, diff, table, self.labels, check=False)


def to_dg_lie(b: BVStructure, column: int | None = None, check: bool = True) -> DgLie:
    """The derived bracket on L^n = A^(n+1), with ∂ = d.

    With ``column`` set on a bigraded algebra, keep only monomials of first
    bidegree ``column`` (closure under d and the bracket is checked).
    """
    rep = verify_bv(b)
    if not rep.ok:
        raise DgLieError(f"not a BV structure: {rep.failures[0]['what']}")
    alg = b.algebra
    if column is not None and not alg.bigraded:
        raise DgLieError("column restriction needs a bigraded algebra")
    keep = {}
    for a in alg.degrees:
        idx = [i for i, m in enumerate(alg.basis(a))
               if column is None or alg.monomial_bidegree(m)[0] == column]
        if idx:
            keep[a - 1] = idx
    pos = {n: {i: k for k, i in enumerate(idx)} for n, idx in keep.items()}
    dims = {n: len(idx) for n, idx in keep.items()}
    diff = {}
    for n, idx in keep.items():
        full = b.d.block(n + 1)
        entries = {}
        for (r, c), v in full.entries.items():
            if c not in pos[n]:
                continue
            if r not in pos.get(n + 1, {}):
                raise DgLieError(f"d leaves the column in degree {n + 1}")
            entries[pos[n + 1][r], pos[n][c]] = v
        diff[n] = SparseMatrix(dims.get(n + 1, 0), dims[n], entries, alg.field)
    br = BracketTable(b)
    table = {}
    for n, m in itertools.product(keep, repeat=2):
        t = {}
        for i, mi in enumerate(keep[n]):
            m1 = alg.basis(n + 1)[mi]
            for j, mj in enumerate(keep[m]):
                m2 = alg.basis(m + 1)[mj]
                z = br.mono(m1, m2)
                if z.is_zero():
                    continue
                res = {}
                for mono, c in z.terms.items():
                    k = pos.get(n + m, {}).get(alg.index(mono))
                    if k is None:
                        raise DgLieError("bracket leaves the column")
                    res[k] = c
                t[i, j] = res
        if t:
            table[n, m] = t
    labels = {n: [alg.format_monomial(alg.basis(n + 1)[i]) for i in idx] for n, idx in keep.items()}
    return DgLie(alg.field, dims, diff, table, labels, check=check)


@dataclass
class CoefficientLie:
    """A finite Lie algebra g given by structure constants ``[x_a, x_b] = Σ c x_k``."""

    names: list
    constants: dict = field(default_factory=dict)   # (a, b) -> {k: c}

    @property
    def dim(self):
        return len(self.names)

    def bracket(self, a, b):
        return self.constants.get((a, b), {})


def tensor_dg_lie(g: CoefficientLie, algebra, d, check: bool = True) -> DgLie:
    """g ⊗ Ω for a commutative dg-algebra (Ω, d): [x⊗α, y⊗β] = [x,y]⊗αβ."""
    f = algebra.field
    n_g = g.dim
    dims = {n: n_g * algebra.dim(n) for n in algebra.degrees}
    diff = {}
    for n in algebra.degrees:
        blk = d.block(n)
        entries = {}
        for (r, c), v in blk.entries.items():
            for a in range(n_g):
                entries[r * n_g + a, c * n_g + a] = v
        diff[n] = SparseMatrix(dims.get(n + 1, 0), dims[n], entries, f)
    table = {}
    for n, m in itertools.product(algebra.degrees, repeat=2):
        t = {}
        for i1, m1 in enumerate(algebra.basis(n)):
            for i2, m2 in enumerate(algebra.basis(m)):
                prod = algebra.mono_mul(m1, m2)
                if prod is None:
                    continue
                sign, mono = prod
                k0 = algebra.index(mono) * n_g
                for a in range(n_g):
                    for bb in range(n_g):
                        res = {k0 + k: f(c) * sign for k, c in g.bracket(a, bb).items() if c}
                        if res:
                            t[i1 * n_g + a, i2 * n_g + bb] = res
        if t:
            table[n, m] = t
    labels = {n: [f"{g.names[a]}⊗{algebra.format_monomial(mono)}"
                  for mono in algebra.basis(n) for a in range(n_g)] for n in algebra.degrees}
    return DgLie(f, dims, diff, table, labels, check=check)


# -- Maurer-Cartan ---------------------------------------------------------

@dataclass
class DeformationSeries:
    coefficients: list          # ξ_1 .. ξ_N as coordinate vectors in L^1
    order: int
    method: str
    solved: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"order": self.order, "method": self.method, "solved": self.solved,
                "coefficients": [[format_scalar(c) for c in v] for v in self.coefficients],
                "notes": list(self.notes)}


@dataclass
class Obstruction:
    order: int
    class_coordinates: list
    witness: list               # R_k in L^2 coordinates
    partial: list = field(default_factory=list)

    def to_dict(self):
        return {"order": self.order,
                "class": [format_scalar(c) for c in self.class_coordinates],
                "witness": [format_scalar(c) for c in self.witness]}


def _check_char(l: DgLie):
    if l.field.characteristic() == 2:
        raise MCError("characteristic 2 is unsupported (the Maurer-Cartan equation needs 1/2)")


def first_order_representative(l: DgLie, alpha):
    h1 = l.homology(1)
    if len(alpha) != h1.dim:
        raise MCError(f"class has {len(alpha)} coordinates but H^1 has dimension {h1.dim}")
    f = l.field
    xi = zero_vector(l.dim(1), f)
    for a, rep in zip(alpha, h1.representatives):
        a = f(a)
        if a:
            xi = _add(xi, _scale(a, rep))
    return xi


def mc_rhs(l: DgLie, xis):
    """R_k = -½ Σ_{i+j=k} [ξ_i, ξ_j] for k = len(xis) + 1."""
    f = l.field
    k = len(xis) + 1
    acc = zero_vector(l.dim(2), f)
    for i in range(1, k):
        acc = _add(acc, l.bracket(1, xis[i - 1], 1, xis[k - i - 1]))
    return _scale(f(-1) / 2, acc)


def mc_residual(l: DgLie, xis) -> list:
    """∂ξ_k + ½ Σ_{i+j=k}[ξ_i, ξ_j] for every k <= N, by direct substitution."""
    f = l.field
    half = f(1) / 2
    n = len(xis)
    out = []
    for k in range(1, n + 1):
        r = l.d(1) @ xis[k - 1]
        for i in range(1, k):
            j = k - i
            r = _add(r, _scale(half, l.bracket(1, xis[i - 1], 1, xis[j - 1])))
        out.append(r)
    return out


def verify_series(l: DgLie, xis) -> bool:
    return all(is_zero_vector(r) for r in mc_residual(l, xis))


def solve_mc(l: DgLie, alpha, N: int, method: str = "generic"):
    """Solve the recursive Maurer-Cartan system to order N.

    ``generic`` takes the deterministic ``solve`` solution at each order;
    ``homotopy`` takes ``-h(R_k)`` from the fixed contraction of
    :func:`bvtt.transfer.build_contraction`.
    """
    _check_char(l)
    if method not in ("generic", "homotopy"):
        raise MCError(f"unknown method {method!r}")
    xis = [first_order_representative(l, alpha)]
    d1, d2 = l.d(1), l.d(2)
    h2 = l.homology(2)
    contraction = None
    if method == "homotopy":
        from .transfer import build_contraction
        contraction = build_contraction(l)
    for k in range(2, N + 1):
        R = mc_rhs(l, xis)
        if not is_zero_vector(d2 @ R):
            raise MCError(f"∂R_{k} != 0: the bracket is not a dg-Lie bracket")
        if method == "generic":
            x = solve(d1, R)
        else:
            if any(contraction.q(2, R)):
                x = None
            else:
                x = _scale(l.field(-1), contraction.h(2, R))
        if x is None:
            return Obstruction(k, h2.project(R), R, xis)
        xis.append(x)
    if not verify_series(l, xis):
        raise MCError("re-substitution failed: solver produced a non-solution")
    return DeformationSeries(xis, N, method)


def tt_solve_mc(b: BVStructure, alpha, N: int):
    """Solver keeping ξ_k ∈ Ker(Δ) and ξ_k ∈ Im(Δ) for k >= 2, via the dΔ-lemma."""
    cert = dd_lemma(b)
    if not cert:
        raise MCError(f"dΔ-lemma fails in degree {cert.failing_degree}")
    l = to_dg_lie(b)
    _check_char(l)
    d, delta = b.d, b.delta
    f = b.field
    rep = first_order_representative(l, alpha)
    # move the representative into Ker(Δ): Δ(rep + d y) = 0
    y = solve(delta.block(2) @ d.block(1), _scale(f(-1), delta.block(2) @ rep))
    if y is None:
        series = solve_mc(l, alpha, N)
        if isinstance(series, DeformationSeries):
            series.notes.append("no Ker(Δ) representative; fell back to the generic solver")
        return series
    xi1 = _add(rep, d.block(1) @ y) if y else rep
    xis = [xi1]
    dD = d.block(2) @ delta.block(3)
    for k in range(2, N + 1):
        R = mc_rhs(l, xis)
        if not is_zero_vector(d.block(3) @ R):
            raise MCError(f"∂R_{k} != 0")
        sigma = solve(dD, R)
        if sigma is None:
            raise MCError(f"R_{k} is not dΔ-exact although the dΔ-lemma holds")
        xis.append(delta.block(3) @ sigma)
    if not verify_series(l, xis):
        raise MCError("re-substitution failed")
    for k, x in enumerate(xis, start=1):
        if any(delta.block(2) @ x):
            raise MCError(f"ξ_{k} is not Δ-closed")
    return DeformationSeries(xis, N, "tt")


@dataclass
class ProbeReport:
    p: int
    order: int
    results: list           # per H^1 basis class: DeformationSeries | Obstruction

    @property
    def all_solved(self):
        return all(isinstance(r, DeformationSeries) for r in self.results)

    def to_dict(self):
        return {"p": self.p, "order": self.order, "all_solved": self.all_solved,
                "classes": [{"index": i, "solved": isinstance(r, DeformationSeries),
                             **({"obstruction": r.to_dict()} if isinstance(r, Obstruction) else {})}
                            for i, r in enumerate(self.results)]}


def char_p_probe(l: DgLie, classes=None) -> ProbeReport:
    """Solve to order p-1 (i.e. modulo t^p) for every basis class of H^1, or for ``classes``."""
    p = l.field.characteristic()
    if p < 5:
        raise MCError(f"the probe needs a prime p >= 5, got characteristic {p}")
    if classes is None:
        dim = l.homology(1).dim
        classes = [[1 if j == i else 0 for j in range(dim)] for i in range(dim)]
    return ProbeReport(p, p - 1, [solve_mc(l, alpha, p - 1) for alpha in classes])
