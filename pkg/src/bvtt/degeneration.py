"""The negative cyclic complex (A ⊗ K[u]/u^(M+1), d + uΔ), its u-adic spectral
sequence, and the two degeneration tests (E₁-degeneration and u-freeness).

Cohomological convention: u has degree +2, so the total degree n part is
⊕_j A^(n-2j) u^j and d + uΔ raises n by one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .bv import BVStructure, verify_bv
from .linalg import (SparseMatrix, echelon_basis, homology, kernel_basis, quotient_basis,
                     rank, span_rank)


class DegenerationError(ValueError):
    pass


def default_truncation(b: BVStructure) -> int:
    return -(-b.algebra.cap // 2) + 1


def max_truncation() -> int:
    return int(os.environ.get("BTT_MAX_U", "12"))


@dataclass
class NegativeCyclicComplex:
    base: BVStructure
    M: int
    slices: dict = field(init=False)

    def __post_init__(self):
        alg = self.base.algebra
        degs = alg.degrees
        self.lo, self.hi = min(degs), max(degs) + 2 * self.M
        # slices[n] = [(j, A-degree, offset), ...]
        self.slices = {}
        for n in range(self.lo - 1, self.hi + 2):
            off = 0
            row = []
            for j in range(self.M + 1):
                a = n - 2 * j
                dim = alg.dim(a)
                if dim:
                    row.append((j, a, off))
                    off += dim
            self.slices[n] = row
        self._diff = {}

    @property
    def degrees(self):
        return list(range(self.lo, self.hi + 1))

    def dim(self, n) -> int:
        row = self.slices.get(n, [])
        return sum(self.base.algebra.dim(a) for _, a, _ in row)

    def slice_range(self, n, j):
        """Coordinate range of the u^j slice in total degree n."""
        for jj, a, off in self.slices.get(n, []):
            if jj == j:
                return off, off + self.base.algebra.dim(a)
        return None

    def filtration_start(self, n, p) -> int:
        """First coordinate of F^p (slices j >= p) in total degree n."""
        for j, _, off in self.slices.get(n, []):
            if j >= p:
                return off
        return self.dim(n)

    def differential(self, n) -> SparseMatrix:
        """d + uΔ from total degree n to n+1 (u^(M+1) dropped)."""
        if n in self._diff:
            return self._diff[n]
        b = self.base
        alg = b.algebra
        entries = {}
        for j, a, off in self.slices.get(n, []):
            tgt = self.slice_range(n + 1, j)
            if tgt is not None:
                for (r, c), v in b.d.block(a).entries.items():
                    entries[tgt[0] + r, off + c] = v
            if j + 1 <= self.M:
                tgt = self.slice_range(n + 1, j + 1)
                if tgt is not None:
                    for (r, c), v in b.delta.block(a).entries.items():
                        entries[tgt[0] + r, off + c] = v
        m = SparseMatrix(self.dim(n + 1), self.dim(n), entries, alg.field)
        self._diff[n] = m
        return m

    def u_map(self, n) -> SparseMatrix:
        """Multiplication by u from total degree n to n+2."""
        entries = {}
        alg = self.base.algebra
        for j, a, off in self.slices.get(n, []):
            tgt = self.slice_range(n + 2, j + 1)
            if tgt is not None:
                for i in range(alg.dim(a)):
                    entries[tgt[0] + i, off + i] = 1
        return SparseMatrix(self.dim(n + 2), self.dim(n), entries, alg.field)

    def is_complex(self) -> bool:
        return all((self.differential(n + 1) @ self.differential(n)).is_zero()
                   for n in range(self.lo - 1, self.hi + 1))

    def total_homology(self):
        return {n: homology(self.differential(n - 1), self.differential(n)) for n in self.degrees}


def build_cyclic(b: BVStructure, M: int | None = None, check: bool = True) -> NegativeCyclicComplex:
    if check:
        rep = verify_bv(b, brackets=False)
        if not rep.ok:
            raise DegenerationError(f"not a BV structure: {rep.failures[0]['what']}")
    c = NegativeCyclicComplex(b, default_truncation(b) if M is None else M)
    if not c.is_complex():
        raise DegenerationError("(d + uΔ)² != 0")
    return c


# -- spectral sequence ---------------------------------------------------

@dataclass
class SpectralPage:
    r: int
    dims: dict                      # (p, n) -> dim E_r^{p,n}
    bases: dict | None = None       # (p, n) -> subquotient representatives

    @property
    def total(self):
        return sum(self.dims.values())


def _embed(vecs, start, total, field):
    zero = field.zero
    out = []
    for v in vecs:
        w = [zero] * total
        w[start:start + len(v)] = v
        out.append(w)
    return out


class _Pages:
    def __init__(self, c: NegativeCyclicComplex):
        self.c = c
        self.f = c.base.field
        self._z = {}

    def Z(self, r, p, n):
        """Basis of {x ∈ F^p C^n : Dx ∈ F^(p+r)}."""
        key = (r, p, n)
        if key in self._z:
            return self._z[key]
        c = self.c
        target = p + r
        p = max(p, 0)
        dim = c.dim(n)
        start = c.filtration_start(n, p)
        if start >= dim:
            self._z[key] = []
            return []
        D = c.differential(n)
        lo = c.filtration_start(n + 1, p)
        hi = c.filtration_start(n + 1, max(target, p))
        sub = SparseMatrix(hi - lo, dim - start,
                           {(i - lo, j - start): v for (i, j), v in D.entries.items()
                            if lo <= i < hi and j >= start}, self.f)
        ker = kernel_basis(sub)
        res = _embed(ker, start, dim, self.f)
        self._z[key] = res
        return res

    def B(self, r, p, n):
        """D(Z_r^(p-r, n-1)): boundaries landing in F^p."""
        src = self.Z(r, p - r, n - 1)
        if not src:
            return []
        D = self.c.differential(n - 1)
        return [D @ v for v in src]

    def page(self, r, with_bases=False) -> SpectralPage:
        c = self.c
        dims, bases = {}, {} if with_bases else None
        for n in c.degrees:
            for p in range(c.M + 1):
                if c.filtration_start(n, p) >= c.dim(n):
                    continue
                z = self.Z(r, p, n)
                if not z:
                    continue
                killed = self.Z(r - 1, p + 1, n) + self.B(r - 1, p, n)
                dim = c.dim(n)
                dz = span_rank(z, dim, self.f)
                dk = span_rank(killed, dim, self.f) if killed else 0
                if dz - dk:
                    dims[p, n] = dz - dk
                    if with_bases:
                        bases[p, n] = quotient_basis(echelon_basis(killed, dim, self.f), z, dim, self.f)
        return SpectralPage(r, dims, bases)


def spectral_pages(c: NegativeCyclicComplex, with_bases=False) -> list:
    """Pages E_1 .. E_R of the u-adic filtration; E_R = E_∞.

    A differential d_r changes the A-degree by 1 - 2r, so r never exceeds
    (span + 1) / 2 where span is the spread of A-degrees, nor M.
    """
    degs = c.base.algebra.degrees
    span = max(degs) - min(degs)
    R = min((span + 1) // 2, c.M) + 1
    pg = _Pages(c)
    return [pg.page(r, with_bases) for r in range(1, R + 1)]


def induced_delta_on_homology(b: BVStructure) -> dict:
    """Matrices of the map H^n(A, d) -> H^(n-1)(A, d) induced by Δ (the d₁ differential)."""
    alg = b.algebra
    hs = {n: homology(b.d.block(n - 1), b.d.block(n)) for n in alg.degrees}
    out = {}
    for n in alg.degrees:
        h = hs[n]
        if not h.dim or (n - 1) not in hs:
            continue
        tgt = hs[n - 1]
        cols = [tgt.project(b.delta.block(n) @ v) for v in h.representatives]
        out[n] = SparseMatrix.from_columns(cols, tgt.dim, b.field)
    return out


@dataclass
class DegenerationResult:
    verdict: bool | None           # None = inconclusive
    M: int
    certificate: dict

    def __bool__(self):
        return bool(self.verdict)


def _e1_verdict(b, M, pages=True):
    """E₁ = E_∞ bidegree-wise.

    Since E_∞ is a subquotient of E₁ in each bidegree and Σ E_∞ = dim H(total),
    the totals decide; ``pages`` also builds every page for the certificate
    and cross-checks the two readings.
    """
    c = build_cyclic(b, M, check=False)
    tot = {n: h.dim for n, h in c.total_homology().items() if h.dim}
    hd = {a: homology(b.d.block(a - 1), b.d.block(a)).dim for a in b.algebra.degrees}
    e1_total = sum(hd[n - 2 * p] for n in c.degrees for p in range(M + 1) if n - 2 * p in hd)
    ok = e1_total == sum(tot.values())
    cert = {"M": M, "E1_total": e1_total, "total_homology": tot}
    if not pages:
        return ok, cert
    pgs = spectral_pages(c)
    e1, einf = pgs[0], pgs[-1]
    if einf.total != sum(tot.values()) or e1.total != e1_total:
        raise DegenerationError("spectral pages disagree with the total-complex homology")
    if (e1.dims == einf.dims) != ok:
        raise DegenerationError("page comparison disagrees with the dimension count")
    cert.update({
        "pages": len(pgs),
        "E1": {f"{p},{n}": v for (p, n), v in sorted(e1.dims.items())},
        "Einf": {f"{p},{n}": v for (p, n), v in sorted(einf.dims.items())},
        "first_nonzero_differential": next(
            (pg.r - 1 for pg in pgs[1:] if pg.dims != pgs[0].dims), None),
    })
    return ok, cert


def _stabilised(b, fn, M):
    # (d + uΔ)² = 0 needs only d² = 0, Δ² = 0 and [d, Δ] = 0
    check = verify_bv(b, brackets=False)
    if not check.ok:
        raise DegenerationError(f"not a BV structure: {check.failures[0]['what']}")
    M = default_truncation(b) if M is None else M
    cap = max(max_truncation(), M + 1)
    while M + 1 <= cap:
        v0, c0 = fn(b, M)
        v1, _ = fn(b, M + 1, False)
        if v0 == v1:
            return DegenerationResult(v0, M, c0)
        M += 1
    return DegenerationResult(None, M, {"reason": "verdict not stable below truncation cap", "cap": cap})


def degenerates_at_E1(b: BVStructure, M: int | None = None) -> DegenerationResult:
    """E₁ = E_∞ in every bidegree, confirmed at truncations M and M+1."""
    return _stabilised(b, _e1_verdict, M)


def _free_verdict(b, M, full=True):
    c = build_cyclic(b, M, check=False)
    hs = c.total_homology()
    total = 0
    urank = 0
    for n, h in hs.items():
        total += h.dim
        tgt = hs.get(n + 2)
        if h.dim and tgt is not None and tgt.dim:
            U = c.u_map(n)
            cols = [tgt.project(U @ v) for v in h.representatives]
            urank += rank(SparseMatrix.from_columns(cols, tgt.dim, b.field))
    generators = total - urank
    ok = total == (M + 1) * generators
    return ok, {"M": M, "length": total, "generators": generators, "u_rank": urank}


def u_freeness(b: BVStructure, M: int | None = None) -> DegenerationResult:
    """Is H(A ⊗ K[u]/u^(M+1), d + uΔ) free over K[u]/u^(M+1)?"""
    return _stabilised(b, _free_verdict, M)
