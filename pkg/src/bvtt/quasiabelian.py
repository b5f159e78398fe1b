"""The dΔ-lemma, the Ker(Δ) zig-zag certificate and the induced bracket on H(A, d)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bv import BracketTable, BVStructure
from .linalg import (SparseMatrix, contains, echelon_basis, homology, image_basis, intersect,
                     kernel_basis, quotient_basis, rank, same_subspace, solve)


class CertificateError(ValueError):
    pass


@dataclass
class DdCertificate:
    verdict: bool
    by_degree: dict = field(default_factory=dict)   # n -> dict of bases
    failing_degree: int | None = None

    def __bool__(self):
        return self.verdict


def dd_lemma(b: BVStructure) -> DdCertificate:
    """Ker(d)∩Im(Δ) = Ker(Δ)∩Im(d) = Im(dΔ), degree by degree."""
    alg = b.algebra
    f = b.field
    d, delta = b.d, b.delta
    out = {}
    verdict, failing = True, None
    for n in alg.degrees:
        dim = alg.dim(n)
        ker_d = kernel_basis(d.block(n))
        ker_D = kernel_basis(delta.block(n))
        im_D = image_basis(delta.block(n + 1))
        im_d = image_basis(d.block(n - 1))
        im_dD = image_basis(d.block(n - 1) @ delta.block(n))
        a = intersect(ker_d, im_D, dim, f)
        c = intersect(ker_D, im_d, dim, f)
        ok = same_subspace(a, c, dim, f) and same_subspace(a, im_dD, dim, f)
        out[n] = {"ker_d_im_delta": a, "ker_delta_im_d": c, "im_d_delta": echelon_basis(im_dD, dim, f),
                  "ok": ok}
        if not ok and verdict:
            verdict, failing = False, n
    return DdCertificate(verdict, out, failing)


@dataclass
class ZigZagCertificate:
    """Ker(Δ) ↪ A and Ker(Δ) → H_Δ(A) with their homology data."""

    kernel_bases: dict            # n -> basis of Ker(Δ) in A^n
    inclusion: dict               # n -> matrix A^n <- Ker(Δ)^n
    projection: dict              # n -> matrix H_Δ^n <- Ker(Δ)^n
    betti_A: dict
    betti_kernel: dict
    betti_H_delta: dict
    inclusion_ranks: dict
    projection_ranks: dict
    brackets_checked: int
    valid: bool
    problems: list

    def __bool__(self):
        return self.valid


def zigzag_certificate(b: BVStructure) -> ZigZagCertificate:
    cert = dd_lemma(b)
    if not cert:
        raise CertificateError(f"dΔ-lemma fails in degree {cert.failing_degree}")
    alg = b.algebra
    f = b.field
    d, delta = b.d, b.delta
    degs = alg.degrees
    problems = []
    K = {n: kernel_basis(delta.block(n)) for n in degs}
    incl = {n: SparseMatrix.from_columns(K[n], alg.dim(n), f) for n in degs}
    # d restricted to Ker(Δ), written in Ker(Δ) coordinates
    dK = {}
    for n in degs:
        tgt = incl.get(n + 1)
        cols = []
        for v in K[n]:
            w = d.block(n) @ v
            if tgt is None or not tgt.ncols:
                if any(w):
                    problems.append(f"d leaves Ker(Δ) in degree {n}")
                cols.append([])
                continue
            x = solve(tgt, w)
            if x is None:
                problems.append(f"d leaves Ker(Δ) in degree {n}")
                x = [f.zero] * tgt.ncols
            cols.append(x)
        dK[n] = SparseMatrix.from_columns(cols, len(K.get(n + 1, [])), f)
    # chain map check for the inclusion: d∘incl = incl∘dK
    for n in degs:
        if n + 1 in incl and incl[n].ncols:
            if d.block(n) @ incl[n] != incl[n + 1] @ dK[n]:
                problems.append(f"inclusion is not a chain map in degree {n}")

    # H_Δ = Ker(Δ) / Im(Δ), coordinates relative to the Ker(Δ) basis
    proj, hdelta = {}, {}
    for n in degs:
        kn = len(K[n])
        im = image_basis(delta.block(n + 1))
        im_coords = []
        for v in im:
            x = solve(incl[n], v)
            if x is None:
                problems.append(f"Im(Δ) not inside Ker(Δ) in degree {n}")
                continue
            im_coords.append(x)
        zero_in = SparseMatrix.from_columns(im_coords, kn, f) if kn else SparseMatrix.zeros(0, 0, f)
        h = homology(zero_in, SparseMatrix.zeros(0, kn, f))
        hdelta[n] = h.dim
        proj[n] = h.projection if kn else SparseMatrix.zeros(0, 0, f)
        # induced differential on H_Δ must vanish: proj ∘ dK = 0
        if n - 1 in dK and len(K[n - 1]) and kn:
            if not (proj[n] @ dK[n - 1]).is_zero():
                problems.append(f"d does not vanish on H_Δ in degree {n}")

    def betti(blocks, dims):
        out = {}
        for n in degs:
            din = blocks.get(n - 1) or SparseMatrix.zeros(dims(n), dims(n - 1), f)
            dout = blocks.get(n) or SparseMatrix.zeros(dims(n + 1), dims(n), f)
            out[n] = homology(din, dout)
        return out

    HA = betti({n: d.block(n) for n in degs} | {min(degs) - 1: d.block(min(degs) - 1)}, alg.dim)
    HK = betti(dK, lambda n: len(K.get(n, [])))
    inc_ranks, proj_ranks = {}, {}
    for n in degs:
        hk, ha = HK[n], HA[n]
        if hk.dim:
            cols = [ha.project(incl[n] @ v) for v in hk.representatives]
            inc_ranks[n] = rank(SparseMatrix.from_columns(cols, ha.dim, f)) if ha.dim else 0
            pc = [proj[n] @ v for v in hk.representatives]
            proj_ranks[n] = rank(SparseMatrix.from_columns(pc, hdelta[n], f)) if hdelta[n] else 0
        else:
            inc_ranks[n] = proj_ranks[n] = 0
        if not (hk.dim == ha.dim == hdelta[n] == inc_ranks[n] == proj_ranks[n]):
            problems.append(f"not a quasi-isomorphism in degree {n}: H(KerΔ)={hk.dim}, "
                            f"H(A)={ha.dim}, H_Δ={hdelta[n]}, ranks {inc_ranks[n]}/{proj_ranks[n]}")

    # brackets of Ker(Δ) elements land in Im(Δ)
    br = BracketTable(b)
    checked = 0
    for n in degs:
        for m in degs:
            for u in K[n]:
                x = alg.from_vector(u, n)
                for v in K[m]:
                    y = alg.from_vector(v, m)
                    z = br(x, y)
                    checked += 1
                    if z.is_zero():
                        continue
                    t = n + m - 1
                    zv = alg.to_vector(z, t)
                    if not contains(image_basis(delta.block(t + 1)), [zv], alg.dim(t), f):
                        problems.append(f"bracket of Ker(Δ) elements in degrees {n},{m} not in Im(Δ)")
    return ZigZagCertificate(
        kernel_bases=K, inclusion=incl, projection=proj,
        betti_A={n: HA[n].dim for n in degs}, betti_kernel={n: HK[n].dim for n in degs},
        betti_H_delta=hdelta, inclusion_ranks=inc_ranks, projection_ranks=proj_ranks,
        brackets_checked=checked, valid=not problems, problems=problems)


@dataclass
class InducedBracket:
    table: dict          # (n, i, m, j) -> coordinates in H^(n+m-1)
    is_zero: bool
    representatives: dict


def homology_of_d(b: BVStructure) -> dict:
    d = b.d
    return {n: homology(d.block(n - 1), d.block(n)) for n in b.algebra.degrees}


def induced_bracket_on_homology(b: BVStructure) -> InducedBracket:
    """Brackets of closed representatives, projected back to H(A, d)."""
    alg = b.algebra
    hs = homology_of_d(b)
    br = BracketTable(b)
    table = {}
    zero = True
    for n, hn in hs.items():
        for m, hm in hs.items():
            t = n + m - 1
            for i, u in enumerate(hn.representatives):
                x = alg.from_vector(u, n)
                for j, v in enumerate(hm.representatives):
                    y = alg.from_vector(v, m)
                    z = br(x, y)
                    if t not in hs:
                        if not z.is_zero():
                            raise CertificateError("bracket leaves the algebra's degrees")
                        continue
                    zv = alg.to_vector(z, t) if not z.is_zero() else [alg.field.zero] * alg.dim(t)
                    if any(b.d.block(t) @ zv):
                        raise CertificateError("bracket of cycles is not a cycle; d is not a derivation of it")
                    coords = hs[t].project(zv)
                    table[n, i, m, j] = coords
                    if any(coords):
                        zero = False
    return InducedBracket(table, zero, {n: h.representatives for n, h in hs.items()})
