"""BV and BV∞ structures: containers, axiom checks, the derived bracket and
the geometric constructors (Koszul/Poisson, Jacobi, generalized Poisson and
the Λ-generated hierarchy Δ_k = ad_Λ^k(d) / k!)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

from .algebra import Algebra, Element
from .operators import (GradedOperator, LieStructure, MultiVector, commutator,
                        interior_product, is_derivation, commutator_witness,
                        lie_from_ce, schouten)
from .report import Report


class StructureError(ValueError):
    pass


def _nonzero_witness(op: GradedOperator):
    """First basis monomial on which ``op`` is nonzero, formatted, or None."""
    alg = op.algebra
    for deg in sorted(op.blocks):
        cols = sorted({c for (_, c) in op.blocks[deg].entries})
        if cols:
            return alg.format_monomial(alg.basis(deg)[cols[0]])
    return None


@dataclass
class BVStructure:
    """A graded-commutative algebra with differential ``d`` and operators Δ₁, Δ₂, ….

    ``d`` has degree +1 and Δ₁ degree -1.  Higher Δ_k may have any negative
    degree: Λ-hierarchies and Jacobi structures give degree 1-2k,
    generalized Poisson structures give degree -k.
    """

    algebra: Algebra
    d: GradedOperator
    deltas: list = field(default_factory=list)
    lam: GradedOperator | None = None
    name: str = ""

    def __post_init__(self):
        alg = self.algebra
        if self.d.algebra != alg:
            raise StructureError("d lives on another algebra")
        if not self.d.is_zero() and self.d.shift != 1:
            raise StructureError(f"d must have degree +1, got {self.d.shift}")
        self.deltas = list(self.deltas)
        for k, dk in enumerate(self.deltas, start=1):
            if dk.algebra != alg:
                raise StructureError(f"Δ{k} lives on another algebra")
            if dk.is_zero():
                continue
            if k == 1 and dk.shift != -1:
                raise StructureError(f"Δ1 must have degree -1, got {dk.shift}")
            if dk.shift >= 0:
                raise StructureError(f"Δ{k} must lower degree, got {dk.shift}")
        if self.lam is not None and not self.lam.is_zero() and self.lam.shift != -2:
            raise StructureError(f"Λ must have degree -2, got {self.lam.shift}")

    @property
    def field(self):
        return self.algebra.field

    @property
    def delta(self) -> GradedOperator:
        """Δ := Δ₁ (the zero operator when absent)."""
        if self.deltas:
            return self.deltas[0]
        return GradedOperator.zero(self.algebra, -1)

    def delta_k(self, k: int) -> GradedOperator:
        if k == 0:
            return self.d
        if k <= len(self.deltas):
            return self.deltas[k - 1]
        return GradedOperator.zero(self.algebra, 1 - 2 * k)

    @property
    def is_classical(self):
        return all(dk.is_zero() for dk in self.deltas[1:])

    def over(self, field) -> "BVStructure":
        """Reduce every operator to another field (entries must reduce)."""
        alg = self.algebra.over(field)

        def red(op):
            if op is None:
                return None
            from .linalg import SparseMatrix
            return GradedOperator(alg, op.shift, {
                d: SparseMatrix(m.nrows, m.ncols, m.entries, field) for d, m in op.blocks.items()})

        return BVStructure(alg, red(self.d), [red(x) for x in self.deltas], red(self.lam), self.name)


# -- constructors -----------------------------------------------------------

def _order_witness(alg, w):
    names, mono = w
    return {"generators": list(names), "on": alg.format_monomial(mono)}


def check_differential(d: GradedOperator):
    if not (d @ d).is_zero():
        raise StructureError(f"d² != 0 (witness {_nonzero_witness(d @ d)})")
    if not is_derivation(d):
        raise StructureError("d is not a derivation")


def koszul_structure(algebra, d, pi: MultiVector, name="") -> BVStructure:
    """Koszul's BV operator Δ = [i_π, d] of a bivector."""
    if not pi.is_zero() and pi.arity != 2:
        raise StructureError(f"π must be a bivector, got arity {pi.arity}")
    return BVStructure(algebra, d, [commutator(interior_product(pi), d)], name=name)


def build_hierarchy(algebra: Algebra, d: GradedOperator, lam: GradedOperator, name="") -> BVStructure:
    """Δ_k = ad_Λ^k(d) / k! for a degree -2 operator Λ of order <= 2."""
    check_differential(d)
    if lam.is_zero():
        return BVStructure(algebra, d, [GradedOperator.zero(algebra, -1)], lam, name)
    if lam.shift != -2:
        raise StructureError(f"Λ must have degree -2, got {lam.shift}")
    if commutator_witness(lam, 3) is not None:
        raise StructureError("not second order: Λ has Koszul order > 2")
    p = algebra.field.characteristic()
    deltas = []
    ad = d
    k = 0
    while True:
        k += 1
        ad = commutator(lam, ad)
        if ad.is_zero():
            break
        if p and k >= p:
            raise StructureError(f"factorial not invertible: Δ{k} needs 1/{k}! in F_{p}")
        deltas.append(ad.scale(algebra.field(1) / factorial(k)))
    if not deltas:
        deltas = [GradedOperator.zero(algebra, -1)]
    return BVStructure(algebra, d, deltas, lam, name)


class JacobiConditionError(StructureError):
    pass


def jacobi_structure(algebra, d, pi: MultiVector, eta: MultiVector, name="") -> BVStructure:
    """Δ₁ = [i_π, d], Δ₂ = -i_η i_π, given [π,π] = 2 η∧π and [π,η] = 0."""
    lie = lie_from_ce(algebra, d)
    lie.check()
    pp = schouten(pi, pi, lie)
    want = eta.wedge(pi).scale(2)
    if pp != want:
        raise JacobiConditionError(f"[π,π] = {pp} but 2η∧π = {want}")
    pe = schouten(pi, eta, lie)
    if not pe.is_zero():
        raise JacobiConditionError(f"[π,η] = {pe} != 0")
    ip = interior_product(pi)
    d1 = commutator(ip, d)
    d2 = -(interior_product(eta) @ ip)
    return BVStructure(algebra, d, [d1, d2], name=name)


def generalized_poisson(algebra, d, pis, name="") -> BVStructure:
    """Δ_k = [i_{π_k}, d] where π_k is a (k+1)-vector."""
    deltas = []
    for k, pk in enumerate(pis, start=1):
        if not pk.is_zero() and pk.arity != k + 1:
            raise StructureError(f"π{k} must have arity {k + 1}, got {pk.arity}")
        op = commutator(interior_product(pk), d)
        if op.is_zero():
            op = GradedOperator.zero(algebra, -k)
        deltas.append(op)
    if not deltas:
        deltas = [GradedOperator.zero(algebra, -1)]
    return BVStructure(algebra, d, deltas, name=name)


# -- verification -----------------------------------------------------------

def hierarchy_relation(b: BVStructure, n: int) -> dict:
    """Σ_{i+j=n} Δ_i Δ_j split by operator degree (Δ₀ = d)."""
    parts = {}
    for i in range(n + 1):
        term = b.delta_k(i) @ b.delta_k(n - i)
        if term.is_zero():
            continue
        s = term.shift
        parts[s] = parts[s] + term if s in parts else term
    return parts


def verify_bv_infinity(b: BVStructure) -> Report:
    rep = Report("bv_infinity")
    top = 2 * len(b.deltas)
    for n in range(top + 1):
        for shift, op in sorted(hierarchy_relation(b, n).items()):
            if not op.is_zero():
                rep.fail("hierarchy relation", n=n, degree=shift, witness=_nonzero_witness(op))
    w = commutator_witness(b.d, 2)
    if w is not None:
        rep.fail("d is not a derivation", witness=_order_witness(b.algebra, w))
    for k, dk in enumerate(b.deltas, start=1):
        w = commutator_witness(dk, k + 2)
        if w is not None:
            rep.fail("operator order", k=k, bound=k + 1, witness=_order_witness(b.algebra, w))
    rep.details["relations_checked"] = top + 1
    rep.details["delta_degrees"] = [dk.shift for dk in b.deltas]
    return rep


def conjugation_coefficients(b: BVStructure) -> list:
    """Coefficients of z^k in e^{zΛ} d e^{-zΛ}, from the exponential series directly."""
    alg = b.algebra
    lam = b.lam if b.lam is not None else GradedOperator.zero(alg, -2)
    f = alg.field
    powers = [GradedOperator.identity(alg)]
    while not powers[-1].is_zero():
        powers.append(lam @ powers[-1])
    powers.pop()
    top = 2 * (len(powers) - 1)
    coeffs = []
    for k in range(top + 1):
        acc = GradedOperator.zero(alg, 1 - 2 * k)
        for a in range(k + 1):
            c = k - a
            if a >= len(powers) or c >= len(powers):
                continue
            sign = -1 if c % 2 else 1
            term = (powers[a] @ b.d @ powers[c]).scale(f(sign) / (factorial(a) * factorial(c)))
            acc = acc + term
        coeffs.append(acc)
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def verify_conjugation_identity(b: BVStructure) -> Report:
    """``e^{zΛ} d e^{-zΛ} = Σ z^k Δ_k`` coefficientwise."""
    rep = Report("conjugation_identity")
    if b.lam is None:
        rep.fail("no Λ present")
        return rep
    coeffs = conjugation_coefficients(b)
    top = max(len(coeffs) - 1, len(b.deltas))
    for k in range(top + 1):
        lhs = coeffs[k] if k < len(coeffs) else GradedOperator.zero(b.algebra, 1 - 2 * k)
        if lhs != b.delta_k(k):
            rep.fail("coefficient mismatch", k=k, witness=_nonzero_witness(lhs - b.delta_k(k))
                     if lhs.shift == b.delta_k(k).shift or lhs.is_zero() or b.delta_k(k).is_zero()
                     else None)
    rep.details["z_powers"] = top + 1
    return rep


# -- derived bracket -------------------------------------------------------

def _bracket_homogeneous(delta, a: Element, p: int, c: Element) -> Element:
    sign = -1 if p % 2 else 1
    val = delta(a * c) - delta(a) * c - (a * delta(c)).scale(sign)
    return val.scale(sign)


def derived_bracket(b: BVStructure, alpha: Element, beta: Element) -> Element:
    """``[α, β] = (-1)^|α| (Δ(αβ) - Δ(α)β - (-1)^|α| αΔ(β))``, bilinear."""
    delta = b.delta
    out = b.algebra.zero()
    for p, a in alpha.decompose():
        out = out + _bracket_homogeneous(delta, a, p, beta)
    return out


class BracketTable:
    """Memoised derived bracket on basis monomials."""

    def __init__(self, b: BVStructure):
        self.b = b
        self.alg = b.algebra
        self.cache = {}

    def mono(self, m1, m2) -> Element:
        key = (m1, m2)
        if key not in self.cache:
            alg = self.alg
            self.cache[key] = _bracket_homogeneous(self.b.delta, alg.monomial(m1),
                                                   alg.monomial_degree(m1), alg.monomial(m2))
        return self.cache[key]

    def __call__(self, x: Element, y: Element) -> Element:
        out = self.alg.zero()
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                out = out + self.mono(m1, m2).scale(c1 * c2)
        return out


def verify_bv(b: BVStructure, brackets: bool = True) -> Report:
    """Classical BV axioms plus (with ``brackets``) Jacobi/Leibniz of the derived bracket."""
    rep = Report("bv")
    alg = b.algebra
    if not b.is_classical:
        rep.fail("higher Δ_k present; not a classical BV structure")
        return rep
    d, delta = b.d, b.delta
    if not (d @ d).is_zero():
        rep.fail("d² != 0", witness=_nonzero_witness(d @ d))
    if not is_derivation(d):
        rep.fail("d is not a derivation")
    if not (delta @ delta).is_zero():
        rep.fail("Δ² != 0", witness=_nonzero_witness(delta @ delta))
    dd = commutator(d, delta)
    if not dd.is_zero():
        rep.fail("[d, Δ] != 0", witness=_nonzero_witness(dd))
    w = commutator_witness(delta, 3)
    if w is not None:
        rep.fail("Δ has order > 2", witness=_order_witness(alg, w))
    if not rep.ok or not brackets:
        return rep
    br = BracketTable(b)
    mons = [m for deg in alg.degrees for m in alg.basis(deg)]
    deg = alg.monomial_degree
    for m1, m2 in itertools.product(mons, repeat=2):
        x, y = alg.monomial(m1), alg.monomial(m2)
        lhs = d(br.mono(m1, m2))
        rhs = br(d(x), y) + br(x, d(y)).scale(-1 if (deg(m1) - 1) % 2 else 1)
        if lhs != rhs:
            rep.fail("d is not a derivation of the bracket",
                     witness=[alg.format_monomial(m1), alg.format_monomial(m2)])
            break
    for m1, m2, m3 in itertools.product(mons, repeat=3):
        x, y, z = (alg.monomial(m) for m in (m1, m2, m3))
        a, bb, c = deg(m1), deg(m2), deg(m3)
        s_ab = -1 if ((a - 1) * (bb - 1)) % 2 else 1
        jac = br(x, br.mono(m2, m3)) - br(br.mono(m1, m2), z) - br(y, br.mono(m1, m3)).scale(s_ab)
        if not jac.is_zero():
            rep.fail("graded Jacobi", witness=[alg.format_monomial(m) for m in (m1, m2, m3)])
            break
        s_lb = -1 if ((a - 1) * bb) % 2 else 1
        leib = br(x, y * z) - br.mono(m1, m2) * z - (y * br.mono(m1, m3)).scale(s_lb)
        if not leib.is_zero():
            rep.fail("graded Leibniz", witness=[alg.format_monomial(m) for m in (m1, m2, m3)])
            break
    return rep
