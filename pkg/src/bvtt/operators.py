"""Graded linear operators on a finite graded-commutative algebra.

Sign conventions (used everywhere in the package):

* Koszul rule: moving x past y costs (-1)^(|x||y|), total degree only.
* Graded commutator: ``[s, t] = s∘t - (-1)^(|s||t|) t∘s``.
* Derivations of degree k satisfy ``D(xy) = D(x)y + (-1)^(k|x|) x D(y)``.
* Interior products: ``i_X`` is the degree -1 derivation with
  ``i_X(e_j) = <X, e_j>``, and ``i_{X∧Y} = i_X ∘ i_Y``.  For
  ``π = ∂1∧∂2`` this gives ``i_π(e1 e2) = -1``.
* Koszul deviations: ``Φ¹(a) = t(a) - t(1)a`` and
  ``Φⁿ⁺¹(a1..an, b) = Φⁿ(a1..a(n-1), an·b) - Φⁿ(a1..an)·b
  - (-1)^(|an|(|t|+|a1|+..+|a(n-1)|)) an·Φⁿ(a1..a(n-1), b)``.
  An operator has order <= k when Φᵏ⁺¹ vanishes.
* Lie structure from a Chevalley-Eilenberg differential: if
  ``d e^k = Σ_{i<j} c e^i e^j`` then ``[X_i, X_j]`` has coefficient ``-c`` on
  ``X_k`` (``dθ(X, Y) = -θ([X, Y])``).  With this choice
  ``[[i_P, d], i_Q] = ±i_[P,Q]`` and the Jacobi hierarchy closes exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .algebra import Algebra, AlgebraError, Element
from .linalg import SparseMatrix, inverse


class OperatorError(ValueError):
    pass


class GradedOperator:
    """A linear map of fixed degree, stored as one matrix per source degree."""

    __slots__ = ("algebra", "shift", "blocks")

    def __init__(self, algebra: Algebra, shift: int, blocks=None):
        self.algebra = algebra
        self.shift = shift
        clean = {}
        for deg, m in (blocks or {}).items():
            want = (algebra.dim(deg + shift), algebra.dim(deg))
            if m.shape != want:
                raise OperatorError(f"block at degree {deg} has shape {m.shape}, expected {want}")
            if m.entries:
                clean[deg] = m
        self.blocks = clean

    # -- construction ---------------------------------------------------

    @classmethod
    def zero(cls, algebra, shift=0):
        return cls(algebra, shift)

    @classmethod
    def identity(cls, algebra):
        f = algebra.field
        return cls(algebra, 0, {d: SparseMatrix.identity(algebra.dim(d), f) for d in algebra.degrees})

    @classmethod
    def from_monomial_map(cls, algebra, shift, fn):
        """Operator sending each basis monomial ``m`` to ``fn(m)``."""
        blocks = {}
        for deg in algebra.degrees:
            tgt = deg + shift
            entries = {}
            for j, m in enumerate(algebra.basis(deg)):
                img = fn(m)
                if img is None or img.is_zero():
                    continue
                for mm, c in img.terms.items():
                    if algebra.monomial_degree(mm) != tgt:
                        raise OperatorError(
                            f"image of {algebra.format_monomial(m)} has a term "
                            f"{algebra.format_monomial(mm)} outside degree {tgt}")
                    entries[algebra.index(mm), j] = c
            if entries:
                blocks[deg] = SparseMatrix(algebra.dim(tgt), algebra.dim(deg), entries, algebra.field)
        return cls(algebra, shift, blocks)

    @classmethod
    def multiplication(cls, a: Element):
        """Left multiplication by a homogeneous element."""
        alg = a.algebra
        deg = a.degree if a else 0
        return cls.from_monomial_map(alg, deg, lambda m: a * alg.monomial(m))

    # -- access ---------------------------------------------------------

    def block(self, deg) -> SparseMatrix:
        m = self.blocks.get(deg)
        if m is None:
            alg = self.algebra
            return SparseMatrix.zeros(alg.dim(deg + self.shift), alg.dim(deg), alg.field)
        return m

    def apply(self, x: Element) -> Element:
        if x.algebra != self.algebra:
            raise AlgebraError("operator applied to an element of another algebra")
        alg = self.algebra
        out = alg.zero()
        for deg, part in x.decompose():
            m = self.blocks.get(deg)
            if m is None:
                continue
            out = out + alg.from_vector(m @ alg.to_vector(part, deg), deg + self.shift)
        return out

    __call__ = apply

    def apply_monomial(self, m) -> Element:
        return self.apply(self.algebra.monomial(m))

    def is_zero(self):
        return not self.blocks

    def __eq__(self, other):
        if not isinstance(other, GradedOperator):
            return NotImplemented
        if self.algebra != other.algebra:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.shift == other.shift and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.shift, tuple(sorted(self.blocks.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return f"GradedOperator(shift={self.shift}, blocks={sorted(self.blocks)})"

    # -- arithmetic -----------------------------------------------------

    def _check(self, other):
        if not isinstance(other, GradedOperator):
            raise TypeError(f"expected a GradedOperator, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise OperatorError("operators live on different algebras")

    def __add__(self, other):
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.shift != other.shift:
            raise OperatorError(f"cannot add operators of degrees {self.shift} and {other.shift}")
        degs = set(self.blocks) | set(other.blocks)
        return GradedOperator(self.algebra, self.shift,
                              {d: self.block(d) + other.block(d) for d in degs})

    def __neg__(self):
        return GradedOperator(self.algebra, self.shift, {d: -m for d, m in self.blocks.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return GradedOperator(self.algebra, self.shift, {d: m.scale(s) for d, m in self.blocks.items()})

    def __matmul__(self, other):
        """Composition ``self ∘ other``."""
        self._check(other)
        shift = self.shift + other.shift
        blocks = {}
        for d, m in other.blocks.items():
            s = self.blocks.get(d + other.shift)
            if s is not None:
                blocks[d] = s @ m
        return GradedOperator(self.algebra, shift, blocks)

    def power(self, n):
        out = GradedOperator.identity(self.algebra)
        for _ in range(n):
            out = self @ out
        return out


def commutator(s: GradedOperator, t: GradedOperator) -> GradedOperator:
    """Graded commutator ``s∘t - (-1)^(|s||t|) t∘s``."""
    st = s @ t
    ts = t @ s
    if (s.shift * t.shift) % 2:
        return st + ts
    return st - ts


def adjoint(t: GradedOperator) -> GradedOperator:
    """Transpose with respect to the monomial basis taken as orthonormal."""
    return GradedOperator(t.algebra, -t.shift, {d + t.shift: m.T for d, m in t.blocks.items()})


def conjugate(eta: GradedOperator, t: GradedOperator) -> GradedOperator:
    """``eta⁻¹ ∘ t ∘ eta`` for a blockwise invertible ``eta``."""
    alg = eta.algebra
    inv_blocks = {}
    for d in alg.degrees:
        if alg.dim(d + eta.shift) != alg.dim(d):
            raise OperatorError(f"eta is not invertible at degree {d}")
        try:
            inv_blocks[d + eta.shift] = inverse(eta.block(d))
        except ZeroDivisionError:
            raise OperatorError(f"eta is not invertible at degree {d}") from None
    eta_inv = GradedOperator(alg, -eta.shift, inv_blocks)
    return eta_inv @ t @ eta


def derivation_from_images(algebra: Algebra, images, degree: int) -> GradedOperator:
    """The graded derivation of the given degree extending ``images`` (name -> Element).

    Generators missing from ``images`` are sent to zero.
    """
    gen_images = []
    for i, g in enumerate(algebra.generators):
        img = images.get(g.name, algebra.zero())
        if not img.is_zero():
            if not img.is_homogeneous() or img.degree != g.degree + degree:
                raise OperatorError(
                    f"image of {g.name} must be homogeneous of degree {g.degree + degree}")
        gen_images.append(img)
    unknown = set(images) - {g.name for g in algebra.generators}
    if unknown:
        raise AlgebraError(f"unknown generators {sorted(unknown)}")

    cache = {}

    def on_monomial(m):
        if m in cache:
            return cache[m]
        i = next((k for k, e in enumerate(m) if e), None)
        if i is None:
            res = algebra.zero()
        else:
            first = tuple(1 if k == i else 0 for k in range(len(m)))
            rest = tuple(e - 1 if k == i else e for k, e in enumerate(m))
            gi = algebra.monomial(first)
            sign = -1 if (degree * algebra.generators[i].degree) % 2 else 1
            res = gen_images[i] * algebra.monomial(rest) + (gi * on_monomial(rest)).scale(sign)
        cache[m] = res
        return res

    return GradedOperator.from_monomial_map(algebra, degree, on_monomial)


def is_derivation(t: GradedOperator) -> bool:
    """Leibniz rule on all pairs of basis monomials."""
    alg = t.algebra
    mons = [m for d in alg.degrees for m in alg.basis(d)]
    for a in mons:
        ea = alg.monomial(a)
        ta = t.apply(ea)
        for b in mons:
            eb = alg.monomial(b)
            sign = -1 if (t.shift * alg.monomial_degree(a)) % 2 else 1
            lhs = t.apply(ea * eb)
            rhs = ta * eb + (ea * t.apply(eb)).scale(sign)
            if lhs != rhs:
                return False
    return True


# -- Koszul order -----------------------------------------------------------

class _Deviations:
    """Memoised Koszul deviations Φⁿ of one operator on monomial tuples."""

    def __init__(self, t: GradedOperator):
        self.t = t
        self.alg = t.algebra
        self.t1 = t.apply(self.alg.one())
        self.cache = {}

    def _mul_mono(self, a, b):
        r = self.alg.mono_mul(a, b)
        return r

    def phi(self, args):
        if args in self.cache:
            return self.cache[args]
        alg = self.alg
        t = self.t
        if len(args) == 1:
            x = alg.monomial(args[0])
            res = t.apply(x) - self.t1 * x
        else:
            head, an, b = args[:-2], args[-2], args[-1]
            prod = self._mul_mono(an, b)
            res = alg.zero()
            if prod is not None:
                sign, m = prod
                res = self.phi(head + (m,)).scale(sign)
            res = res - self.phi(args[:-1]) * alg.monomial(b)
            eps = alg.monomial_degree(an) * (t.shift + sum(alg.monomial_degree(a) for a in head))
            term = alg.monomial(an) * self.phi(head + (b,))
            res = res + term if eps % 2 else res - term
        self.cache[args] = res
        return res


def koszul_deviation_witness(t: GradedOperator, n: int):
    """A monomial tuple on which Φⁿ is nonzero, or ``None`` if Φⁿ vanishes."""
    alg = t.algebra
    unit = alg.unit_monomial
    mons = [m for d in alg.degrees for m in alg.basis(d) if m != unit]
    dev = _Deviations(t)
    if n == 1:
        for m in [unit] + mons:
            if not dev.phi((m,)).is_zero():
                return (m,)
        return None
    # Φⁿ is graded symmetric and vanishes when an argument is 1 (n >= 2); it is
    # homogeneous of degree |t|, and away from characteristic 2 it vanishes on a
    # repeated odd argument
    deg = alg.monomial_degree
    degrees = set(alg.degrees)
    skip_odd = alg.field.characteristic() != 2
    for args in itertools.combinations_with_replacement(mons, n):
        if sum(deg(m) for m in args) + t.shift not in degrees:
            continue
        if skip_odd and any(args[i] == args[i + 1] and deg(args[i]) % 2 for i in range(n - 1)):
            continue
        if not dev.phi(args).is_zero():
            return args
    return None


def commutator_witness(t: GradedOperator, n: int):
    """Generators g_1..g_n with [..[[t, g_1], g_2].., g_n] != 0 (as multiplication operators).

    The nested commutator with arbitrary elements is built from these by the
    Leibniz rule, so Φⁿ ≡ 0 exactly when every generator tuple gives zero.
    Returns ``(names, monomial)`` locating a nonzero value, or ``None``.
    """
    alg = t.algebra
    gens = [g for g in alg.generators if alg.gen(g.name)]
    mult = {g.name: GradedOperator.multiplication(alg.gen(g.name)) for g in gens}
    skip_odd = alg.field.characteristic() != 2
    memo = {(): t}

    def nested(names):
        if names not in memo:
            memo[names] = commutator(nested(names[:-1]), mult[names[-1]])
        return memo[names]

    for combo in itertools.combinations_with_replacement(gens, n):
        if skip_odd and any(a is b and a.odd for a, b in zip(combo, combo[1:])):
            continue
        names = tuple(g.name for g in combo)
        op = nested(names)
        if not op.is_zero():
            for deg, blk in sorted(op.blocks.items()):
                if blk.entries:
                    (_, c) = min(blk.entries)
                    return names, alg.basis(deg)[c]
    return None


def koszul_order(t: GradedOperator, k_max: int):
    """Smallest k <= k_max with Φᵏ⁺¹ ≡ 0, or ``None`` when the order exceeds k_max."""
    for k in range(k_max + 1):
        if koszul_deviation_witness(t, k + 1) is None:
            return k
    return None


# -- multivectors -----------------------------------------------------------

def _sort_sign(seq):
    """Sign of the permutation sorting ``seq``, or 0 when an index repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


class MultiVector:
    """A constant multivector: wedge products of ∂_j dual to degree-1 generators.

    Terms are keyed by increasing tuples of generator indices.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms=None):
        self.algebra = algebra
        f = algebra.field
        clean = {}
        for idx, c in dict(terms or {}).items():
            idx = tuple(idx)
            for j in idx:
                if algebra.generators[j].degree != 1:
                    raise OperatorError(
                        f"∂{algebra.generators[j].name} is not dual to a degree-1 generator")
            s = _sort_sign(idx)
            if s == 0:
                continue
            key = tuple(sorted(idx))
            c = f(c) if s > 0 else -f(c)
            clean[key] = clean.get(key, f.zero) + c
            if not clean[key]:
                del clean[key]
        self.terms = clean

    @classmethod
    def dual(cls, algebra, name):
        return cls(algebra, {(algebra.generator_index(name),): 1})

    @property
    def arities(self):
        return sorted({len(k) for k in self.terms})

    @property
    def arity(self):
        a = self.arities
        if len(a) > 1:
            raise OperatorError(f"multivector mixes arities {a}")
        return a[0] if a else 0

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, MultiVector) and self.algebra == other.algebra
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return MultiVector(self.algebra, out)

    def __neg__(self):
        return MultiVector(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = self.algebra.field(s)
        return MultiVector(self.algebra, {k: s * c for k, c in self.terms.items()})

    def wedge(self, other):
        out = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                s = _sort_sign(a + b)
                if s:
                    key = tuple(sorted(a + b))
                    out[key] = out.get(key, 0) + (x * y if s > 0 else -(x * y))
        return MultiVector(self.algebra, out)

    def __str__(self):
        if not self.terms:
            return "0"
        names = [g.name for g in self.algebra.generators]
        parts = []
        for k in sorted(self.terms):
            mono = " ".join(f"d/d{names[j]}" for j in k) or "1"
            parts.append(f"{self.terms[k]} {mono}")
        return " + ".join(parts)

    __repr__ = __str__


def _contraction(algebra: Algebra, j: int) -> GradedOperator:
    name = algebra.generators[j].name
    return derivation_from_images(algebra, {name: algebra.one()}, -1)


def interior_product(v: MultiVector) -> GradedOperator:
    """``i_v``; on ``∂a∧∂b∧…`` this is ``i_∂a ∘ i_∂b ∘ …``."""
    alg = v.algebra
    arity = v.arity
    out = GradedOperator.zero(alg, -arity)
    singles = {}
    for idx, c in v.terms.items():
        op = GradedOperator.identity(alg)
        for j in reversed(idx):
            if j not in singles:
                singles[j] = _contraction(alg, j)
            op = singles[j] @ op
        out = out + op.scale(c)
    if out.is_zero():
        return GradedOperator.zero(alg, -arity)
    return out


# -- Lie structures and the Schouten bracket -------------------------------

class LieError(ValueError):
    pass


@dataclass
class LieStructure:
    """Structure constants ``[X_i, X_j] = Σ_k c[i, j][k] X_k`` on generator indices."""

    algebra: Algebra
    indices: tuple
    constants: dict = dc_field(default_factory=dict)

    def bracket_basis(self, i, j) -> MultiVector:
        return MultiVector(self.algebra, {(k,): c for k, c in self.constants.get((i, j), {}).items()})

    def check(self):
        """Raise :class:`LieError` unless antisymmetry and Jacobi hold."""
        idx = self.indices
        f = self.algebra.field
        for i in idx:
            for j in idx:
                if self.bracket_basis(i, j) != -self.bracket_basis(j, i):
                    raise LieError(f"bracket not antisymmetric on ({i}, {j})")

        def br(u: MultiVector, w: MultiVector) -> MultiVector:
            out = MultiVector(self.algebra)
            for (a,), x in u.terms.items():
                for (b,), y in w.terms.items():
                    out = out + self.bracket_basis(a, b).scale(x * y)
            return out

        X = {i: MultiVector(self.algebra, {(i,): f.one}) for i in idx}
        for i, j, k in itertools.combinations(idx, 3):
            jac = br(X[i], br(X[j], X[k])) + br(X[j], br(X[k], X[i])) + br(X[k], br(X[i], X[j]))
            if not jac.is_zero():
                raise LieError(f"Jacobi identity fails on ({i}, {j}, {k})")
        return True


def lie_from_ce(algebra: Algebra, d: GradedOperator) -> LieStructure:
    """Read the Lie bracket off a Chevalley-Eilenberg differential on degree-1 generators."""
    idx = tuple(i for i, g in enumerate(algebra.generators) if g.degree == 1)
    consts = {}
    for k in idx:
        img = d.apply(algebra.gen(algebra.generators[k].name))
        for m, c in img.terms.items():
            letters = [i for i, e in enumerate(m) if e]
            if len(letters) != 2 or any(e > 1 for e in m) or any(i not in idx for i in letters):
                raise LieError(f"d of {algebra.generators[k].name} is not quadratic in degree-1 generators")
            i, j = letters
            consts.setdefault((i, j), {})[k] = -c
            consts.setdefault((j, i), {})[k] = c
    return LieStructure(algebra, idx, consts)


def schouten(v: MultiVector, w: MultiVector, lie: LieStructure) -> MultiVector:
    """Schouten-Nijenhuis bracket of constant multivectors.

    ``[X1∧…∧Xp, Y1∧…∧Yq] = Σ (-1)^(i+j) [Xi, Yj] ∧ X1…X̂i…Xp ∧ Y1…Ŷj…Yq``.
    """
    lie.check()
    alg = v.algebra
    out = MultiVector(alg)
    for a, x in v.terms.items():
        for b, y in w.terms.items():
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    br = lie.bracket_basis(ai, bj)
                    if br.is_zero():
                        continue
                    rest = MultiVector(alg, {a[:i] + a[i + 1:] + b[:j] + b[j + 1:]: 1})
                    term = br.wedge(rest).scale(x * y)
                    out = out + term if (i + j) % 2 == 0 else out - term
    return out
