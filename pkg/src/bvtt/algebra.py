"""Finite free graded-commutative algebras and their elements.

An :class:`Algebra` is generated by named homogeneous generators.  Odd
generators square to zero, even generators carry a declared nilpotency
exponent, and everything of total degree above the cap is set to zero.
Monomials are exponent tuples in generator declaration order; the Koszul
sign of a product is the parity of the odd generators that have to be
moved past each other to restore that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .field import FieldSpec, format_scalar

Monomial = tuple


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    bidegree: tuple | None = None
    nilpotent: int | None = None

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def bound(self) -> int:
        """Smallest exponent that vanishes."""
        return 2 if self.odd else self.nilpotent


class AlgebraError(ValueError):
    pass


class Algebra:
    """A finite-dimensional free graded-commutative algebra with a degree cap."""

    def __init__(self, field: FieldSpec, generators, cap: int):
        self.field = field
        self.generators = tuple(generators)
        self.cap = cap
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate generator names in {names}")
        for g in self.generators:
            if g.degree < 0:
                raise AlgebraError(f"generator {g.name} has negative degree {g.degree}")
            if not g.odd and (g.nilpotent is None or g.nilpotent < 1):
                raise AlgebraError(f"even generator {g.name} needs a nilpotency exponent")
            if g.bidegree is not None and sum(g.bidegree) != g.degree:
                raise AlgebraError(f"bidegree {g.bidegree} of {g.name} does not sum to {g.degree}")
        self._names = {g.name: i for i, g in enumerate(self.generators)}

    # -- structure ------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Algebra) and self.field == other.field
                and self.generators == other.generators and self.cap == other.cap)

    def __hash__(self):
        return hash((self.field, self.generators, self.cap))

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"Algebra({self.field}; {gens}; cap {self.cap})"

    def over(self, field: FieldSpec) -> "Algebra":
        """The same presentation over another field."""
        return Algebra(field, self.generators, self.cap)

    @property
    def ngens(self):
        return len(self.generators)

    @property
    def bigraded(self) -> bool:
        return bool(self.generators) and all(g.bidegree is not None for g in self.generators)

    def generator_index(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    @cached_property
    def _bases(self):
        gens = self.generators
        ranges = [range(g.bound) for g in gens]
        by_degree = {}
        for exps in itertools.product(*ranges):
            deg = sum(e * g.degree for e, g in zip(exps, gens))
            if deg <= self.cap:
                by_degree.setdefault(deg, []).append(exps)
        for deg in by_degree:
            by_degree[deg].sort(reverse=True)
        return by_degree

    @cached_property
    def _index(self):
        return {m: i for ms in self._bases.values() for i, m in enumerate(ms)}

    def basis(self, degree: int) -> list:
        """Monomials of the given degree, lexicographically with earlier generators first."""
        return list(self._bases.get(degree, ()))

    def dim(self, degree: int) -> int:
        return len(self._bases.get(degree, ()))

    @cached_property
    def degrees(self) -> list:
        return sorted(self._bases)

    @property
    def total_dim(self):
        return sum(len(b) for b in self._bases.values())

    def index(self, m: Monomial) -> int:
        return self._index[m]

    @cached_property
    def _degree_of(self):
        return {m: d for d, ms in self._bases.items() for m in ms}

    def monomial_degree(self, m: Monomial) -> int:
        d = self._degree_of.get(m)
        if d is None:
            d = sum(e * g.degree for e, g in zip(m, self.generators))
        return d

    def monomial_bidegree(self, m: Monomial):
        if not self.bigraded:
            return None
        return (sum(e * g.bidegree[0] for e, g in zip(m, self.generators)),
                sum(e * g.bidegree[1] for e, g in zip(m, self.generators)))

    @property
    def unit_monomial(self) -> Monomial:
        return (0,) * self.ngens

    def mono_mul(self, a: Monomial, b: Monomial):
        """Product of two monomials as ``(sign, monomial)``, or ``None`` if it vanishes."""
        key = (a, b)
        cache = self._products
        if key in cache:
            return cache[key]
        cache[key] = r = self._mono_mul(a, b)
        return r

    @cached_property
    def _products(self):
        return {}

    def _mono_mul(self, a, b):
        gens = self.generators
        out = []
        for x, y, g in zip(a, b, gens):
            e = x + y
            if e >= g.bound:
                return None
            out.append(e)
        out = tuple(out)
        if self.monomial_degree(out) > self.cap:
            return None
        # odd letters of b have to pass the later odd letters of a
        swaps = 0
        later = 0
        for i in range(len(gens) - 1, -1, -1):
            if gens[i].odd:
                if b[i]:
                    swaps += later
                later += a[i]
        return (-1 if swaps % 2 else 1), out

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for e, g in zip(m, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return " ".join(parts) if parts else "1"

    # -- elements -------------------------------------------------------

    def element(self, terms=None) -> "Element":
        return Element(self, terms or {})

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_monomial: 1})

    def gen(self, name: str) -> "Element":
        i = self.generator_index(name)
        m = tuple(1 if j == i else 0 for j in range(self.ngens))
        if self.monomial_degree(m) > self.cap:
            return self.zero()
        return Element(self, {m: 1})

    def monomial(self, m: Monomial) -> "Element":
        return Element(self, {tuple(m): 1})

    def basis_element(self, degree: int, i: int) -> "Element":
        return Element(self, {self._bases[degree][i]: 1})

    def to_vector(self, x: "Element", degree: int) -> list:
        v = [self.field.zero] * self.dim(degree)
        for m, c in x.terms.items():
            if self.monomial_degree(m) != degree:
                raise AlgebraError(f"{self.format_monomial(m)} is not of degree {degree}")
            v[self._index[m]] = c
        return v

    def from_vector(self, v, degree: int) -> "Element":
        basis = self._bases.get(degree, [])
        return Element(self, {basis[i]: c for i, c in enumerate(v) if c})


class Element:
    """A finite linear combination of monomials of one algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms):
        self.algebra = algebra
        f = algebra.field
        clean = {}
        for m, c in dict(terms).items():
            m = tuple(m)
            c = f(c)
            if c:
                clean[m] = clean.get(m, f.zero) + c
                if not clean[m]:
                    del clean[m]
        self.terms = clean

    def _same(self, other):
        if not isinstance(other, Element):
            raise TypeError(f"expected an Element, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraError("elements belong to different algebras")

    def __add__(self, other):
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Element(self.algebra, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, s):
        s = self.algebra.field(s)
        return Element(self.algebra, {m: s * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        self._same(other)
        alg = self.algebra
        out = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                r = alg.mono_mul(a, b)
                if r is None:
                    continue
                sign, m = r
                out[m] = out.get(m, 0) + (x * y if sign > 0 else -(x * y))
        return Element(alg, out)

    def __rmul__(self, s):
        return self.scale(s)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({self.algebra.monomial_degree(m) for m in self.terms})

    @property
    def degree(self) -> int:
        """Degree of a homogeneous nonzero element."""
        ds = self.degrees()
        if len(ds) != 1:
            raise AlgebraError(f"element is not homogeneous (degrees {ds})")
        return ds[0]

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def decompose(self):
        """``[(degree, component), ...]`` in increasing degree."""
        alg = self.algebra
        parts = {}
        for m, c in self.terms.items():
            parts.setdefault(alg.monomial_degree(m), {})[m] = c
        return [(d, Element(alg, parts[d])) for d in sorted(parts)]

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        alg = self.algebra
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda m: (alg.monomial_degree(m), [-e for e in m]))
        out = []
        for m in order:
            c = self.terms[m]
            out.append(f"{format_scalar(c)} {alg.format_monomial(m)}")
        return " + ".join(out)
