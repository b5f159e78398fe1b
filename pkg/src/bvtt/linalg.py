"""Exact sparse linear algebra over Q and F_p.

Vectors are plain lists of field scalars.  Matrices are :class:`SparseMatrix`
values holding only nonzero entries.  All elimination goes through
:func:`rref`, which returns the (unique) reduced row echelon form with
pivots scaled to 1; pivots are taken column by column from the left, using
the lowest available row.  Over F_p the reduction runs on dense int64
arrays in :mod:`bvtt._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import _kernels
from .field import FieldSpec, Mod


class NotAComplexError(ValueError):
    pass


class SparseMatrix:
    """An immutable ``nrows x ncols`` matrix with exact entries."""

    __slots__ = ("nrows", "ncols", "entries", "field")

    def __init__(self, nrows: int, ncols: int, entries, field: FieldSpec):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        clean = {}
        for (r, c), v in dict(entries).items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            v = field(v)
            if v:
                clean[r, c] = v
        self.entries = clean

    @classmethod
    def zeros(cls, nrows, ncols, field):
        return cls(nrows, ncols, {}, field)

    @classmethod
    def identity(cls, n, field):
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    @classmethod
    def from_dense(cls, rows, field, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols,
                   {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v},
                   field)

    @classmethod
    def from_columns(cls, columns, nrows, field):
        return cls(nrows, len(columns),
                   {(i, j): v for j, col in enumerate(columns) for i, v in enumerate(col) if v},
                   field)

    @property
    def shape(self):
        return self.nrows, self.ncols

    def to_dense(self):
        zero = self.field.zero
        out = [[zero] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self):
        rows = [{} for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def column(self, j):
        col = [self.field.zero] * self.nrows
        for (r, c), v in self.entries.items():
            if c == j:
                col[r] = v
        return col

    def columns(self):
        cols = [[self.field.zero] * self.nrows for _ in range(self.ncols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    @property
    def T(self):
        return SparseMatrix(self.ncols, self.nrows,
                            {(c, r): v for (r, c), v in self.entries.items()}, self.field)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)}, {self.field})"

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseMatrix(self.nrows, self.ncols, out, self.field)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SparseMatrix(self.nrows, self.ncols,
                            {k: -v for k, v in self.entries.items()}, self.field)

    def scale(self, s):
        s = self.field(s)
        return SparseMatrix(self.nrows, self.ncols,
                            {k: s * v for k, v in self.entries.items()}, self.field)

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot compose {self.shape} with {other.shape}")
            by_row = {}
            for (k, c), v in other.entries.items():
                by_row.setdefault(k, []).append((c, v))
            out = {}
            for (r, k), v in self.entries.items():
                for c, w in by_row.get(k, ()):
                    out[r, c] = out.get((r, c), 0) + v * w
            return SparseMatrix(self.nrows, other.ncols, out, self.field)
        vec = list(other)
        if len(vec) != self.ncols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape} matrix")
        out = [self.field.zero] * self.nrows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] = out[r] + v * vec[c]
        return out


def zero_vector(n, field):
    return [field.zero] * n


def is_zero_vector(v):
    return not any(v)


# -- elimination ------------------------------------------------------------

@dataclass
class Echelon:
    """Reduced row echelon form: ``rows[i]`` has a leading 1 at ``pivots[i]``."""

    rows: list
    pivots: list
    ncols: int
    field: FieldSpec
    _pivot_index: dict = dc_field(default=None, repr=False)

    def __post_init__(self):
        self._pivot_index = {c: i for i, c in enumerate(self.pivots)}

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, vec):
        """Reduce ``vec`` modulo the row space; result vanishes on pivot columns."""
        v = list(vec)
        for i, c in enumerate(self.pivots):
            f = v[c]
            if f:
                for j, w in self.rows[i].items():
                    v[j] = v[j] - f * w
        return v

    def add_row(self, vec):
        """Insert a vector already reduced against this echelon (keeps rows reduced)."""
        lead = next(j for j, x in enumerate(vec) if x)
        inv = 1 / vec[lead]
        new = {j: x * inv for j, x in enumerate(vec) if x}
        for row in self.rows:
            f = row.get(lead)
            if f:
                for j, w in new.items():
                    x = row.get(j, 0) - f * w
                    if x:
                        row[j] = x
                    else:
                        row.pop(j, None)
        pos = sum(1 for c in self.pivots if c < lead)
        self.rows.insert(pos, new)
        self.pivots.insert(pos, lead)
        self._pivot_index = {c: i for i, c in enumerate(self.pivots)}


def _integer_row(r):
    den = 1
    for v in r.values():
        den = lcm(den, v.denominator)
    row = {j: v.numerator * (den // v.denominator) for j, v in r.items()}
    return _primitive(row)


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {j: v // g for j, v in row.items()} if g > 1 else row


def _rref_sparse(m: SparseMatrix):
    """Fraction-free Gauss-Jordan on primitive integer rows; exact over Q."""
    rows = [_integer_row(r) for r in m.row_dicts() if r]
    done = []
    pivots = []
    for c in range(m.ncols):
        k = None
        for i, r in enumerate(rows):
            if c in r:
                k = i
                break
        if k is None:
            continue
        prow = rows.pop(k)
        a = prow[c]
        for group in (rows, done):
            for i, r in enumerate(group):
                b = r.get(c)
                if b:
                    g = gcd(a, b)
                    sa, sb = a // g, b // g
                    new = {j: sa * v for j, v in r.items()}
                    for j, w in prow.items():
                        x = new.get(j, 0) - sb * w
                        if x:
                            new[j] = x
                        else:
                            new.pop(j, None)
                    group[i] = _primitive(new)
        rows = [r for r in rows if r]
        done.append(prow)
        pivots.append(c)
        if not rows:
            break
    out = []
    for r, c in zip(done, pivots):
        a = r[c]
        out.append({j: Fraction(v, a) for j, v in r.items()})
    return out, pivots


def _rref_mod_p(m: SparseMatrix):
    p = m.field.p
    a = np.zeros((m.nrows, m.ncols), dtype=np.int64)
    for (r, c), v in m.entries.items():
        a[r, c] = v.value
    a, piv = _kernels.rref_mod_p(a, p)
    rows = []
    for i in range(len(piv)):
        nz = np.nonzero(a[i])[0]
        rows.append({int(j): Mod(int(a[i, j]), p) for j in nz})
    return rows, [int(c) for c in piv]


def rref(m: SparseMatrix) -> Echelon:
    if m.nrows == 0 or m.ncols == 0 or not m.entries:
        return Echelon([], [], m.ncols, m.field)
    if m.field.is_prime_field:
        rows, piv = _rref_mod_p(m)
    else:
        rows, piv = _rref_sparse(m)
    return Echelon(rows, piv, m.ncols, m.field)


def rank(m: SparseMatrix) -> int:
    return rref(m).rank


def kernel_basis(m: SparseMatrix) -> list:
    """One basis vector per non-pivot column, with a 1 in that column."""
    e = rref(m)
    piv = set(e.pivots)
    basis = []
    for f in range(m.ncols):
        if f in piv:
            continue
        v = zero_vector(m.ncols, m.field)
        v[f] = m.field.one
        for i, c in enumerate(e.pivots):
            w = e.rows[i].get(f)
            if w:
                v[c] = -w
        basis.append(v)
    return basis


def echelon_basis(vectors, dim, field) -> list:
    """Reduced echelon basis of the span of ``vectors``."""
    if not vectors:
        return []
    e = rref(SparseMatrix.from_dense(vectors, field, ncols=dim))
    out = []
    for r in e.rows:
        v = zero_vector(dim, field)
        for j, x in r.items():
            v[j] = x
        out.append(v)
    return out


def image_basis(m: SparseMatrix) -> list:
    """Reduced echelon basis of the column space."""
    return echelon_basis(m.columns(), m.nrows, m.field)


def solve(m: SparseMatrix, b):
    """Some ``x`` with ``m @ x == b``, or ``None`` when ``b`` is not in the image.

    The returned solution is zero on every non-pivot column of ``rref(m)``.
    """
    b = [m.field(x) for x in b]
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.nrows}")
    aug = SparseMatrix(m.nrows, m.ncols + 1,
                       dict(m.entries) | {(i, m.ncols): x for i, x in enumerate(b) if x},
                       m.field)
    e = rref(aug)
    if e.pivots and e.pivots[-1] == m.ncols:
        return None
    x = zero_vector(m.ncols, m.field)
    for i, c in enumerate(e.pivots):
        x[c] = e.rows[i].get(m.ncols, m.field.zero)
    return x


def span_rank(vectors, dim, field) -> int:
    if not vectors:
        return 0
    return rank(SparseMatrix.from_dense(vectors, field, ncols=dim))


def in_span(vec, vectors, dim, field) -> bool:
    if is_zero_vector(vec):
        return True
    return span_rank(list(vectors) + [vec], dim, field) == span_rank(vectors, dim, field)


def contains(big, small, dim, field) -> bool:
    """Is span(small) a subspace of span(big)?"""
    return span_rank(list(big) + list(small), dim, field) == span_rank(big, dim, field)


def same_subspace(u, v, dim, field) -> bool:
    return contains(u, v, dim, field) and contains(v, u, dim, field)


def intersect(u, v, dim, field) -> list:
    """Echelon basis of span(u) ∩ span(v)."""
    u = echelon_basis(u, dim, field)
    v = echelon_basis(v, dim, field)
    if not u or not v:
        return []
    # x = sum a_i u_i = sum b_j v_j  <=>  [U | -V](a, b) = 0
    cols = u + [[-x for x in w] for w in v]
    ker = kernel_basis(SparseMatrix.from_columns(cols, dim, field))
    vecs = []
    for k in ker:
        x = zero_vector(dim, field)
        for a, ui in zip(k[:len(u)], u):
            if a:
                x = [s + a * t for s, t in zip(x, ui)]
        vecs.append(x)
    return echelon_basis(vecs, dim, field)


def quotient_basis(sub, ambient, dim, field) -> list:
    """Coset representatives for span(ambient) / span(sub).

    ``sub`` must lie in span(ambient).  Each representative is reduced
    against the echelon form of ``sub`` (zero on its pivot columns), and the
    ambient vectors are scanned in the given order.
    """
    e = rref(SparseMatrix.from_dense(sub, field, ncols=dim)) if sub else Echelon([], [], dim, field)
    work = Echelon([dict(r) for r in e.rows], list(e.pivots), dim, field)
    reps = []
    for a in ambient:
        r = e.reduce(a)
        if is_zero_vector(work.reduce(r)):
            continue
        reps.append(r)
        work.add_row(work.reduce(r))
    return reps


def complement_basis(vectors, dim, field) -> list:
    """Standard basis vectors completing span(vectors) to the whole space."""
    e = rref(SparseMatrix.from_dense(vectors, field, ncols=dim)) if vectors else None
    piv = set(e.pivots) if e else set()
    out = []
    for j in range(dim):
        if j not in piv:
            v = zero_vector(dim, field)
            v[j] = field.one
            out.append(v)
    return out


def inverse(m: SparseMatrix) -> SparseMatrix:
    if m.nrows != m.ncols:
        raise ValueError("only square matrices are invertible")
    n = m.nrows
    aug = SparseMatrix(n, 2 * n, dict(m.entries) | {(i, n + i): 1 for i in range(n)}, m.field)
    e = rref(aug)
    if e.pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return SparseMatrix(n, n, {(i, j - n): v for i in range(n)
                               for j, v in e.rows[i].items() if j >= n}, m.field)


# -- homology -------------------------------------------------------------

@dataclass
class Homology:
    """H = Ker(d_out) / Im(d_in) at one spot of a complex."""

    dim: int
    representatives: list
    cycles: list
    boundaries: list
    projection: SparseMatrix
    ambient: int
    field: FieldSpec

    def project(self, vec):
        """Coordinates of the class of a cycle in the representative basis."""
        return self.projection @ vec


def homology(d_in: SparseMatrix, d_out: SparseMatrix) -> Homology:
    if d_in.nrows != d_out.ncols:
        raise ValueError(f"d_in lands in dimension {d_in.nrows}, d_out starts at {d_out.ncols}")
    if not (d_out @ d_in).is_zero():
        raise NotAComplexError("not a complex: d_out @ d_in != 0")
    n = d_out.ncols
    fld = d_out.field
    cycles = kernel_basis(d_out)
    bounds = image_basis(d_in)
    reps = quotient_basis(bounds, cycles, n, fld)
    # full basis: boundaries, representatives, complement of the cycles
    rest = complement_basis(cycles, n, fld) if n else []
    basis = bounds + reps + rest
    if basis:
        inv = inverse(SparseMatrix.from_columns(basis, n, fld))
        lo = len(bounds)
        proj = SparseMatrix(len(reps), n, {(r - lo, c): v for (r, c), v in inv.entries.items()
                                           if lo <= r < lo + len(reps)}, fld)
    else:
        proj = SparseMatrix.zeros(0, 0, fld)
    return Homology(len(reps), reps, cycles, bounds, proj, n, fld)
