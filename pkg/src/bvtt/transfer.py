"""Contractions of dg-Lie algebras onto homology and the transferred L∞ brackets.

The L∞ structure is written on V = L[1] with symmetric multilinear maps m_k of
degree +1; an element of L^n sits in V-degree n - 1.  For a dg-Lie algebra

    m_1(x) = -∂x,    m_2(x, y) = (-1)^|x| [x, y]    (|x| the L-degree).

The contraction (i, q, h) satisfies i q - id = ∂h + h∂, q i = id and the side
conditions h h = h i = q h = 0.  Transferred operations are sums over binary
trees: T_1 = i, T_S = Σ ε h_V m_2(T_I, T_J) over unordered splits S = I ⊔ J,
and m'_S = Σ ε q m_2(T_I, T_J), where h_V = -h is the V-side homotopy and ε
is the Koszul sign of moving the inputs of J past those of I.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .deformation import DgLie
from .field import format_scalar
from .linalg import SparseMatrix, complement_basis, homology, inverse, is_zero_vector, zero_vector
from .report import Report


class ContractionError(ValueError):
    pass


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _scale(s, u):
    return [s * a for a in u]


@dataclass
class _Slot:
    """The split L^n = B ⊕ H ⊕ C with B = ∂(C^(n-1)) and ∂ injective on C."""

    reps: list
    comp: list
    bounds_from: list        # c ∈ C^(n-1) with ∂c giving the B basis
    coords: SparseMatrix     # L^n -> coordinates in (B, H, C)


class Contraction:
    def __init__(self, l: DgLie):
        self.l = l
        f = l.field
        self.slots = {}
        comps = {}
        degs = l.degrees
        for n in degs:
            h = l.homology(n)
            comps[n] = complement_basis(h.cycles, l.dim(n), f)
            self.slots[n] = (h,)
        for n in degs:
            h = self.slots[n][0]
            prev = comps.get(n - 1, [])
            bounds = [l.d(n - 1) @ c for c in prev]
            basis = bounds + h.representatives + comps[n]
            if len(basis) != l.dim(n):
                raise ContractionError(f"degree {n}: basis of size {len(basis)} for dimension {l.dim(n)}")
            coords = inverse(SparseMatrix.from_columns(basis, l.dim(n), f))
            self.slots[n] = _Slot(h.representatives, comps[n], prev, coords)

    def hdim(self, n):
        s = self.slots.get(n)
        return len(s.reps) if s else 0

    def i(self, n, coords):
        f = self.l.field
        out = zero_vector(self.l.dim(n), f)
        for a, rep in zip(coords, self.slots[n].reps):
            if a:
                out = _add(out, _scale(a, rep))
        return out

    def q(self, n, vec):
        s = self.slots.get(n)
        if s is None:
            return []
        c = s.coords @ vec
        lo = len(s.bounds_from)
        return c[lo:lo + len(s.reps)]

    def h(self, n, vec):
        """L^n -> L^(n-1): the boundary ∂c of c ∈ C^(n-1) goes to -c, everything else to 0."""
        f = self.l.field
        out = zero_vector(self.l.dim(n - 1), f)
        s = self.slots.get(n)
        if s is None:
            return out
        c = s.coords @ vec
        for a, src in zip(c, s.bounds_from):
            if a:
                out = _add(out, _scale(-a, src))
        return out

    def verify(self) -> Report:
        """Contraction identities on every basis vector."""
        l, f = self.l, self.l.field
        rep = Report("contraction")
        for n in l.degrees:
            for j in range(l.dim(n)):
                x = l.basis_vector(n, j)
                lhs = _add(self.i(n, self.q(n, x)), _scale(f(-1), x))
                rhs = _add(l.d(n - 1) @ self.h(n, x), self.h(n + 1, l.d(n) @ x))
                if lhs != rhs:
                    rep.fail("iq - id != ∂h + h∂", degree=n, basis=j)
                if n - 1 in l.dims and any(self.h(n - 1, self.h(n, x))):
                    rep.fail("h h != 0", degree=n, basis=j)
                if n - 1 in l.dims and any(self.q(n - 1, self.h(n, x))):
                    rep.fail("q h != 0", degree=n, basis=j)
            for j in range(self.hdim(n)):
                e = [f.one if k == j else f.zero for k in range(self.hdim(n))]
                if self.q(n, self.i(n, e)) != e:
                    rep.fail("q i != id", degree=n, basis=j)
                if any(self.h(n, self.i(n, e))):
                    rep.fail("h i != 0", degree=n, basis=j)
        return rep


def build_contraction(l: DgLie) -> Contraction:
    return Contraction(l)


def koszul_sign(vdegs, order):
    """Sign of permuting graded symbols with degrees ``vdegs`` into ``order``."""
    s = 0
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                s += vdegs[order[a]] * vdegs[order[b]]
    return -1 if s % 2 else 1


def _splits(s):
    """Unordered splits of a tuple into two nonempty parts, the first holding s[0]."""
    rest = s[1:]
    for r in range(0, len(rest)):
        for pick in itertools.combinations(rest, r):
            I = (s[0],) + pick
            J = tuple(x for x in rest if x not in pick)
            yield I, J


class TransferredLInfinity:
    """Operations m'_k on H(L) for the fixed contraction, as V = H[1] maps.

    Homology classes are ``(degree, coordinates)``; values on tuples of basis
    classes are cached and general arguments are expanded multilinearly.
    """

    def __init__(self, l: DgLie, contraction: Contraction | None = None):
        self.l = l
        self.c = contraction or build_contraction(l)
        self.f = l.field
        self._basis = []
        for n in l.degrees:
            for j in range(self.c.hdim(n)):
                self._basis.append((n, j))
        self._index = {b: k for k, b in enumerate(self._basis)}
        self._trees = {}
        self._ops = {}

    def basis(self):
        out = []
        for n, j in self._basis:
            d = self.c.hdim(n)
            out.append((n, tuple(self.f.one if k == j else self.f.zero for k in range(d))))
        return out

    def m2(self, x, y):
        (n, u), (m, v) = x, y
        br = self.l.bracket(n, u, m, v)
        return n + m, _scale(self.f(-1), br) if n % 2 else br

    def _vdeg(self, idx):
        return [self._basis[k][0] - 1 for k in idx]

    def _combine(self, idx):
        """Σ over unordered splits of ε m_2(T_I, T_J); ``idx`` holds basis indices."""
        vdeg = self._vdeg(idx)
        # m_2(T_I, T_J) has L-degree Σ n_k - |S| + 2 = Σ vdeg_k + 2
        deg = sum(vdeg) + 2
        acc = zero_vector(self.l.dim(deg), self.f)
        for I, J in _splits(tuple(range(len(idx)))):
            a, u = self._tree(tuple(idx[k] for k in I))
            b, v = self._tree(tuple(idx[k] for k in J))
            if not any(u) or not any(v):
                continue
            _, w = self.m2((a, u), (b, v))
            acc = _add(acc, w if koszul_sign(vdeg, I + J) == 1 else _scale(self.f(-1), w))
        return deg, acc

    def _tree(self, idx):
        if idx in self._trees:
            return self._trees[idx]
        if len(idx) == 1:
            n, j = self._basis[idx[0]]
            out = (n, self.c.i(n, [self.f.one if k == j else self.f.zero
                                   for k in range(self.c.hdim(n))]))
        else:
            deg, acc = self._combine(idx)
            out = (deg - 1, _scale(self.f(-1), self.c.h(deg, acc)) if any(acc)
                   else zero_vector(self.l.dim(deg - 1), self.f))
        self._trees[idx] = out
        return out

    def _op_basis(self, idx):
        if idx not in self._ops:
            if len(idx) == 1:
                n = self._basis[idx[0]][0]
                self._ops[idx] = (n + 1, [self.f.zero] * self.c.hdim(n + 1))
            else:
                deg, acc = self._combine(idx)
                self._ops[idx] = (deg, self.c.q(deg, acc) if deg in self.l.dims else [])
        return self._ops[idx]

    def m(self, args):
        """m'_k on homology classes given as (degree, H-coordinates)."""
        k = len(args)
        deg = sum(n for n, _ in args) - k + 2
        out = [self.f.zero] * self.c.hdim(deg)
        expanded = [[(self._index[n, j], c) for j, c in enumerate(x) if c] for n, x in args]
        for pick in itertools.product(*expanded):
            coeff = self.f.one
            for _, c in pick:
                coeff = coeff * c
            _, val = self._op_basis(tuple(i for i, _ in pick))
            if val:
                out = _add(out, _scale(coeff, val))
        return deg, out

    def tree(self, args):
        """The L-valued component F_k of the L∞ quasi-isomorphism H -> L (F_1 = i)."""
        k = len(args)
        deg = sum(n for n, _ in args) - k + 1
        out = zero_vector(self.l.dim(deg), self.f)
        expanded = [[(self._index[n, j], c) for j, c in enumerate(x) if c] for n, x in args]
        for pick in itertools.product(*expanded):
            coeff = self.f.one
            for _, c in pick:
                coeff = coeff * c
            _, val = self._tree(tuple(i for i, _ in pick))
            out = _add(out, _scale(coeff, val))
        return deg, out

    def bracket(self, x, y):
        """ℓ_2 in Lie form: (-1)^|x| m'_2."""
        n, w = self.m([x, y])
        return n, _scale(self.f(-1), w) if x[0] % 2 else w


def _unshuffles(n, j):
    for first in itertools.combinations(range(n), j):
        yield first, tuple(k for k in range(n) if k not in first)


def linf_relation(op, args, f):
    """Σ_{j} Σ_{unshuffles} ε m_(n-j+1)(m_j(x_first), x_rest), homogeneous part by degree.

    ``op(list_of_args)`` returns ``(degree, vector)``; returns a dict
    degree -> accumulated vector.
    """
    n = len(args)
    vdeg = [a[0] - 1 for a in args]
    out = {}
    for j in range(1, n + 1):
        for first, rest in _unshuffles(n, j):
            sign = koszul_sign(vdeg, first + rest)
            inner = op([args[k] for k in first])
            if not inner[1] or is_zero_vector(inner[1]):
                continue
            deg, val = op([inner] + [args[k] for k in rest])
            if not val:
                continue
            acc = out.get(deg, zero_vector(len(val), f))
            out[deg] = _add(acc, val if sign == 1 else _scale(f(-1), val))
    return out


def check_linf(t: TransferredLInfinity, arities=(3, 4)) -> Report:
    """L∞ relations on all nondecreasing tuples of homology basis classes."""
    rep = Report("l-infinity")
    basis = t.basis()
    checked = 0
    for n in arities:
        for combo in itertools.combinations_with_replacement(range(len(basis)), n):
            args = [basis[k] for k in combo]
            if not t.c.hdim(sum(a[0] for a in args) - n + 3):
                continue
            for deg, v in linf_relation(t.m, args, t.f).items():
                if not is_zero_vector(v):
                    rep.fail("L∞ relation", arity=n, inputs=list(combo), degree=deg,
                             value=[format_scalar(c) for c in v])
            checked += 1
    rep.details["tuples_checked"] = checked
    return rep


def check_morphism(t: TransferredLInfinity, arities=(1, 2, 3)) -> Report:
    """The trees F_k form an L∞ morphism (H, m') -> (L, -∂, m_2).

    For every tuple of basis classes,
    Σ ε F(m'_j(x_first), x_rest) = -∂F_n(x) + Σ_{unordered splits} ε m_2(F_I, F_J).
    """
    rep = Report("l-infinity-morphism")
    basis = t.basis()
    f, l = t.f, t.l
    checked = 0
    for n in arities:
        for combo in itertools.combinations_with_replacement(range(len(basis)), n):
            args = [basis[k] for k in combo]
            vdeg = [a[0] - 1 for a in args]
            deg = sum(a[0] for a in args) - n + 2
            if not l.dim(deg):
                continue
            lhs = zero_vector(l.dim(deg), f)
            for j in range(2, n + 1):
                for first, rest in _unshuffles(n, j):
                    inner = t.m([args[k] for k in first])
                    if not any(inner[1]):
                        continue
                    _, val = t.tree([inner] + [args[k] for k in rest])
                    sign = koszul_sign(vdeg, first + rest)
                    lhs = _add(lhs, val if sign == 1 else _scale(f(-1), val))
            fdeg, fn = t.tree(args)
            rhs = _scale(f(-1), l.d(fdeg) @ fn) if l.dim(fdeg) else zero_vector(l.dim(deg), f)
            for I, J in _splits(tuple(range(n))):
                _, u = t.tree([args[k] for k in I])
                _, v = t.tree([args[k] for k in J])
                a, b = sum(args[k][0] for k in I) - len(I) + 1, sum(args[k][0] for k in J) - len(J) + 1
                if not any(u) or not any(v):
                    continue
                _, w = t.m2((a, u), (b, v))
                rhs = _add(rhs, w if koszul_sign(vdeg, I + J) == 1 else _scale(f(-1), w))
            if lhs != rhs:
                rep.fail("L∞ morphism relation", arity=n, inputs=list(combo), degree=deg)
            checked += 1
    rep.details["tuples_checked"] = checked
    return rep


def dg_lie_as_linf(l: DgLie):
    """m_1, m_2 of a dg-Lie algebra in the same V = L[1] convention (all higher m vanish)."""
    f = l.field

    def op(args):
        if len(args) == 1:
            n, u = args[0]
            return n + 1, _scale(f(-1), l.d(n) @ u) if n in l.dims else []
        if len(args) == 2:
            (n, u), (m, v) = args
            if n not in l.dims or m not in l.dims or n + m not in l.dims:
                return n + m, []
            br = l.bracket(n, u, m, v)
            return n + m, _scale(f(-1), br) if n % 2 else br
        return 0, []

    return op


def transfer_report(l: DgLie, max_arity: int = 4, check_arities=(3, 4)) -> dict:
    """Brackets m'_2..m'_max on basis classes and the L∞ relation check."""
    t = TransferredLInfinity(l)
    basis = t.basis()
    ops = {}
    for k in range(2, max_arity + 1):
        tab = {}
        for combo in itertools.combinations_with_replacement(range(len(basis)), k):
            deg, v = t.m([basis[c] for c in combo])
            if v and not is_zero_vector(v):
                tab[",".join(map(str, combo))] = {"degree": deg, "value": [format_scalar(c) for c in v]}
        ops[k] = tab
    rel = check_linf(t, tuple(a for a in check_arities if a <= max_arity + 1))
    return {"basis": [{"degree": n, "index": i} for i, (n, _) in enumerate(basis)],
            "operations": {str(k): v for k, v in ops.items()},
            "relations": rel.to_dict(),
            "contraction": t.c.verify().to_dict()}
