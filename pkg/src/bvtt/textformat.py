"""Line-oriented text format for algebra presentations, operators and structures.

    # comment
    field Q                      | field F 7
    generator e1 degree 1 [bidegree 1 0] [nilpotent 3]
    cap 3
    d e3 = e1 e2
    operator D degree -1 { a -> c ; b -> -e }
    multivector pi arity 2 = d/de1 d/de2 - 2 d/de1 d/de3
    lie g basis x y z { x y -> z }
    structure bv pi=pi

Expressions are signed sums of terms ``coeff monomial``; a coefficient is
``a``, ``a/b`` or ``a mod p`` and a monomial juxtaposes generator names,
with ``x^k`` for powers and ``1`` for the unit.  A ``{ ... }`` block may run
over several lines.  Structure kinds and their bindings:

    bv            delta=<op> | pi=<multivector>
    bv_infinity   lambda=<op> | deltas=<op>,<op>,... | pi=<mv> eta=<mv>
                  | polyvectors=<mv>,<mv>,...
    dg_lie        coefficients=<lie>   (g ⊗ (A, d))
                  | delta=<op> [column=<p>] | pi=<mv> [column=<p>]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Algebra, AlgebraError, Element, Generator
from .bv import (BVStructure, StructureError, build_hierarchy, check_differential, generalized_poisson,
                 jacobi_structure, koszul_structure)
from .deformation import CoefficientLie, DgLie, DgLieError, tensor_dg_lie, to_dg_lie
from .field import FieldSpec, Mod, format_scalar, is_prime
from .operators import GradedOperator, MultiVector, OperatorError, derivation_from_images

KINDS = {
    "bv": ({"delta"}, {"pi"}),
    "bv_infinity": ({"lambda"}, {"deltas"}, {"pi", "eta"}, {"polyvectors"}),
    "dg_lie": ({"coefficients"}, {"delta"}, {"pi"}, {"delta", "column"}, {"pi", "column"}),
}
RESERVED = {"d", "mod", "field", "generator", "cap", "operator", "multivector", "lie", "structure",
            "degree", "bidegree", "nilpotent", "arity", "basis"}

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<dual>d/d[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<op>[-+^;{}=,])
""", re.VERBOSE)


class FormatError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}" + (f", col {col}" if col is not None else "") + ": " if line else ""
        super().__init__(where + message)


@dataclass
class Document:
    field: FieldSpec
    generators: list
    cap: int
    differential: dict = field(default_factory=dict)    # generator name -> Element
    operators: dict = field(default_factory=dict)       # name -> GradedOperator
    multivectors: dict = field(default_factory=dict)    # name -> MultiVector
    lies: dict = field(default_factory=dict)            # name -> CoefficientLie
    structure: tuple | None = None                      # (kind, ((key, value), ...))

    @property
    def algebra(self) -> Algebra:
        return Algebra(self.field, self.generators, self.cap)

    def d(self) -> GradedOperator:
        return derivation_from_images(self.algebra, self.differential, 1)

    def __eq__(self, other):
        if not isinstance(other, Document):
            return NotImplemented
        return (self.field == other.field and list(self.generators) == list(other.generators)
                and self.cap == other.cap and self.differential == other.differential
                and list(self.operators.items()) == list(other.operators.items())
                and all(self.operators[k].shift == other.operators[k].shift for k in self.operators)
                and list(self.multivectors.items()) == list(other.multivectors.items())
                and list(self.lies.items()) == list(other.lies.items())
                and self.structure == other.structure)


# -- tokens -------------------------------------------------------------------

@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text, line, col0=1):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        if m.lastgroup != "space":
            out.append(_Tok(m.lastgroup, m.group(), line, col0 + pos))
        pos = m.end()
    return out


class _Stream:
    def __init__(self, toks, line):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self, what="token"):
        t = self.peek()
        if t is None:
            raise FormatError(f"expected {what} at end of line", self.line)
        self.i += 1
        return t

    def expect(self, text):
        t = self.next(repr(text))
        if t.text != text:
            raise FormatError(f"expected {text!r}, got {t.text!r}", t.line, t.col)
        return t

    def int(self, what="integer"):
        sign = 1
        t = self.next(what)
        if t.text in "+-" and t.kind == "op":
            sign = -1 if t.text == "-" else 1
            t = self.next(what)
        if t.kind != "num" or "/" in t.text:
            raise FormatError(f"expected {what}, got {t.text!r}", t.line, t.col)
        return sign * int(t.text)

    def name(self, what="name"):
        t = self.next(what)
        if t.kind != "name":
            raise FormatError(f"expected {what}, got {t.text!r}", t.line, t.col)
        return t

    def done(self):
        t = self.peek()
        if t is not None:
            raise FormatError(f"unexpected {t.text!r}", t.line, t.col)

    def at_end(self):
        return self.peek() is None


# -- expressions ---------------------------------------------------------------

def _coefficient(s: _Stream, fld: FieldSpec):
    t = s.next("coefficient")
    value = Fraction(t.text)
    if s.peek() is not None and s.peek().text == "mod":
        s.next()
        p = s.int("modulus")
        if not fld.is_prime_field or p != fld.p:
            raise FormatError(f"coefficient mod {p} in a document over {fld.describe()}", t.line, t.col)
    try:
        return fld(value)
    except ZeroDivisionError:
        raise FormatError(f"denominator of {t.text} vanishes in {fld.describe()}", t.line, t.col) from None


def _terms(s: _Stream, factor, stop=(";", "}")):
    """Parse ``[±] term (± term)*`` into (sign, atoms) pairs.

    ``factor(stream, first)`` consumes one atom; a number in first position is
    the coefficient of the term.
    """
    terms = []
    while True:
        t = s.peek()
        if t is None or t.text in stop:
            if not terms:
                raise FormatError("empty expression", s.line, t.col if t else None)
            return terms
        sign = 1
        if t.kind == "op" and t.text in "+-":
            s.next()
            sign = -1 if t.text == "-" else 1
        elif terms:
            raise FormatError(f"expected '+' or '-', got {t.text!r}", t.line, t.col)
        atoms = []
        while True:
            nxt = s.peek()
            if nxt is None or nxt.text in stop or (nxt.kind == "op" and nxt.text in "+-"):
                break
            atoms.append(factor(s, not atoms))
        if not atoms:
            raise FormatError("missing term", t.line, t.col)
        terms.append((sign, atoms))


def _parse_element(s: _Stream, alg: Algebra, stop=(";", "}")) -> Element:
    fld = alg.field
    out = alg.zero()

    def factor(st, coefficient_slot):
        t = st.peek()
        if coefficient_slot and t.kind == "num":
            return ("c", _coefficient(st, fld))
        t = st.next()
        if t.kind == "num" and t.text == "1":
            return ("m", alg.one())
        if t.kind != "name":
            raise FormatError(f"expected a generator name, got {t.text!r}", t.line, t.col)
        try:
            g = alg.gen(t.text)
        except (KeyError, AlgebraError):
            raise FormatError(f"unknown generator {t.text!r}", t.line, t.col) from None
        power = 1
        if st.peek() is not None and st.peek().text == "^":
            st.next()
            power = st.int("exponent")
            if power < 1:
                raise FormatError("exponents must be positive", t.line, t.col)
        x = alg.one()
        for _ in range(power):
            x = x * g
        return ("m", x)

    for sign, atoms in _terms(s, factor, stop):
        term = alg.one().scale(fld(sign))
        for kind, val in atoms:
            term = term.scale(val) if kind == "c" else term * val
        out = out + term
    return out


def _parse_multivector(s: _Stream, alg: Algebra, line) -> MultiVector:
    fld = alg.field
    out = MultiVector(alg, {})

    def factor(st, coefficient_slot):
        t = st.peek()
        if coefficient_slot and t.kind == "num":
            return ("c", _coefficient(st, fld))
        t = st.next()
        if t.kind == "num" and t.text == "1":
            return ("v", MultiVector(alg, {(): 1}))
        if t.kind != "dual":
            raise FormatError(f"expected d/d<generator>, got {t.text!r}", t.line, t.col)
        name = t.text[3:]
        try:
            return ("v", MultiVector.dual(alg, name))
        except (KeyError, AlgebraError):
            raise FormatError(f"unknown generator {name!r}", t.line, t.col) from None
        except OperatorError as e:
            raise FormatError(str(e), t.line, t.col) from None

    for sign, atoms in _terms(s, factor, stop=()):
        term = MultiVector(alg, {(): sign})
        for kind, val in atoms:
            term = term.scale(val) if kind == "c" else term.wedge(val)
        out = out + term
    return out


def _parse_lie_combo(s: _Stream, names, fld, stop=(";", "}")) -> dict:
    out = {}

    def factor(st, coefficient_slot):
        t = st.peek()
        if coefficient_slot and t.kind == "num":
            return ("c", _coefficient(st, fld))
        t = st.next()
        if t.kind != "name" or t.text not in names:
            raise FormatError(f"unknown basis element {t.text!r}", t.line, t.col)
        return ("x", names.index(t.text))

    for sign, atoms in _terms(s, factor, stop):
        c = fld(sign)
        idx = None
        for kind, val in atoms:
            if kind == "c":
                c = c * val
            elif idx is None:
                idx = val
            else:
                raise FormatError("products are not allowed in a Lie bracket value", s.line)
        if idx is None:
            raise FormatError("a bracket value must be a combination of basis elements", s.line)
        out[idx] = out.get(idx, fld.zero) + c
    return {k: v for k, v in out.items() if v}


# -- documents ---------------------------------------------------------------

def _logical_lines(text):
    """Join ``{ ... }`` blocks spread over several lines; yields (lineno, tokens)."""
    pending, start, depth = [], None, 0
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = _tokenize(body, n)
        if not toks and depth == 0:
            continue
        if depth == 0:
            start = n
        for t in toks:
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth < 0:
                    raise FormatError("unbalanced '}'", t.line, t.col)
        pending.extend(toks)
        if depth == 0:
            yield start, pending
            pending = []
    if depth:
        raise FormatError("unterminated '{' block", start)


def parse(text: str) -> Document:
    fld = None
    gens = []
    cap = None
    alg = None
    doc = None
    names_used = {}
    structure_line = None

    def need_algebra(line):
        nonlocal alg, doc
        if alg is None:
            if fld is None:
                raise FormatError("'field' must come first", line)
            if cap is None:
                raise FormatError("'cap' must be declared before any expression", line)
            try:
                alg = Algebra(fld, gens, cap)
            except AlgebraError as e:
                raise FormatError(str(e), line) from None
            doc = Document(fld, list(gens), cap)
        return alg

    def claim(name_tok, what):
        if name_tok.text in RESERVED:
            raise FormatError(f"{name_tok.text!r} is a reserved word", name_tok.line, name_tok.col)
        if name_tok.text in names_used:
            raise FormatError(f"{what} {name_tok.text!r} redefines a {names_used[name_tok.text]}",
                              name_tok.line, name_tok.col)
        names_used[name_tok.text] = what

    for line, toks in _logical_lines(text):
        s = _Stream(toks, line)
        head = s.name("keyword")
        kw = head.text
        if kw == "field":
            if fld is not None:
                raise FormatError("field declared twice", line)
            t = s.name("Q or F")
            if t.text == "Q":
                fld = FieldSpec.rationals()
            elif t.text == "F":
                p = s.int("prime")
                if not is_prime(p):
                    raise FormatError(f"{p} is not prime", line)
                fld = FieldSpec.prime(p)
            else:
                raise FormatError(f"unknown field {t.text!r}", t.line, t.col)
            s.done()
        elif kw == "generator":
            if fld is None:
                raise FormatError("'field' must come first", line)
            if alg is not None:
                raise FormatError("generators must precede expressions", line)
            nt = s.name("generator name")
            claim(nt, "generator")
            s.expect("degree")
            deg = s.int("degree")
            bideg = nil = None
            while not s.at_end():
                opt = s.name("option")
                if opt.text == "bidegree" and bideg is None:
                    bideg = (s.int(), s.int())
                elif opt.text == "nilpotent" and nil is None:
                    nil = s.int()
                else:
                    raise FormatError(f"unexpected {opt.text!r}", opt.line, opt.col)
            if deg < 0:
                raise FormatError(f"generator {nt.text} has negative degree {deg}", line)
            if deg % 2 == 0 and (nil is None or nil < 1):
                raise FormatError(f"even generator {nt.text} needs 'nilpotent <e>' with e >= 1", line)
            if bideg is not None and sum(bideg) != deg:
                raise FormatError(f"bidegree {bideg} does not sum to degree {deg}", line)
            gens.append(Generator(nt.text, deg, bideg, nil))
        elif kw == "cap":
            if cap is not None:
                raise FormatError("cap declared twice", line)
            cap = s.int("degree cap")
            if cap < 0:
                raise FormatError("cap must be non-negative", line)
            s.done()
        elif kw == "d":
            a = need_algebra(line)
            nt = s.name("generator name")
            if nt.text not in {g.name for g in a.generators}:
                raise FormatError(f"unknown generator {nt.text!r}", nt.line, nt.col)
            if nt.text in doc.differential:
                raise FormatError(f"d {nt.text} given twice", line)
            s.expect("=")
            x = _parse_element(s, a, stop=())
            s.done()
            want = a.generators[a.generator_index(nt.text)].degree + 1
            if x and (not x.is_homogeneous() or x.degree != want):
                raise FormatError(f"degree mismatch: d {nt.text} must have degree {want}", line)
            if x:
                doc.differential[nt.text] = x
        elif kw == "operator":
            a = need_algebra(line)
            nt = s.name("operator name")
            claim(nt, "operator")
            s.expect("degree")
            shift = s.int("degree")
            s.expect("{")
            images = {}
            while s.peek() is not None and s.peek().text != "}":
                src = _parse_element(s, a, stop=("->",))
                if len(src.terms) != 1 or list(src.terms.values())[0] != a.field.one:
                    raise FormatError("the left side of '->' must be a basis monomial", line)
                mono = next(iter(src.terms))
                s.expect("->")
                img = _parse_element(s, a)
                if mono in images:
                    raise FormatError(f"image of {a.format_monomial(mono)} given twice", line)
                tgt = a.monomial_degree(mono) + shift
                if img and (not img.is_homogeneous() or img.degree != tgt):
                    raise FormatError(f"degree mismatch: image of {a.format_monomial(mono)} "
                                      f"must have degree {tgt}", line)
                images[mono] = img
                if s.peek() is not None and s.peek().text == ";":
                    s.next()
            s.expect("}")
            s.done()
            doc.operators[nt.text] = GradedOperator.from_monomial_map(a, shift, lambda m: images.get(m))
        elif kw == "multivector":
            a = need_algebra(line)
            nt = s.name("multivector name")
            claim(nt, "multivector")
            s.expect("arity")
            k = s.int("arity")
            s.expect("=")
            mv = _parse_multivector(s, a, line)
            s.done()
            if any(len(key) != k for key in mv.terms):
                raise FormatError(f"multivector {nt.text} has terms of arity other than {k}", line)
            doc.multivectors[nt.text] = mv
        elif kw == "lie":
            need_algebra(line)
            nt = s.name("Lie algebra name")
            claim(nt, "lie")
            s.expect("basis")
            names = []
            while s.peek() is not None and s.peek().text != "{":
                b = s.name("basis element")
                if b.text in names:
                    raise FormatError(f"duplicate basis element {b.text!r}", b.line, b.col)
                names.append(b.text)
            s.expect("{")
            consts = {}
            while s.peek() is not None and s.peek().text != "}":
                x, y = s.name("basis element"), s.name("basis element")
                for t in (x, y):
                    if t.text not in names:
                        raise FormatError(f"unknown basis element {t.text!r}", t.line, t.col)
                i, j = names.index(x.text), names.index(y.text)
                if i >= j:
                    raise FormatError("brackets are listed as [x, y] with x before y in the basis",
                                      x.line, x.col)
                s.expect("->")
                val = _parse_lie_combo(s, names, fld)
                if (i, j) in consts:
                    raise FormatError(f"bracket [{x.text}, {y.text}] given twice", line)
                if val:
                    consts[i, j] = val
                    consts[j, i] = {k: -c for k, c in val.items()}
                if s.peek() is not None and s.peek().text == ";":
                    s.next()
            s.expect("}")
            s.done()
            doc.lies[nt.text] = CoefficientLie(names, consts)
        elif kw == "structure":
            need_algebra(line)
            if doc.structure is not None:
                raise FormatError("structure declared twice", line)
            kt = s.name("structure kind")
            if kt.text not in KINDS:
                raise FormatError(f"unknown structure kind {kt.text!r}", kt.line, kt.col)
            binds = []
            while not s.at_end():
                key = s.name("binding")
                s.expect("=")
                vals = [s.next("value").text]
                while s.peek() is not None and s.peek().text == ",":
                    s.next()
                    vals.append(s.next("value").text)
                binds.append((key.text, ",".join(vals)))
            keys = {k for k, _ in binds}
            if len(keys) != len(binds) or keys not in KINDS[kt.text]:
                allowed = " | ".join(" ".join(sorted(o)) for o in KINDS[kt.text])
                raise FormatError(f"bindings {sorted(keys)} do not fit {kt.text} ({allowed})", line)
            doc.structure = (kt.text, tuple(sorted(binds)))
            structure_line = line
        else:
            raise FormatError(f"unknown keyword {kw!r}", head.line, head.col)
    need_algebra(None)
    _check_bindings(doc, structure_line)
    return doc


def _check_bindings(doc: Document, line=None):
    if doc.structure is None:
        return
    kind, binds = doc.structure
    for key, val in binds:
        items = val.split(",")
        if key in ("delta", "lambda", "deltas"):
            pool, what = doc.operators, "operator"
        elif key in ("pi", "eta", "polyvectors"):
            pool, what = doc.multivectors, "multivector"
        elif key == "coefficients":
            pool, what = doc.lies, "lie"
        else:
            if not re.fullmatch(r"-?\d+", val):
                raise FormatError(f"{key} must be an integer", line)
            continue
        for it in items:
            if it not in pool:
                raise FormatError(f"structure binds {key}={it} but no {what} {it!r} is declared", line)


# -- printing ------------------------------------------------------------------

def _format_terms(pairs):
    """``pairs`` of (coefficient, monomial text or ''), canonical signs and spacing."""
    if not pairs:
        return "0"
    out = []
    for k, (c, mono) in enumerate(pairs):
        neg = not isinstance(c, Mod) and c < 0
        mag = -c if neg else c
        text = format_scalar(mag)
        if mono:
            body = mono if text == "1" else f"{text} {mono}"
        else:
            body = text
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def format_element(x: Element) -> str:
    alg = x.algebra
    order = sorted(x.terms, key=lambda m: (alg.monomial_degree(m), [-e for e in m]))
    return _format_terms([(x.terms[m], "" if not any(m) else alg.format_monomial(m)) for m in order])


def format_multivector(v: MultiVector) -> str:
    names = [g.name for g in v.algebra.generators]
    pairs = []
    for key in sorted(v.terms):
        pairs.append((v.terms[key], " ".join(f"d/d{names[j]}" for j in key)))
    return _format_terms(pairs)


def dumps(doc: Document) -> str:
    alg = doc.algebra
    lines = [f"field F {doc.field.p}" if doc.field.is_prime_field else "field Q"]
    for g in doc.generators:
        line = f"generator {g.name} degree {g.degree}"
        if g.bidegree is not None:
            line += f" bidegree {g.bidegree[0]} {g.bidegree[1]}"
        if g.nilpotent is not None:
            line += f" nilpotent {g.nilpotent}"
        lines.append(line)
    lines.append(f"cap {doc.cap}")
    for g in doc.generators:
        x = doc.differential.get(g.name)
        if x:
            lines.append(f"d {g.name} = {format_element(x)}")
    for name, op in doc.operators.items():
        parts = []
        for deg in alg.degrees:
            for m in alg.basis(deg):
                img = op.apply_monomial(m)
                if img:
                    parts.append(f"{alg.format_monomial(m)} -> {format_element(img)}")
        body = " ; ".join(parts)
        lines.append(f"operator {name} degree {op.shift} {{ {body} }}" if parts
                     else f"operator {name} degree {op.shift} {{ }}")
    for name, mv in doc.multivectors.items():
        k = mv.arity
        lines.append(f"multivector {name} arity {k} = {format_multivector(mv)}")
    for name, lie in doc.lies.items():
        parts = []
        for (i, j), val in sorted(lie.constants.items()):
            if i < j:
                rhs = _format_terms([(val[k], lie.names[k]) for k in sorted(val)])
                parts.append(f"{lie.names[i]} {lie.names[j]} -> {rhs}")
        lines.append(f"lie {name} basis {' '.join(lie.names)} {{ {' ; '.join(parts)} }}" if parts
                     else f"lie {name} basis {' '.join(lie.names)} {{ }}")
    if doc.structure is not None:
        kind, binds = doc.structure
        lines.append(" ".join([f"structure {kind}"] + [f"{k}={v}" for k, v in binds]))
    return "\n".join(lines) + "\n"


# -- building ------------------------------------------------------------------

@dataclass
class Built:
    document: Document
    algebra: Algebra
    d: GradedOperator
    kind: str | None
    bv: BVStructure | None = None
    dglie: DgLie | None = None


class BuildError(ValueError):
    pass


def build(doc: Document) -> Built:
    """Instantiate the declared structure; construction checks raise BuildError."""
    alg = doc.algebra
    d = doc.d()
    try:
        check_differential(d)
    except StructureError as e:
        raise BuildError(str(e)) from None
    if doc.structure is None:
        return Built(doc, alg, d, None)
    kind, binds = doc.structure
    b = dict(binds)
    ops, mvs = doc.operators, doc.multivectors
    out = Built(doc, alg, d, kind)
    try:
        if kind == "bv" or (kind == "dg_lie" and "coefficients" not in b):
            if "delta" in b:
                out.bv = BVStructure(alg, d, [ops[b["delta"]]])
            else:
                out.bv = koszul_structure(alg, d, mvs[b["pi"]])
            if kind == "dg_lie":
                col = int(b["column"]) if "column" in b else None
                out.dglie = to_dg_lie(out.bv, column=col)
        elif kind == "bv_infinity":
            if "lambda" in b:
                out.bv = build_hierarchy(alg, d, ops[b["lambda"]])
            elif "deltas" in b:
                out.bv = BVStructure(alg, d, [ops[n] for n in b["deltas"].split(",")])
            elif "pi" in b:
                out.bv = jacobi_structure(alg, d, mvs[b["pi"]], mvs[b["eta"]])
            else:
                out.bv = generalized_poisson(alg, d, [mvs[n] for n in b["polyvectors"].split(",")])
        else:
            out.dglie = tensor_dg_lie(doc.lies[b["coefficients"]], alg, d)
    except (StructureError, DgLieError, OperatorError, AlgebraError) as e:
        raise BuildError(str(e)) from None
    return out


def document_from(algebra: Algebra, d: GradedOperator | None = None, **parts) -> Document:
    """A document for an existing algebra; ``d`` is read off on the generators."""
    doc = Document(algebra.field, list(algebra.generators), algebra.cap)
    if d is not None:
        for g in algebra.generators:
            img = d.apply(algebra.gen(g.name))
            if img:
                doc.differential[g.name] = img
    doc.operators = dict(parts.get("operators", {}))
    doc.multivectors = dict(parts.get("multivectors", {}))
    doc.lies = dict(parts.get("lies", {}))
    st = parts.get("structure")
    if st is not None:
        kind, binds = st
        doc.structure = (kind, tuple(sorted(binds.items() if isinstance(binds, dict) else binds)))
    return doc


def reduce_mod(doc: Document, p: int) -> Document:
    """The same document over F_p; raises BuildError on a denominator divisible by p."""
    if doc.field.is_prime_field:
        raise BuildError("only documents over Q can be reduced")
    try:
        return parse(dumps(doc).replace("field Q", f"field F {p}", 1))
    except FormatError as e:
        raise BuildError(f"reduction mod {p} fails: {e.message}") from None
