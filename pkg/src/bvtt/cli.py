"""Command-line front end.

Every command reads one document (``-`` for stdin) and writes a JSON report
to stdout or ``--out``.  Exit codes: 0 when every checked property holds,
1 when one fails (or the answer is inconclusive), 2 on input or usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__, gallery
from .bv import verify_bv, verify_bv_infinity, verify_conjugation_identity
from .deformation import (DeformationSeries, DgLieError, MCError, char_p_probe, solve_mc,
                          to_dg_lie, tt_solve_mc)
from .degeneration import (DegenerationError, degenerates_at_E1, induced_delta_on_homology,
                           u_freeness)
from .field import Mod, format_scalar
from .linalg import SparseMatrix
from .quasiabelian import (CertificateError, dd_lemma, induced_bracket_on_homology,
                           zigzag_certificate)
from .report import Report
from .textformat import BuildError, FormatError, build, dumps, parse, reduce_mod
from .transfer import transfer_report


class UsageError(Exception):
    """Input the command cannot work with; exit code 2."""


def plain(x):
    """Convert a certificate into JSON-ready values (exact scalars become strings)."""
    if isinstance(x, (Fraction, Mod)):
        return format_scalar(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, SparseMatrix):
        return {"rows": x.nrows, "cols": x.ncols,
                "entries": [[r, c, format_scalar(v)] for (r, c), v in sorted(x.entries.items())]}
    if isinstance(x, Report):
        return plain(x.to_dict())
    if hasattr(x, "to_dict"):
        return plain(x.to_dict())
    if dataclasses.is_dataclass(x):
        return {f.name: plain(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {",".join(map(str, k)) if isinstance(k, tuple) else str(k): plain(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    return str(x)


def render(report: dict) -> str:
    return json.dumps(plain(report), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


# -- input ----------------------------------------------------------------------

def _read(path):
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load(raw: bytes):
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise UsageError("input is not UTF-8") from None
    try:
        return parse(text)
    except FormatError as e:
        raise UsageError(str(e)) from None


def _built(doc):
    try:
        return build(doc)
    except BuildError as e:
        raise UsageError(f"construction fails: {e}") from None


def _classical(built):
    """The classical BV structure of a document, with its axioms checked."""
    if built.bv is None:
        raise UsageError("the document declares no BV structure")
    rep = verify_bv(built.bv, brackets=False)
    if not rep.ok:
        raise UsageError(f"not a BV structure: {rep.failures[0]['what']}")
    return built.bv


def _dglie(built):
    if built.dglie is not None:
        return built.dglie
    if built.bv is not None and built.bv.is_classical:
        try:
            return to_dg_lie(_classical(built))
        except DgLieError as e:
            raise UsageError(str(e)) from None
    raise UsageError("the document declares no dg-Lie or classical BV structure")


# -- commands -------------------------------------------------------------------

def cmd_verify(doc, args):
    try:
        built = build(doc)
    except BuildError as e:
        return False, {"construction": {"ok": False, "error": str(e)}}
    if built.kind is None:
        raise UsageError("the document declares no structure to verify")
    out = {"kind": built.kind}
    if built.kind == "bv":
        rep = verify_bv(built.bv)
        out["bv"] = rep
        return rep.ok, out
    if built.kind == "bv_infinity":
        rep = verify_bv_infinity(built.bv)
        out["bv_infinity"] = rep
        ok = rep.ok
        if built.bv.lam is not None:
            conj = verify_conjugation_identity(built.bv)
            out["conjugation_identity"] = conj
            ok = ok and conj.ok
        return ok, out
    # dg_lie: the construction already checked the dg-Lie axioms
    l = built.dglie
    out["dg_lie"] = {"ok": True, "dims": l.dims,
                     "homology": {n: l.homology(n).dim for n in l.degrees}}
    return True, out


def cmd_ddlemma(doc, args):
    cert = dd_lemma(_classical(_built(doc)))
    return cert.verdict, {"dd_lemma": cert}


def cmd_degeneration(doc, args):
    b = _classical(_built(doc))
    try:
        e1 = degenerates_at_E1(b, args.truncation)
        free = u_freeness(b, args.truncation)
    except DegenerationError as e:
        raise UsageError(str(e)) from None
    out = {"degenerates_at_E1": e1, "u_freeness": free}
    d1 = {n: m for n, m in induced_delta_on_homology(b).items() if not m.is_zero()}
    if d1:
        out["d1_witness"] = d1
    if e1.verdict != free.verdict:
        out["disagreement"] = True
    return e1.verdict is True and free.verdict is True, out


def cmd_quasiabelian(doc, args):
    b = _classical(_built(doc))
    dd = dd_lemma(b)
    out = {"dd_lemma": {"verdict": dd.verdict, "failing_degree": dd.failing_degree}}
    ok = dd.verdict
    if dd.verdict:
        z = zigzag_certificate(b)
        out["zigzag"] = z
        ok = ok and z.valid
    try:
        br = induced_bracket_on_homology(b)
    except CertificateError as e:
        raise UsageError(str(e)) from None
    out["induced_bracket"] = {"is_zero": br.is_zero,
                              "nonzero": {k: v for k, v in br.table.items() if any(v)}}
    return ok and br.is_zero, out


def _class(text, field):
    try:
        return [field(Fraction(c)) for c in text.split(",")] if text else []
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad class coordinates {text!r}: {e}") from None


def cmd_deform(doc, args):
    built = _built(doc)
    if args.order < 1:
        raise UsageError("--order must be at least 1")
    try:
        if args.method == "tt":
            b = _classical(built)
            res = tt_solve_mc(b, _class(args.class_, b.field), args.order)
        else:
            l = _dglie(built)
            res = solve_mc(l, _class(args.class_, l.field), args.order, args.method)
    except (MCError, DgLieError) as e:
        raise UsageError(str(e)) from None
    if isinstance(res, DeformationSeries):
        return True, {"series": res}
    return False, {"obstruction": res}


def cmd_charp(doc, args):
    p = args.p
    if not doc.field.is_prime_field:
        try:
            doc = reduce_mod(doc, p)
        except BuildError as e:
            raise UsageError(str(e)) from None
    elif doc.field.characteristic() != p:
        raise UsageError(f"document is over F_{doc.field.characteristic()}, not F_{p}")
    l = _dglie(_built(doc))
    try:
        classes = [_class(c, l.field) for c in args.class_] if args.class_ else None
        probe = char_p_probe(l, classes)
    except MCError as e:
        raise UsageError(str(e)) from None
    return probe.all_solved, {"probe": probe}


def cmd_transfer(doc, args):
    if not 2 <= args.arity <= 4:
        raise UsageError("--arity must be between 2 and 4")
    l = _dglie(_built(doc))
    if l.field.characteristic() != 0:
        raise UsageError("transfer needs characteristic 0")
    rep = transfer_report(l, args.arity, check_arities=tuple(range(3, args.arity + 2)))
    ok = rep["relations"]["ok"] and rep["contraction"]["ok"]
    return ok, {"transfer": rep}


COMMANDS = {
    "verify": cmd_verify,
    "ddlemma": cmd_ddlemma,
    "degeneration": cmd_degeneration,
    "quasiabelian": cmd_quasiabelian,
    "deform": cmd_deform,
    "charp": cmd_charp,
    "transfer": cmd_transfer,
}


def run(command, raw: bytes, args) -> tuple[int, str]:
    """Run one document command; returns (exit code, report text)."""
    doc = _load(raw)
    ok, body = COMMANDS[command](doc, args)
    report = {"command": command, "version": __version__,
              "input_sha256": hashlib.sha256(raw).hexdigest(),
              "verdict": bool(ok), **body}
    return (0 if ok else 1), render(report)


def _gallery(args) -> tuple[int, str]:
    if args.list or args.name is None:
        return 0, "".join(f"{e.name}\t{e.description}\n" for e in gallery.ENTRIES.values())
    try:
        entry = gallery.get(args.name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    if args.replay:
        rep = gallery.replay(entry)
        return (0 if rep.ok else 1), render({"command": "gallery", "version": __version__,
                                             "entry": entry.name, "verdict": rep.ok,
                                             "replay": rep})
    return 0, dumps(entry.document())


def parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bvtt", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def doc_command(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("file", help="input document, or - for stdin")
        p.add_argument("--out", help="write the report here instead of stdout")
        return p

    doc_command("verify", "check the declared structure's axioms")
    doc_command("ddlemma", "decide the dΔ-lemma degree by degree")
    p = doc_command("degeneration", "E1-degeneration and u-freeness of the negative cyclic complex")
    p.add_argument("--truncation", type=int, default=None, help="starting u-truncation M")
    doc_command("quasiabelian", "dΔ-lemma, zig-zag certificate and induced bracket")
    p = doc_command("deform", "solve the Maurer-Cartan system from a class in H^1")
    p.add_argument("--class", dest="class_", required=True, help="comma-separated H^1 coordinates")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--method", choices=("generic", "tt", "homotopy"), default="generic")
    p = doc_command("charp", "Maurer-Cartan solvability modulo t^p over F_p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--class", dest="class_", action="append",
                   help="probe this H^1 class instead of the basis (repeatable)")
    p = doc_command("transfer", "transferred L-infinity brackets on homology")
    p.add_argument("--arity", type=int, default=3)

    g = sub.add_parser("gallery", help="print a built-in example document")
    g.add_argument("name", nargs="?")
    g.add_argument("--list", action="store_true")
    g.add_argument("--replay", action="store_true", help="recompute the entry's manifest")
    g.add_argument("--out")
    return top


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        if args.command == "gallery":
            code, text = _gallery(args)
        else:
            code, text = run(args.command, _read(args.file), args)
    except UsageError as e:
        print(f"bvtt {args.command}: error: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
