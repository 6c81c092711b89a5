"""Command-line front end.

Two input syntaxes, one canonical output:

* JSON documents: ``{"lines": [...], "m": [...], "phi": [...]}`` for
  parameter data, ``{"lines", "m", "eps"}`` for signed symmetric
  multisegments, ``{"lines", "m"}`` for plain multisegments.  Half-integers
  travel as strings such as ``"3"`` or ``"-5/2"``.
* A compact DSL: ``[b,e]@line`` terms joined by ``+``, with ``N*`` for
  multiplicity, ``:+``/``:-`` for a sign on a centered segment, ``!`` / ``~``
  after the line id for the non-good classes, ``~`` after the bracket for the
  mirrored side, and ``;`` separating the segment part from ``S<a>`` blocks.

Rendering is canonical: byte-identical for equal objects, and parse of
render is the identity.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import random
import re
import sys

from .segments import (
    BAD,
    GOOD,
    GRID_HALF,
    GRID_INT,
    UGLY,
    DomainError,
    HalfInt,
    Line,
    Segment,
)
from .langdata import (
    LanglandsData,
    Multisegment,
    PhiComponent,
    SignedSymMultisegment,
    sign_product,
    transfer,
    validate,
)
from .mw_gl import kz_capacity, kz_capacity_labeled, mw_transpose
from .ad_core import ad_data, ad_symm
from .derivatives import derivative, derivative_L
from .verify import (
    SUITES,
    enumerate_data,
    first_start_prediction,
    run_properties,
    standard_sweep,
)


class ParseError(DomainError):
    """Input text rejected; carries the offending position."""

    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            msg = f"at position {pos}: {msg}"
        super().__init__(msg)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_CLASS_MARK = {"": GOOD, "!": BAD, "~": UGLY}

_ITEM_RE = re.compile(
    r"""^
    (?:(?P<mult>\d+)\*)?
    (?:
        \[(?P<b>-?\d+(?:/2)?),(?P<e>-?\d+(?:/2)?)\](?P<mirror>~)?
      | S(?P<a>\d+)
    )
    (?:@(?P<ident>[A-Za-z_][A-Za-z0-9_.-]*)(?P<cls>[!~])?)?
    (?::(?P<sign>[+-]))?
    $""",
    re.X,
)


def _split_terms(text: str, offset: int):
    """Terms of a '+'-joined list with their positions in the source.

    A '+' directly after a sign colon belongs to its term.
    """
    breaks = []
    prev = ""
    for i, ch in enumerate(text):
        if ch == "+" and prev != ":":
            breaks.append(i)
        if not ch.isspace():
            prev = ch
    out = []
    start = 0
    for cut in breaks + [len(text)]:
        term = text[start:cut]
        stripped = term.strip()
        lead = len(term) - len(term.lstrip())
        if stripped:
            out.append((stripped, offset + start + lead))
        elif (start, cut) != (0, len(text)):
            raise ParseError("empty term", offset + start)
        start = cut + 1
    return out


def _scan_items(text: str, offset: int):
    items = []
    for term, pos in _split_terms(text, offset):
        m = _ITEM_RE.match(term)
        if not m:
            raise ParseError(f"cannot read {term!r}", pos)
        items.append((m, pos))
    return items


def _grid_of_twice(t: int) -> str:
    return GRID_INT if t % 2 == 0 else GRID_HALF


def _dsl_lines(all_items):
    """Infer each mentioned line's class and grid from its items."""
    cls_by_id: dict = {}
    grid_by_id: dict = {}
    for m, pos in all_items:
        ident = m.group("ident") or "rho"
        cls = _CLASS_MARK[m.group("cls") or ""]
        if m.group("mirror"):
            cls = UGLY
        prev = cls_by_id.get(ident)
        if prev is not None and prev != cls and GOOD not in (prev, cls):
            raise ParseError(f"line {ident} marked both {prev} and {cls}", pos)
        if prev is None or prev == GOOD:
            cls_by_id[ident] = cls
        if m.group("b") is not None:
            t = HalfInt.parse(m.group("b")).twice
        else:
            t = int(m.group("a")) - 1
        grid = _grid_of_twice(t)
        if cls_by_id[ident] == UGLY:
            if grid != GRID_INT:
                raise ParseError(
                    f"half-integral coefficient on the {ident} line", pos
                )
            grid = GRID_INT
        prev_grid = grid_by_id.get(ident)
        if prev_grid is not None and prev_grid != grid:
            raise ParseError(
                f"mixed integral and half-integral coefficients on {ident}", pos
            )
        grid_by_id[ident] = grid
    return {
        ident: Line(ident, cls_by_id[ident], grid_by_id[ident])
        for ident in cls_by_id
    }


def _dsl_segment(m, pos, lines):
    ln = lines[m.group("ident") or "rho"]
    b = HalfInt.parse(m.group("b"))
    e = HalfInt.parse(m.group("e"))
    side = None
    if ln.cls == UGLY:
        side = 1 if m.group("mirror") else 0
    try:
        return Segment(ln, b, e, side)
    except DomainError as err:
        raise ParseError(str(err), pos) from None


def parse_dsl(text: str):
    src = text.strip()
    if not src:
        return LanglandsData(Multisegment([]), [])
    m_text, sep, phi_text = src.partition(";")
    m_items = _scan_items(m_text, 0) if m_text.strip() else []
    phi_items = (
        _scan_items(phi_text, len(m_text) + 1) if sep and phi_text.strip() else []
    )
    for m, pos in m_items:
        if m.group("a") is not None:
            raise ParseError("blocks belong after ';'", pos)
    for m, pos in phi_items:
        if m.group("a") is None:
            raise ParseError("only S<a> blocks may follow ';'", pos)
    lines = _dsl_lines(m_items + phi_items)
    segs = []
    minus = set()
    signed = False
    for m, pos in m_items:
        d = _dsl_segment(m, pos, lines)
        segs.extend([d] * int(m.group("mult") or 1))
        if m.group("sign"):
            signed = True
            if m.group("sign") == "-":
                minus.add(d)
    if sep:
        blocks = []
        eta_minus = set()
        for m, pos in phi_items:
            ln = lines[m.group("ident") or "rho"]
            try:
                p = PhiComponent(ln, int(m.group("a")))
            except DomainError as err:
                raise ParseError(str(err), pos) from None
            blocks.extend([p] * int(m.group("mult") or 1))
            if m.group("sign") == "-":
                eta_minus.add(p)
        try:
            return LanglandsData(Multisegment(segs), blocks, eta_minus=eta_minus)
        except DomainError as err:
            raise ParseError(str(err)) from None
    try:
        if signed:
            return SignedSymMultisegment(Multisegment(segs), minus=minus)
        return Multisegment(segs)
    except DomainError as err:
        raise ParseError(str(err)) from None


def _json_half(v, what):
    if isinstance(v, str):
        try:
            return HalfInt.parse(v)
        except DomainError as err:
            raise ParseError(f"{what}: {err}") from None
    if isinstance(v, int):
        return HalfInt(v)
    raise ParseError(f"{what}: expected a half-integer string, got {v!r}")


def _json_lines(obj):
    lines = {}
    for rec in obj.get("lines", []):
        try:
            ln = Line(rec["id"], rec["class"], rec["grid"])
        except (KeyError, TypeError) as err:
            raise ParseError(f"bad line record {rec!r} ({err})") from None
        if ln.id in lines:
            raise ParseError(f"line {ln.id} declared twice")
        lines[ln.id] = ln
    return lines


def _json_segment(rec, lines):
    try:
        ln = lines[rec["line"]]
    except (KeyError, TypeError):
        raise ParseError(f"segment {rec!r} names an undeclared line") from None
    b = _json_half(rec.get("b"), "segment beginning")
    e = _json_half(rec.get("e"), "segment end")
    side = rec.get("side")
    return Segment(ln, b, e, side)


def parse_json(obj):
    if not isinstance(obj, dict):
        raise ParseError("top level must be a JSON object")
    lines = _json_lines(obj)
    segs = [_json_segment(rec, lines) for rec in obj.get("m", [])]
    m = Multisegment(segs)
    if "phi" in obj:
        blocks = []
        eta_minus = set()
        for rec in obj["phi"]:
            try:
                ln = lines[rec["line"]]
                p = PhiComponent(ln, int(rec["a"]))
            except (KeyError, TypeError, ValueError):
                raise ParseError(f"bad block record {rec!r}") from None
            blocks.append(p)
            if rec.get("eta") == -1:
                eta_minus.add(p)
        return LanglandsData(m, blocks, eta_minus=eta_minus)
    if "eps" in obj:
        minus = set()
        for rec in obj["eps"]:
            d = _json_segment(rec, lines)
            if rec.get("sign") not in (1, -1):
                raise ParseError(f"sign record {rec!r} needs sign 1 or -1")
            if rec["sign"] == -1:
                minus.add(d)
        return SignedSymMultisegment(m, minus=minus)
    return m


def parse_input(text: str):
    """Parse JSON or DSL text into a validated object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, err.pos) from None
        out = parse_json(obj)
    else:
        out = parse_dsl(stripped)
    report = validate(out)
    if report:
        raise ParseError("; ".join(report))
    return out


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _lines_doc(lines):
    return [
        {"id": ln.id, "class": ln.cls, "grid": ln.grid}
        for ln in sorted(lines, key=lambda ln: ln.id)
    ]


def _seg_doc(d: Segment):
    rec = {"line": d.line.id, "b": str(d.b), "e": str(d.e)}
    if d.side is not None:
        rec["side"] = d.side
    return rec


def render_doc(x) -> dict:
    """The canonical JSON document (as a dict) for any of the three kinds."""
    if isinstance(x, LanglandsData):
        doc = {"lines": _lines_doc(x.lines())}
        doc["m"] = [_seg_doc(d) for d in x.n]
        phi = []
        for p in x.phi:
            rec = {"line": p.line.id, "a": p.a}
            if p.line.cls == GOOD:
                rec["eta"] = x.eta(p)
            phi.append(rec)
        doc["phi"] = phi
        return doc
    if isinstance(x, SignedSymMultisegment):
        doc = {"lines": _lines_doc(x.lines())}
        doc["m"] = [_seg_doc(d) for d in x.m]
        eps = []
        for d in sorted(
            {d for d in x.m if d.is_centered and d.line.cls == GOOD},
            key=lambda d: (d.line.id, d.e.twice),
        ):
            eps.append(dict(_seg_doc(d), sign=x.eps(d)))
        doc["eps"] = eps
        return doc
    if isinstance(x, Multisegment):
        return {"lines": _lines_doc(x.lines()), "m": [_seg_doc(d) for d in x]}
    raise DomainError(f"cannot render {type(x).__name__}")


def render_output(x) -> str:
    return json.dumps(render_doc(x), separators=(",", ":"))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _read_input(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _as_signed(x):
    if isinstance(x, SignedSymMultisegment):
        return x
    if isinstance(x, Multisegment):
        return SignedSymMultisegment(x)
    raise DomainError("expected a (signed) multisegment, got parameter data")


def _the_line(x, ident):
    lines = x.lines()
    if ident is not None:
        for ln in lines:
            if ln.id == ident:
                return ln
        raise DomainError(f"no line {ident} in the input")
    if len(lines) != 1:
        raise DomainError("input has several lines; pass --line")
    return lines[0]


def _cmd_dual(args) -> int:
    x = parse_input(_read_input(args.input))
    if isinstance(x, LanglandsData):
        print(render_output(ad_data(x)))
    else:
        print(render_output(ad_symm(_as_signed(x))))
    return 0


def _bare_str(m: Multisegment) -> str:
    """Ascending segment list, line markers dropped when uninformative."""
    if not m.entries:
        return "0"
    orderly = sorted(m, key=lambda d: (d.b.twice, d.e.twice))
    if len(m.lines()) == 1 and all(d.side is None for d in m):
        return "+".join(f"[{d.b},{d.e}]" for d in orderly)
    return "+".join(str(d) for d in orderly)


def _cmd_mw(args) -> int:
    x = parse_input(_read_input(args.input))
    if not isinstance(x, Multisegment):
        raise DomainError("mw expects a plain multisegment")
    print(_bare_str(mw_transpose(x)))
    return 0


def _cmd_capacity(args) -> int:
    x = parse_input(_read_input(args.input))
    target = parse_input(args.target)
    if not isinstance(target, Multisegment) or len(target.entries) != 1:
        raise DomainError("--target must be a single segment")
    tgt = target.entries[0]
    if args.labeled:
        print(kz_capacity_labeled(_as_signed(x), tgt))
    else:
        if not isinstance(x, Multisegment):
            raise DomainError("plain capacity expects a plain multisegment")
        print(kz_capacity(x, tgt))
    return 0


def _cmd_derive(args) -> int:
    x = _as_signed(parse_input(_read_input(args.input)))
    ln = _the_line(x, args.line)
    if args.L_chunk:
        res = derivative_L(x, ln)
    else:
        if args.x is None:
            raise DomainError("derive needs --x or --L-chunk")
        res = derivative(x, ln, HalfInt.parse(args.x))
    print(json.dumps({"k": res.k, "result": render_doc(res.result)},
                     separators=(",", ":")))
    return 0


def _cmd_validate(args) -> int:
    text = _read_input(args.input)
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, err.pos) from None
        x = parse_json(obj)
    else:
        x = parse_dsl(stripped)
    report = validate(x)
    if report:
        for cond in report:
            print(cond)
        return 1
    print("OK")
    return 0


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("AZDUAL_SEED", "0"))


def _cmd_check(args) -> int:
    stream = list(
        standard_sweep(args.max_coeff, args.max_pairs, args.max_centered)
    )
    if args.seed is not None:
        random.Random(args.seed).shuffle(stream)
    report = run_properties(stream, suites=args.suite or None)
    print(json.dumps(report, separators=(",", ":")))
    return 0 if report["pass"] else 1


def _dataset_line() -> Line:
    return Line("rho", GOOD, GRID_INT)


def _cmd_dataset(args) -> int:
    ln = _dataset_line()
    seed = _default_seed(args)
    rows_out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    as_csv = bool(args.out) and args.out.endswith(".csv")
    writer = None
    if as_csv:
        writer = csv.writer(rows_out)
        writer.writerow(["input", "dual", "degree", "e_max", "sign_products"])
    emax_bad = degree_bad = 0
    start_hits = start_total = 0
    try:
        for d in enumerate_data(
            args.N, args.km, args.kphi, [ln], mode="sampled",
            count=args.count, seed=seed,
        ):
            dd = ad_data(d)
            s = transfer(d)
            t = transfer(dd)
            em_s, em_t = s.max_end(), t.max_end()
            if em_s != em_t:
                emax_bad += 1
            if s.degree != t.degree:
                degree_bad += 1
            fp = first_start_prediction(d, dd)
            if fp is not None:
                start_total += 1
                start_hits += fp[0] == fp[1]
            products = {
                lnn.id: sign_product(t, lnn)
                for lnn in t.lines()
                if lnn.cls == GOOD
            }
            if as_csv:
                writer.writerow([
                    render_output(d),
                    render_output(dd),
                    t.degree,
                    str(em_t) if em_t is not None else "",
                    json.dumps(products, separators=(",", ":")),
                ])
            else:
                rows_out.write(json.dumps({
                    "input": render_doc(d),
                    "dual": render_doc(dd),
                    "degree": t.degree,
                    "e_max": str(em_t) if em_t is not None else None,
                    "sign_products": products,
                }, separators=(",", ":")) + "\n")
    finally:
        if args.out:
            rows_out.close()
    summary = {
        "count": args.count,
        "seed": seed,
        "emax_violations": emax_bad,
        "degree_violations": degree_bad,
        "first_start_agreement": (
            round(start_hits / start_total, 6) if start_total else None
        ),
    }
    out = sys.stdout if args.out else sys.stderr
    out.write(json.dumps(summary, separators=(",", ":")) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="azdual",
        description="Duality, derivatives, and checks for segment data.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dual", help="dual of parameter data or a symmetric multisegment")
    p.add_argument("input", help="JSON/DSL text, a file path, or - for stdin")
    p.set_defaults(fn=_cmd_dual)

    p = sub.add_parser("mw", help="transpose of a plain multisegment")
    p.add_argument("input")
    p.set_defaults(fn=_cmd_mw)

    p = sub.add_parser("capacity", help="containment capacity toward a target segment")
    p.add_argument("input")
    p.add_argument("--target", required=True, help="single segment, DSL or JSON")
    p.add_argument("--labeled", action="store_true",
                   help="use the labeled refinement on a signed symmetric input")
    p.set_defaults(fn=_cmd_capacity)

    p = sub.add_parser("derive", help="derivative operators")
    p.add_argument("input")
    p.add_argument("--line", default=None)
    p.add_argument("--x", default=None, help="grid point, e.g. 2 or -3/2 (use --x=-3/2)")
    p.add_argument("--L-chunk", action="store_true", dest="L_chunk",
                   help="apply the zero-chunk operator instead of --x")
    p.set_defaults(fn=_cmd_derive)

    p = sub.add_parser("check", help="run property suites over the standard sweep")
    p.add_argument("--max-coeff", type=int, default=2)
    p.add_argument("--max-pairs", type=int, default=3)
    p.add_argument("--max-centered", type=int, default=3)
    p.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="repeatable; default is every suite")
    p.add_argument("--seed", type=int, default=None,
                   help="shuffle the sweep order (default: natural order)")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("dataset", help="sampled corpus of data and their duals")
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--km", type=int, default=5)
    p.add_argument("--kphi", type=int, default=3)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None,
                   help="default: AZDUAL_SEED or 0")
    p.add_argument("--out", default=None,
                   help="write rows here (.csv for CSV, else JSON lines)")
    p.set_defaults(fn=_cmd_dataset)

    p = sub.add_parser("validate", help="report membership violations")
    p.add_argument("input")
    p.set_defaults(fn=_cmd_validate)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
