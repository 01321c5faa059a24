"""Command-line front end.

Output format is text unless ``--format json`` is given or ``TILTSHEAF_FORMAT``
is set to ``json``.  Exit status 1 reports a module error, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from .branch import (BranchSheaf, Placement, enumerate_branches, enumerate_wing_branches,
                     undercut, validate_branch)
from .classify import PointSet, enumerate_tilting, parse_slope, tilting_descriptor
from .copresent import (RenderContext, check_balance, record_to_dict, render_record,
                        run_copresentation)
from .curve_model import CurveDescriptor, fraction_str, global_invariants
from .errors import InputError, TiltsheafError
from .kgroup import KClass, avg_euler_form, euler_form, riemann_roch_check
from .oracle import oracle_hom_ext
from .tube import TubeCoord

FORMAT_ENV = "TILTSHEAF_FORMAT"


@dataclass
class CliResult:
    status: int
    stdout: str
    stderr: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(message)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _curve(path: str) -> CurveDescriptor:
    return CurveDescriptor.from_dict(_read_json(path))


def _branch(path: Optional[str], d: CurveDescriptor) -> BranchSheaf:
    if not path:
        return BranchSheaf()

    def rank_of(label: str) -> int:
        if not d.has_point(label):
            raise InputError(f"branch mentions unknown point {label!r}")
        return d.point(label).p

    return BranchSheaf.from_list(_read_json(path), rank_of)


def _points(text: Optional[str]) -> list[str]:
    if not text:
        return []
    return [s.strip() for s in text.split(",") if s.strip()]


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2)


# ---------------------------------------------------------------- commands

def cmd_classify(args: argparse.Namespace, fmt: str) -> str:
    inv = global_invariants(_curve(args.curve))
    if fmt == "json":
        return _dump(inv.to_dict())
    return (f"{inv.rep_type.value.lower()}, chi'={fraction_str(inv.chi_orb)}, "
            f"delta={fraction_str(inv.delta_omega)}, pbar={inv.p_bar}")


def cmd_branches(args: argparse.Namespace, fmt: str) -> str:
    if args.single_wing_root_length is not None:
        comps = enumerate_wing_branches(args.single_wing_root_length, args.p, point=args.point)
        items = [BranchSheaf((c,)) for c in comps]
    else:
        items = enumerate_branches(args.p, args.max_components, point=args.point)
    if args.count:
        return _dump({"count": len(items)}) if fmt == "json" else str(len(items))
    if fmt == "json":
        return _dump([B.to_list() for B in items])
    lines = []
    for B in items:
        parts = [f"{X.a}:{X.length}" for X in sorted(B.summands, key=lambda c: c.sort_key())]
        lines.append(" ".join(parts) if parts else "0")
    return "\n".join(lines)


def cmd_tilting(args: argparse.Namespace, fmt: str) -> str:
    d = _curve(args.curve)
    slopes = [parse_slope(s) for s in args.slope] if args.slope else None
    if args.enumerate or args.count_only:
        descs = enumerate_tilting(d, _points(args.window) or None,
                                  slopes=slopes or (parse_slope("inf"),),
                                  include_cofinite=args.cofinite,
                                  max_components=args.max_components)
        if args.count_only:
            return _dump({"count": len(descs)}) if fmt == "json" else str(len(descs))
        if fmt == "json":
            return _dump([t.to_dict() for t in descs])
        return "\n".join(_descriptor_line(t) for t in descs)
    V = PointSet(frozenset(_points(args.V)), complement=args.cofinite)
    if slopes and len(slopes) > 1:
        raise InputError("a single descriptor takes one --slope")
    t = tilting_descriptor(_branch(args.branch, d), V, d, slopes[0] if slopes else None)
    return _dump(t.to_dict()) if fmt == "json" else _descriptor_line(t)


def _descriptor_line(t: Any) -> str:
    summands = " ".join(f"{X.point}:{X.a}:{X.length}"
                        for X in sorted(t.branch.summands, key=lambda c: c.sort_key()))
    rays = " ".join(f"{rx.point}:{sorted(rx.members)}" for rx in t.pruefer)
    return (f"{t.rep_type.value} slope={t.slope} V={t.V} B=[{summands}] "
            f"pruefer=[{rays}] tag={t.torsionfree_tag.value}")


def cmd_copresent(args: argparse.Namespace, fmt: str) -> str:
    d = _curve(args.curve)
    B = _branch(args.branch, d)
    anchors = {}
    for item in args.anchor or []:
        label, _, value = item.partition("=")
        try:
            anchors[label] = int(value)
        except ValueError as exc:
            raise InputError(f"anchor must read point=offset, got {item!r}") from exc
    result = run_copresentation(B, _points(args.V), d, anchors)
    ctx = RenderContext.build(d, B, result.V)
    if fmt == "json":
        return _dump({
            "records": [record_to_dict(r, ctx, B, d, args.symbolic) for r in result.records],
            "first_step": record_to_dict(result.step1, ctx, B, d, args.symbolic),
            "aggregate": record_to_dict(result.aggregate, ctx, B, d, args.symbolic),
            "anchors": {pc.point: pc.anchor for pc in result.calibration.points},
            "ts3_plus": result.ts3_plus,
            "diagnostics": list(result.diagnostics),
            "derived_from_prose": list(result.derived_from_prose),
            "balance_failures": check_balance(result, d),
        })
    lines = [render_record(r, ctx, B, d, args.symbolic) for r in result.records]
    if args.aggregate:
        lines += ["", render_record(result.step1, ctx, B, d, args.symbolic),
                  render_record(result.aggregate, ctx, B, d, args.symbolic)]
    return "\n".join(lines)


def cmd_kform(args: argparse.Namespace, fmt: str) -> str:
    d = _curve(args.curve)
    a, b = KClass.from_dict(_read_json(args.a)), KClass.from_dict(_read_json(args.b))
    out: dict[str, Any] = {"euler_form": euler_form(a, b, d)}
    if args.avg or args.rr:
        out["avg_euler_form"] = avg_euler_form(a, b, d)
    if args.rr:
        rr = riemann_roch_check(a, b, d)
        out["riemann_roch"] = {"lhs": fraction_str(rr.lhs), "rhs": fraction_str(rr.rhs),
                               "equal": rr.equal}
    if fmt == "json":
        return _dump(out)
    lines = [f"<a,b> = {out['euler_form']}"]
    if "avg_euler_form" in out:
        lines.append(f"<<a,b>> = {out['avg_euler_form']}")
    if args.rr:
        rr = out["riemann_roch"]
        lines.append(f"RR: {rr['lhs']} = {rr['rhs']} -> {str(rr['equal']).lower()}")
    return "\n".join(lines)


def _width(text: str, p: int) -> int:
    text = text.strip()
    try:
        value = int(text[:-1] or 1) * p if text.endswith("p") else int(text)
    except ValueError as exc:
        raise InputError(f"bad width {text!r}") from exc
    if value < 1:
        raise InputError("width must be positive")
    return value


def diagram_lines(B: BranchSheaf, V: Sequence[str], d: CurveDescriptor, x: str,
                  width: int) -> list[str]:
    """Rows of the tube at x from length p-1 down to 1; column k holds socle offset -k."""
    p = d.point(x).p
    comps = B.at(x)
    roots = {c.root for c in comps}
    summands = {X for c in comps for X in c.summands}
    kind = Placement.INTERIOR if x in V else Placement.EXTERIOR
    under = set().union(*(undercut(c, kind) for c in comps)) if comps else set()
    pruefer = set()
    if x in V:
        t = tilting_descriptor(B, [x], d)
        pruefer = {j for rx in t.pruefer if rx.point == x for j in rx.members}
    rows = [" ".join("I" if (-k) % p in pruefer else " " for k in range(width)).rstrip()]
    for n in range(max(p - 1, 1), 0, -1):
        cells = []
        for k in range(width):
            X = TubeCoord(x, -k, n, p)
            if X in roots:
                cells.append("^")
            elif X in summands:
                cells.append("*")
            elif X in under:
                cells.append("u")
            else:
                cells.append("o")
        rows.append(" ".join(cells))
    return rows


def cmd_diagram(args: argparse.Namespace, fmt: str) -> str:
    d = _curve(args.curve)
    B = _branch(args.branch, d)
    check = validate_branch(B, d)
    if not check:
        raise TiltsheafError(f"invalid branch: {check.reason}")
    V = _points(args.V)
    targets = list(B.points) or [pt.label for pt in d.exceptional_points]
    out = {}
    for x in targets:
        p = d.point(x).p
        width = _width(args.width, p) if args.width else p
        out[x] = diagram_lines(B, V, d, x, width)
    if fmt == "json":
        return _dump(out)
    blocks = [f"{x}:\n" + "\n".join(rows) for x, rows in out.items()]
    return "\n\n".join(blocks)


def cmd_oracle(args: argparse.Namespace, fmt: str) -> str:
    X = TubeCoord("x", args.a1, args.n1, args.p)
    Y = TubeCoord("x", args.a2, args.n2, args.p)
    hom, ext = oracle_hom_ext(X, Y, truncation=args.truncation)
    return _dump({"hom": hom, "ext": ext}) if fmt == "json" else f"hom={hom} ext={ext}"


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tiltsheaf", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("text", "json"), default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser,
                                metavar="{classify,branches,tilting,copresent,kform,diagram}")

    p = sub.add_parser("classify", help="representation type and global invariants")
    p.add_argument("curve")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("branches", help="enumerate branch sheaves of one tube")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--single-wing-root-length", type=int, default=None)
    p.add_argument("--max-components", type=int, default=None)
    p.add_argument("--point", default="x")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser("tilting", help="classification descriptors")
    p.add_argument("curve")
    p.add_argument("--V", default="")
    p.add_argument("--branch")
    p.add_argument("--slope", action="append")
    p.add_argument("--cofinite", action="store_true",
                   help="read --V as the points left out")
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--window", help="comma-separated points for --enumerate")
    p.add_argument("--max-components", type=int, default=None)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_tilting)

    p = sub.add_parser("copresent", help="copresentation of the canonical configuration")
    p.add_argument("curve")
    p.add_argument("--V", required=True)
    p.add_argument("--branch")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--aggregate", action="store_true")
    p.add_argument("--anchor", action="append", help="point=offset")
    p.set_defaults(func=cmd_copresent)

    p = sub.add_parser("kform", help="Euler form values")
    p.add_argument("curve")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--avg", action="store_true")
    group.add_argument("--rr", action="store_true")
    p.set_defaults(func=cmd_kform)

    p = sub.add_parser("diagram", help="ASCII picture of the tube")
    p.add_argument("curve")
    p.add_argument("--branch")
    p.add_argument("--V", default="")
    p.add_argument("--width", help="columns, an integer or a multiple like 2p")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("oracle")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--a1", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--a2", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--truncation", type=int, default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def run_cli(argv: Sequence[str]) -> CliResult:
    try:
        args = build_parser().parse_args(list(argv))
        fmt = args.format or os.environ.get(FORMAT_ENV, "text")
        if fmt not in ("text", "json"):
            raise InputError(f"{FORMAT_ENV} must be text or json, got {fmt!r}")
        return CliResult(0, args.func(args, fmt))
    except InputError as exc:
        return CliResult(2, "", f"error: {exc}")
    except TiltsheafError as exc:
        return CliResult(1, "", f"error: {exc}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run_cli(sys.argv[1:] if argv is None else argv)
    if result.stdout:
        print(result.stdout)
    if result.stderr:
        print(result.stderr, file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
