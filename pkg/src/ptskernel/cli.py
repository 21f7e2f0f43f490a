"""Command line front end.

Exit codes: 0 ok, 1 rejected, 2 usage or parse error, 3 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .correspond import annotate, is_annotated, synthesize_context
from .errors import FuelExhausted, KernelError, ParseError, TypingError
from .ginf import GinfJudgment, ginf_diagnose, ginf_infer
from .oracle import EnumBudget, correspondence_report
from .pts_check import Context, ContextfulJudgment, check_judgment, infer_type
from .pts_spec import load_spec
from .surface import DEFAULT_SORTS, parse_context, parse_term, print_context, print_judgment, print_term
from .syntax import DEFAULT_FUEL, Free, hfv, hfv_ordered, hfvt, normalize

EXIT = {"ok": 0, "fail": 1, "error": 2, "fuel-exhausted": 3}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _spec(args):
    if not args.spec:
        raise UsageError("--spec is required")
    try:
        return load_spec(args.spec)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot load spec {args.spec}: {e}") from None


def _sorts(spec):
    return DEFAULT_SORTS | spec.sorts if spec is not None else DEFAULT_SORTS


def _ctx(args, spec, annotated=False) -> Context:
    if not args.ctx:
        return Context()
    return parse_context(_read(args.ctx), annotated=annotated, sorts=_sorts(spec))


def cmd_check_pts(args):
    spec = _spec(args)
    ctx = _ctx(args, spec)
    sorts = _sorts(spec)
    m = parse_term(_read(args.term), mode="pts", ctx=ctx, sorts=sorts)
    try:
        inferred = infer_type(spec, ctx, m, args.fuel)
    except TypingError as e:
        return {"status": "fail", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
    out = {"status": "ok", "type": print_term(inferred), "diagnostics": []}
    if args.type:
        expected = parse_term(_read(args.type), mode="pts", ctx=ctx, sorts=sorts)
        if not check_judgment(spec, ContextfulJudgment(ctx, m, expected), args.fuel):
            out["status"] = "fail"
            out["diagnostics"].append(f"inferred type is not convertible to {print_term(expected)}")
    return out


def cmd_check_ginf(args):
    spec = _spec(args)
    sorts = _sorts(spec)
    m = parse_term(_read(args.term), mode="ginf", sorts=sorts)
    if not args.type:
        try:
            inferred = ginf_infer(spec, m, args.fuel)
        except TypingError as e:
            return {"status": "fail", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
        return {"status": "ok", "type": print_term(inferred), "diagnostics": []}
    expected = parse_term(_read(args.type), mode="ginf", sorts=sorts)
    ok, inferred, err = ginf_diagnose(spec, GinfJudgment(m, expected), args.fuel)
    diags = [] if err is None else [f"{type(err).__name__}: {err}"]
    if not ok and err is None:
        diags.append(f"inferred type is not convertible to {print_term(expected)}")
    return {
        "status": "ok" if ok else "fail",
        "type": None if inferred is None else print_term(inferred),
        "diagnostics": diags,
    }


def cmd_synth(args):
    spec = _spec(args)
    sorts = _sorts(spec)
    m = parse_term(_read(args.term), mode="ginf", sorts=sorts)
    try:
        ty = (parse_term(_read(args.type), mode="ginf", sorts=sorts) if args.type
              else ginf_infer(spec, m, args.fuel))
        j = synthesize_context(GinfJudgment(m, ty), spec, args.fuel)
    except TypingError as e:
        return {"status": "fail", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
    return {
        "status": "ok",
        "type": print_term(ty),
        "context": print_context(j.ctx).splitlines(),
        "judgment": print_judgment(j),
        "diagnostics": [],
    }


def cmd_annotate(args):
    spec = _spec(args)
    ctx = _ctx(args, spec)
    sorts = _sorts(spec)
    m = parse_term(_read(args.term), mode="pts", ctx=ctx, sorts=sorts)
    ty = parse_term(_read(args.type), mode="pts", ctx=ctx, sorts=sorts)
    try:
        j = annotate(ContextfulJudgment(ctx, m, ty))
    except TypingError as e:
        return {"status": "fail", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
    derivable = check_judgment(spec, j, args.fuel)
    return {
        "status": "ok" if derivable and is_annotated(j) else "fail",
        "type": print_term(j.type),
        "context": print_context(j.ctx).splitlines(),
        "judgment": print_judgment(j),
        "diagnostics": [] if derivable else ["annotated judgment is not derivable"],
    }


def cmd_normalize(args):
    m = parse_term(_read(args.term), mode="pts")
    return {"status": "ok", "type": None, "normal_form": print_term(normalize(m, args.fuel)),
            "diagnostics": []}


def _var_listing(m, which):
    chosen = which(m)
    return [print_term(Free(v)) for v in hfv_ordered(m) if v in chosen]


def cmd_hfv(args):
    m = parse_term(_read(args.term), mode="pts")
    return {"status": "ok", "type": None, "variables": _var_listing(m, hfv), "diagnostics": []}


def cmd_hfvt(args):
    m = parse_term(_read(args.term), mode="pts")
    return {"status": "ok", "type": None, "variables": _var_listing(m, hfvt), "diagnostics": []}


def cmd_enumerate(args):
    spec = _spec(args)
    budget = EnumBudget(
        max_term_size=args.size,
        max_tag_depth=args.tag_depth,
        max_names_per_tag=args.names,
        sort_alphabet=tuple(sorted(spec.sorts)) or ("*",),
        fuel=min(args.fuel, 10_000),
    )
    rep = correspondence_report(spec, budget)
    return {
        "status": "ok" if rep.ok else "fail",
        "type": None,
        "report": rep.to_dict(),
        "text": rep.format_text(),
        "diagnostics": list(rep.violations),
    }


def _render_text(res) -> list:
    if "text" in res:
        return [res["text"]]
    if "judgment" in res:
        return res.get("context", []) + [res["judgment"]]
    if "normal_form" in res:
        return [res["normal_form"]]
    if "variables" in res:
        return res["variables"]
    return [] if res.get("type") is None else [res["type"]]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="reduction step budget")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="ptskernel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *, spec=False, ctx=False, type_=None):
        sp = sub.add_parser(name, parents=[common])
        if spec:
            sp.add_argument("--spec", required=True, help="preset name or spec file")
        if ctx:
            sp.add_argument("--ctx", help="context file")
        sp.add_argument("term", help="term file ('-' for stdin)")
        if type_ == "optional":
            sp.add_argument("type", nargs="?", help="type file")
        elif type_ == "required":
            sp.add_argument("type", help="type file")
        sp.set_defaults(func=func)
        return sp

    add("check-pts", cmd_check_pts, spec=True, ctx=True, type_="optional")
    add("check-ginf", cmd_check_ginf, spec=True, type_="optional")
    add("synth", cmd_synth, spec=True, type_="optional")
    add("annotate", cmd_annotate, spec=True, ctx=True, type_="required")
    add("normalize", cmd_normalize)
    add("hfv", cmd_hfv)
    add("hfvt", cmd_hfvt)

    en = sub.add_parser("enumerate", parents=[common])
    en.add_argument("--spec", required=True)
    en.add_argument("--size", type=int, required=True)
    en.add_argument("--tag-depth", type=int, default=1)
    en.add_argument("--names", type=int, default=1)
    en.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    try:
        if args.fuel <= 0:
            raise UsageError("--fuel must be positive")
        res = args.func(args)
    except FuelExhausted as e:
        res = {"status": "fuel-exhausted", "type": None, "diagnostics": [f"FuelExhausted: {e}"]}
    except (UsageError, ParseError) as e:
        res = {"status": "error", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
    except (KernelError, ValueError) as e:
        res = {"status": "error", "type": None, "diagnostics": [f"{type(e).__name__}: {e}"]}
    if args.json:
        print(json.dumps(res, sort_keys=True, ensure_ascii=False))
    else:
        for line in _render_text(res):
            print(line)
        if "text" not in res:
            for d in res["diagnostics"]:
                print(f"{cmd}: {d}", file=sys.stderr)
    return EXIT[res["status"]]


if __name__ == "__main__":
    sys.exit(main())
