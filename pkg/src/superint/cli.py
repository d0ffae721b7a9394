"""Command-line front end.

Every subcommand emits a report ``{"schema": "1", "command": ..., "input": ...,
"result": ..., "warnings": [...]}``.  Wall-clock timing goes to stderr so the
report itself is byte-stable.  Exit codes: 0 success, 1 computation failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from . import catalog, compat, deteq, painleve
from .parsing import ParseError, parse_expression
from .symcore import DPoly, ReductionError, to_text

SCHEMA = "1"
COMMANDS = ("counts", "deteq", "lcc", "classify", "nlcc", "painleve", "verify", "catalog-run")

__all__ = ["main", "run", "build_parser", "parse_expression", "UsageError"]


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="superint", description="Doubly exotic superintegrable potentials workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--pretty", action="store_true", help="mathematical rendering in text output")

    def ansatz_opts(sp):
        sp.add_argument("--order", "-N", type=int)
        sp.add_argument("--family", choices=("I", "II", "i", "ii"))
        sp.add_argument("--a", action="append", default=[], metavar="a,m,n=EXPR",
                        help="explicit leading coefficient A_{a,m,n}; repeatable")
        sp.add_argument("--catalog", metavar="ID", help="take the A-map from a catalog entry")

    sp = sub.add_parser("counts", help="number of determining equations and unknown functions")
    sp.add_argument("--order", "-N", type=int, required=True)
    common(sp)

    sp = sub.add_parser("deteq", help="determining equations level by level")
    ansatz_opts(sp)
    sp.add_argument("--level", type=int, help="highest level to build")
    common(sp)

    for name, hlp in (("lcc", "linear compatibility condition"), ("classify", "exotic classification")):
        sp = sub.add_parser(name, help=hlp)
        ansatz_opts(sp)
        common(sp)

    sp = sub.add_parser("nlcc", help="nonlinear compatibility condition")
    ansatz_opts(sp)
    sp.add_argument("--level", type=int, default=2)
    common(sp)

    sp = sub.add_parser("painleve", help="ARS Painleve test")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--catalog", metavar="ID")
    g.add_argument("--in", dest="input", metavar="PATH", help="ODE file")
    sp.add_argument("--classical", action="store_true", help="set hbar = 0 before testing")
    common(sp)

    sp = sub.add_parser("verify", help="check a catalog potential against the determining equations")
    sp.add_argument("--catalog", metavar="ID", required=True)
    sp.add_argument("--level", type=int)
    common(sp)

    sp = sub.add_parser("catalog-run", help="resonance regression over the whole catalog")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    return p


# --------------------------------------------------------------------------
# option handling


def _env_level() -> Optional[int]:
    raw = os.environ.get("WORKBENCH_MAX_LEVEL")
    if raw is None or raw == "":
        return None
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"WORKBENCH_MAX_LEVEL must be an integer, got {raw!r}") from None
    if v < 0:
        raise UsageError("WORKBENCH_MAX_LEVEL must be non-negative")
    return v


def _cap(level: Optional[int]) -> Optional[int]:
    env = _env_level()
    if level is None:
        return env
    return level if env is None else min(level, env)


def _parse_a(items: List[str]) -> Dict[Tuple[int, int, int], DPoly]:
    out = {}
    for it in items:
        key, sep, val = it.partition("=")
        if not sep:
            raise UsageError(f"--a expects a,m,n=EXPR, got {it!r}")
        key = key.strip()
        if key.startswith("A_"):
            key = key[2:].replace("_", ",")
        try:
            idx = tuple(int(t) for t in key.split(","))
        except ValueError:
            raise UsageError(f"bad index in --a {it!r}") from None
        if len(idx) != 3:
            raise UsageError(f"--a index needs three integers: {it!r}")
        out[idx] = parse_expression(val)
    return out


def _ansatz(args) -> Tuple[deteq.IntegralAnsatz, Optional[str]]:
    """Resolve the ansatz and the family label (if any)."""
    sources = sum(bool(x) for x in (args.family, args.a, args.catalog))
    if sources != 1:
        raise UsageError("give exactly one of --family, --a or --catalog")
    if args.catalog:
        try:
            e = catalog.get(args.catalog)
        except catalog.UnknownEntry as exc:
            raise UsageError(str(exc)) from None
        if args.order is not None and args.order != e.N:
            raise UsageError(f"--order {args.order} conflicts with {e.id} (N={e.N})")
        return e.ansatz(), e.family
    if args.order is None:
        raise UsageError("--order is required")
    if args.family:
        try:
            return compat.family_ansatz(args.order, args.family), args.family.upper()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        return deteq.IntegralAnsatz(args.order, _parse_a(args.a)), None
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# subcommands


class _Ctx:
    def __init__(self, pretty: bool):
        self.pretty = pretty
        self.warnings: List[str] = []

    def t(self, p: DPoly) -> str:
        return to_text(p, self.pretty)


def _cmd_counts(args, ctx):
    if args.order < 2:
        raise UsageError("--order must be at least 2")
    e, u = deteq.counts(args.order)
    return {"equations": e, "unknowns": u}, True


def _cmd_deteq(args, ctx):
    a, _ = _ansatz(args)
    sysm = deteq.determining_system(a, _cap(args.level))
    return {"N": a.N, "A": a.a_text(),
            "levels": [{"l": l, "equations": [ctx.t(e) for e in sysm.levels[l]]} for l in sorted(sysm.levels)]}, True


def _lcc_payload(a, ctx):
    r = compat.lcc(a)
    cls = compat.classify(a, r)
    out = {"N": a.N, "A": a.a_text(), "class": cls.name}
    out.update({k: ctx.t(v) for k, v in r.components().items()})
    if r.extra:
        ctx.warnings.append("LCC has components beyond degree one in the other variable")
    return out, r


def _cmd_lcc(args, ctx):
    a, _ = _ansatz(args)
    out, r = _lcc_payload(a, ctx)
    out["lcc"] = ctx.t(r.full)
    return out, True


def _cmd_classify(args, ctx):
    a, _ = _ansatz(args)
    out, _ = _lcc_payload(a, ctx)
    out["nlcc_x"] = None
    out["nlcc_y"] = None
    return out, True


def _cmd_nlcc(args, ctx):
    a, fam = _ansatz(args)
    level = args.level
    env = _env_level()
    if env is not None and level > env:
        raise UsageError(f"--level {level} exceeds WORKBENCH_MAX_LEVEL={env}")
    if level < 2 or level > deteq.level_count(a.N):
        raise UsageError(f"--level must lie in 2..{deteq.level_count(a.N)} for N={a.N}")
    cls = compat.classify(a)
    if cls.name != compat.DOUBLY:
        ctx.warnings.append(f"ansatz is {cls.name}; the condition mixes with linear conditions")
    subst = {"V1": "F1", "V2": "F2"} if fam == "II" else None
    res = compat.nlcc(a, level, subst)
    out = {"N": a.N, "A": a.a_text(), "class": cls.name, "level": level,
           "nlcc_x": ctx.t(res.x_part), "nlcc_y": ctx.t(res.y_part), "mixed": ctx.t(res.mixed),
           "constants": res.constants}
    if res.mixed.is_zero():
        sep = compat.separate(res)
        out["separated"] = {"x": [ctx.t(p) for p in sep.x_odes], "y": [ctx.t(p) for p in sep.y_odes],
                            "fixed": {k: ctx.t(v) for k, v in sep.constraints.items()}}
    if args.catalog and fam == "II" and level == 2:
        match = {}
        for side in ("x", "y"):
            m = catalog.nlcc_match(args.catalog, side)
            match[side] = {"matches": m.matches, "mapping": {k: ctx.t(v) for k, v in m.mapping.items()},
                           "leftover": [ctx.t(p) for p in m.leftover]}
        out["catalog_match"] = match
    return out, True


def _cmd_painleve(args, ctx):
    if args.catalog:
        try:
            ode = catalog.get(args.catalog).ode
        except catalog.UnknownEntry as exc:
            raise UsageError(str(exc)) from None
    else:
        try:
            ode = painleve.load_ode(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    if args.classical:
        ode = ode.substitute({"hbar": 0})
    rep = painleve.painleve_test(ode)
    out = rep.to_json()
    out["passing_resonance_sets"] = rep.passing_resonance_sets()
    for b in rep.branches:
        if b.balance.a0_relation is not None:
            ctx.warnings.append(f"branch p={b.balance.p} has a symbolic leading coefficient")
        if b.verdict == painleve.PASS_CONSTRAINED:
            ctx.warnings.append(f"branch p={b.balance.p} passes only under constraints")
    return out, True


def _cmd_verify(args, ctx):
    try:
        catalog.get(args.catalog)
    except catalog.UnknownEntry as exc:
        raise UsageError(str(exc)) from None
    rep = catalog.verify_potential(args.catalog, _cap(args.level))
    return rep.to_json(), rep.error is None


def _check_one(entry_id: str) -> dict:
    return catalog.check_resonances(entry_id).to_json()


def _cmd_catalog_run(args, ctx):
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    ids = catalog.ids()
    if args.jobs == 1:
        rows = [_check_one(i) for i in ids]
    else:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_check_one, ids))
    bad = [r["id"] for r in rows if not r["ok"]]
    for b in bad:
        ctx.warnings.append(f"{b}: expected resonances not found on a passing branch")
    return {"entries": rows, "mismatches": bad}, not bad


_DISPATCH = {
    "counts": _cmd_counts, "deteq": _cmd_deteq, "lcc": _cmd_lcc, "classify": _cmd_classify,
    "nlcc": _cmd_nlcc, "painleve": _cmd_painleve, "verify": _cmd_verify, "catalog-run": _cmd_catalog_run,
}


# --------------------------------------------------------------------------
# output


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _text(payload, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(payload, dict):
        for k in sorted(payload):
            v = payload[k]
            if _flat(v):
                lines.append(f"{pad}{k}: [{', '.join(_scalar(x) for x in v)}]")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(payload, list):
        for v in payload:
            if _flat(v):
                lines.append(f"{pad}- [{', '.join(_scalar(x) for x in v)}]")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(payload))
    return lines


def _scalar(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (dict, list)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    res = report["result"]
    if report["command"] == "classify":
        head = [res["class"]]
    else:
        head = []
    body = head + _text(res)
    if report["warnings"]:
        body.append("warnings:")
        body += [f"  - {w}" for w in report["warnings"]]
    return "\n".join(body) + "\n"


def run(argv: Optional[List[str]] = None) -> Tuple[int, str]:
    """Parse, dispatch and render; returns ``(exit status, rendered report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return 2, f"usage error: {exc}\n"
    ctx = _Ctx(getattr(args, "pretty", False))
    t0 = time.perf_counter()
    try:
        payload, ok = _DISPATCH[args.command](args, ctx)
    except (UsageError, ParseError, painleve.OdeFormatError) as exc:
        return 2, f"usage error: {exc}\n"
    except (compat.ChainError, ReductionError, ValueError, ZeroDivisionError) as exc:
        return 1, f"error: {exc}\n"
    elapsed = time.perf_counter() - t0
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format", "pretty")}
    report = {"schema": SCHEMA, "command": args.command, "input": echo, "result": payload,
              "warnings": ctx.warnings}
    text = render(report, args.format)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            return 2, f"usage error: cannot write {args.out}: {exc.strerror}\n"
        text = ""
    print(f"elapsed {elapsed:.3f}s", file=sys.stderr)
    return (0 if ok else 1), text


def main(argv: Optional[List[str]] = None) -> int:
    code, text = run(argv)
    stream = sys.stdout if code != 2 and not text.startswith("error:") else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
