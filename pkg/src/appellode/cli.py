"""Command-line interface.

Exit status: 0 on success, 1 when a verification fails, 2 on usage or parse
errors.  JSON output carries a "schema" field."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .appellpde import Curve, SystemId, minimal_ode, parse_ratfunc
from .catalog import (SCHEMA_VERSION, catalog_entries, get_record, sample_parameters,
                      verify_identity)
from .exactnum import INF, fmt_q
from .fuchsode import (INFINITY, BUILTINS, Lode, builtin_ode, local_exponents, pullback_transform,
                       singular_points)
from .hyperseries import (APPELL_PARAMS, AppellSpec, ExprError, appell_terminating_eval,
                          expr_expand, free_names, parse_expr)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Flag parsing
# ---------------------------------------------------------------------------

def parse_q(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise UsageError(f"expected a rational p/q, got {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise UsageError(f"zero denominator in {text!r}") from None


def parse_params(text) -> dict:
    """'a=1/3,b=1/5' -> {'a': 1/3, 'b': 1/5}."""
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"parameter {part.strip()!r} needs the form name=p/q")
        name, val = part.split("=", 1)
        out[name.strip()] = parse_q(val)
    return out


def parse_theta(text) -> list:
    """'(2,-1/3),(0,1/2)' -> [(2, -1/3), (0, 1/2)]."""
    if not text or not text.strip():
        return []
    pairs = re.findall(r"\(([^()]*)\)", text)
    if not pairs or re.sub(r"\([^()]*\)|[\s,]", "", text):
        raise UsageError(f"theta must be a list of (root,exponent) pairs, got {text!r}")
    out = []
    for p in pairs:
        parts = p.split(",")
        if len(parts) != 2:
            raise UsageError(f"theta entry ({p}) needs exactly a root and an exponent")
        out.append((parse_q(parts[0]), parse_q(parts[1])))
    return out


def load_ode(text: str) -> Lode:
    """'builtin:name:p1,p2,...' (or name=value pairs), or a path to a JSON Lode."""
    if text.startswith("builtin:"):
        parts = text.split(":", 2)
        if len(parts) != 3:
            raise UsageError("builtin equations are written builtin:<name>:<params>")
        name, ps = parts[1], parts[2]
        if name not in BUILTINS:
            raise UsageError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")
        params = parse_params(ps) if "=" in ps else [parse_q(p) for p in ps.split(",") if p.strip()]
        try:
            return builtin_ode(name, params)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        with open(text) as fh:
            return Lode.from_json(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read ODE file {text!r}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{text!r} is not a JSON ODE: {exc}") from None


def parse_point(text: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return parse_q(text)


def _emit(args, obj, text):
    if args.json:
        print(json.dumps({"schema": SCHEMA_VERSION, **obj}, sort_keys=False))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _series_text(val, variables):
    g = val.gs
    body = g.body
    nv = len(variables)
    terms = []
    for k in sorted(body.coeffs, key=lambda k: (sum(k), k)):
        c = body.coeffs[k]
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(variables, k) if e)
        terms.append(fmt_q(c) + (f"*{mono}" if mono else ""))
    s = " + ".join(terms) if terms else "0"
    if body.order != INF:
        s += f" + O(degree {body.order + 1})"
    pre = "*".join(f"{v}^({fmt_q(e)})" for v, e in zip(variables, g.exps) if e)
    const = "" if val.const.is_rational() and val.const.coeff == 1 else f"{val.const} * "
    if pre:
        s = f"{pre} * ({s})"
    return const + s if nv else s


def cmd_taylor(args):
    ast, subst = parse_expr(args.expr)
    env = parse_params(args.params)
    if args.vars:
        variables = tuple(v.strip() for v in args.vars.split(","))
    else:
        names = free_names(ast) - set(env) - set(subst)
        for a in subst.values():
            names |= free_names(a)
        variables = tuple(sorted(names - set(env))) or ("t",)
    if len(variables) > 2:
        raise UsageError(f"at most two expansion variables, got {', '.join(variables)}")
    val = expr_expand((ast, subst), variables, env, args.order)
    body = val.gs.body
    if val.div_from != INF and val.div_from <= args.order:
        print(f"warning: coefficients of degree >= {val.div_from} diverge", file=sys.stderr)
    obj = {
        "variables": list(variables), "order": args.order,
        "constant": str(val.const), "prefactor_exponents": [fmt_q(e) for e in val.gs.exps],
    }
    if len(variables) == 1:
        obj["coefficients"] = [fmt_q(body.coeffs.get((n,), Fraction(0)))
                               for n in range(min(args.order, body.order) + 1)]
    else:
        obj["coefficients"] = {",".join(map(str, k)): fmt_q(c)
                               for k, c in sorted(body.coeffs.items(), key=lambda kc: (sum(kc[0]), kc[0]))}
    _emit(args, obj, _series_text(val, variables))
    return EXIT_OK


def cmd_eval(args):
    env = parse_params(args.params)
    text = args.expr.strip()
    try:
        ast, _ = parse_expr(text)
    except ExprError:
        # the argument pair may be omitted: F2(a;b1,b2;c1,c2)
        if not text.endswith(")"):
            raise
        ast, _ = parse_expr(text[:-1] + ";x,y)")
    if ast[0] != "appell":
        raise UsageError("eval takes a single Appell call such as F2(1/3;-1,-2;-2,-4)")
    from .catalog import eval_rational
    from .hyperseries import unparse
    params = [eval_rational(unparse(p), env) for p in ast[2]]
    spec = AppellSpec(ast[1], params)
    if not spec.terminates():
        raise UsageError(f"{spec} does not terminate in both directions")
    at = [p for p in args.at.split(",")]
    if len(at) != 2:
        raise UsageError("--at needs two rationals x,y")
    x, y = parse_q(at[0]), parse_q(at[1])
    value, terms = appell_terminating_eval(spec, x, y)
    obj = {"spec": {"kind": spec.kind, "params": {k: fmt_q(v) for k, v in spec.p.items()}},
           "at": [fmt_q(x), fmt_q(y)], "value": fmt_q(value), "terms": terms}
    _emit(args, obj, f"{fmt_q(value)}  ({terms} terms)")
    return EXIT_OK


def cmd_derive(args):
    params = parse_params(args.params)
    kind = args.system.upper()
    if kind not in APPELL_PARAMS:
        raise UsageError(f"unknown system {args.system!r}; expected F1, F2, F3 or F4")
    missing = [n for n in APPELL_PARAMS[kind] if n not in params]
    if missing:
        raise UsageError(f"{kind} needs parameters {', '.join(missing)}")
    sys_ = SystemId(kind, params)
    curve = Curve.parse(args.curve)
    t0 = time.perf_counter()
    L = minimal_ode(sys_, curve, args.max_order, args.prolong_depth)
    elapsed = round(time.perf_counter() - t0, 4)
    if not L:
        _emit(args, {"system": sys_.to_json(), "curve": curve.to_json(), "found": False,
                     "detail": str(L), "elapsed": elapsed}, str(L))
        return EXIT_OK
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(L.to_json(), fh)
    _emit(args, {"system": sys_.to_json(), "curve": curve.to_json(), "found": True,
                 "ode": L.to_json(), "elapsed": elapsed}, f"order {L.order}: {L}")
    return EXIT_OK


def cmd_exponents(args):
    L = load_ode(args.ode)
    if args.point:
        points = [parse_point(args.point)]
    else:
        roots, irrational = singular_points(L)
        points = list(roots) + [INFINITY]
        if irrational:
            print("note: some singular points are not rational and are not listed", file=sys.stderr)
    reports = [local_exponents(L, p) for p in points]
    lines = []
    for r in reports:
        pt = r.point if r.point == INFINITY else fmt_q(r.point)
        roots = ", ".join(fmt_q(x) for x in r.rational_roots)
        extra = "" if r.is_complete() else "  (irrational roots remain)"
        lines.append(f"t = {pt}: {{{roots}}}{extra}")
    _emit(args, {"exponents": [r.to_json() for r in reports]}, "\n".join(lines))
    return EXIT_OK


def cmd_pullback(args):
    L = load_ode(args.ode)
    phi = parse_ratfunc(args.phi, "t")
    theta = parse_theta(args.theta)
    M = pullback_transform(L, phi, theta)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(M.to_json(), fh)
    _emit(args, {"ode": M.to_json()}, f"order {M.order}: {M}")
    return EXIT_OK


def _verify_task(task):
    rid, sample, N = task
    return verify_identity(get_record(rid), sample, N)


def cmd_verify(args):
    if args.all == bool(args.id):
        raise UsageError("verify takes either a record id or --all")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.order is not None and args.order < 2:
        raise UsageError("--order must be at least 2")
    if args.all:
        records = catalog_entries()
    else:
        try:
            records = [get_record(args.id)]
        except KeyError:
            raise UsageError(f"no catalog record {args.id!r}") from None
    tasks = []
    for rec in records:
        for s in sample_parameters(rec, args.seed, args.samples):
            tasks.append((rec.id, s, args.order))
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_task, tasks, chunksize=1))
    else:
        reports = [_verify_task(t) for t in tasks]
    failed = [r for r in reports if r.outcome == "fail"]
    for r in reports:
        if args.json:
            print(json.dumps({"schema": SCHEMA_VERSION, **r.to_json()}))
        else:
            sample = ", ".join(f"{k}={fmt_q(v)}" for k, v in r.sample.items())
            tail = f"  {r.detail}" if r.detail else ""
            print(f"{r.outcome.upper():8s} {r.id}  [{sample}]  {r.elapsed:.2f}s{tail}")
    if not args.json:
        counts = {o: sum(r.outcome == o for r in reports) for o in ("pass", "fail", "rejected")}
        print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['rejected']} rejected")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_catalog(args):
    recs = catalog_entries()
    if args.action == "show":
        if not args.id:
            raise UsageError("catalog show needs a record id")
        try:
            rec = get_record(args.id)
        except KeyError:
            raise UsageError(f"no catalog record {args.id!r}") from None
        print(json.dumps({"schema": SCHEMA_VERSION, **rec.to_json()}, indent=2))
        return EXIT_OK
    if args.json:
        print(json.dumps({"schema": SCHEMA_VERSION, "records": [r.to_json() for r in recs]}))
    else:
        for r in recs:
            print(f"{r.id:32s} {r.mode}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="appellode", description="Exact Appell function series, ODEs and identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_json(sp):
        sp.add_argument("--json", action="store_true", help="emit JSON")
        return sp

    sp = with_json(sub.add_parser("taylor", help="expand an expression at the origin"))
    sp.add_argument("expr")
    sp.add_argument("--order", type=int, default=8)
    sp.add_argument("--vars", help="expansion variables, e.g. t or x,y")
    sp.add_argument("--params", help="name=p/q bindings")
    sp.set_defaults(func=cmd_taylor)

    sp = with_json(sub.add_parser("eval", help="evaluate a terminating Appell sum"))
    sp.add_argument("expr")
    sp.add_argument("--at", required=True, help="x,y")
    sp.add_argument("--params")
    sp.set_defaults(func=cmd_eval)

    sp = with_json(sub.add_parser("derive-ode", help="minimal ODE along a curve"))
    sp.add_argument("--system", required=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--curve", required=True, help='"x=...; y=..." in t')
    sp.add_argument("--max-order", type=int, default=4)
    sp.add_argument("--prolong-depth", type=int, default=2)
    sp.add_argument("--output", help="also write the ODE as JSON to this file")
    sp.set_defaults(func=cmd_derive)

    sp = with_json(sub.add_parser("exponents", help="local exponents of an ODE"))
    sp.add_argument("--ode", required=True, help="JSON file or builtin:<name>:<params>")
    sp.add_argument("--point", help="p/q or inf; default lists every rational singular point")
    sp.set_defaults(func=cmd_exponents)

    sp = with_json(sub.add_parser("pullback", help="pullback transform of an ODE"))
    sp.add_argument("--ode", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--theta", default="", help='e.g. "(2,-1/3),(0,1/2)"')
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_pullback)

    sp = with_json(sub.add_parser("verify", help="verify catalog records on random samples"))
    sp.add_argument("id", nargs="?")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--seed", default="1")
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--order", type=int, default=None, help="truncation order (record default 8)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = with_json(sub.add_parser("catalog", help="list or show catalog records"))
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("id", nargs="?")
    sp.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"appellode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExprError as exc:
        print(f"appellode: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"appellode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
