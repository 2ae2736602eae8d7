"""Command-line front end.

Exit status: 0 when everything was computed, 1 when a necessary condition
that applies under the p-principality policy was violated, 2 on usage or
input errors.  Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .criteria import (
    P_PRINCIPAL_POLICIES,
    SPECIAL_CASES,
    audit_pair,
    audit_summary,
    check_main,
    check_special,
    check_twisted,
    epsilon_family,
    p_principal_assumed,
    params_dict,
    twisted_passing_exponents,
)
from .cyclotomy import CycloParams, IntPair, attach_pair, cyclotomic_poly, mult_order, phi_homogeneous
from .residue_symbol import make_context, symbol
from .survey import bounds_report, even_order_primes, estimate_kummer_rank, hypothesis_search
from .survey.scan import FIELDS, MODES, POLICIES, derived_rates, satisfaction_scan
from .survey.search import compare_with_published, load_published_list, probability_bounds

SCHEMA_VERSION = 1
FORMATS = ("json", "jsonl", "csv", "human")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- helpers --------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _workers(args) -> int:
    source = "--workers"
    raw = args.workers
    if raw is None:
        source, raw = "CYCLOSIEVE_WORKERS", os.environ.get("CYCLOSIEVE_WORKERS", "1")
    try:
        w = int(raw)
    except ValueError:
        w = 0
    if w < 1:
        raise UsageError(f"{source} must be a positive integer, got {raw!r}")
    return w


def _element(x):
    c = list(x.coeffs)
    return c[0] if len(c) == 1 else c


def _context(args):
    """Build params and context from --p --q and either --n or --u/--v."""
    has_pair = args.u is not None or args.v is not None
    if has_pair and (args.u is None or args.v is None):
        raise UsageError("--u and --v go together")
    if has_pair == (args.n is not None):
        raise UsageError("give either --n or --u/--v")
    if has_pair:
        params = attach_pair(args.p, args.q, IntPair(args.u, args.v))
    else:
        params = CycloParams.build(args.p, args.q, args.n)
    ctx = make_context(params, z_choice=args.z_choice)
    return params, ctx


def _context_dict(ctx) -> dict:
    return {
        "field_degree": ctx.field.f,
        "modulus": list(ctx.field.modulus),
        "xi_bar": _element(ctx.xi_bar),
        "z": _element(ctx.z),
        "kappa_field": str(ctx.kappa),
        "extended_field": ctx.extended_field,
    }


def _cell(v):
    # CSV mirrors the JSON spelling of booleans, nulls and nested values
    return v if isinstance(v, (str, int)) and not isinstance(v, bool) else json.dumps(v)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _emit(command: str, result: dict, fmt: str, rows=None, keys=None, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "result": result}
        out.write(json.dumps(doc, indent=2) + "\n")
    elif fmt == "jsonl":
        for row in rows if rows is not None else [result]:
            out.write(json.dumps(row) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        if rows is not None:
            keys = keys or (list(rows[0]) if rows else [])
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(keys)
            for row in rows:
                w.writerow([_cell(row[k]) for k in keys])
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in _flatten(result):
                w.writerow([k, _cell(v)])
        out.write(buf.getvalue())
    else:
        for k, v in _flatten(result):
            out.write(f"{k}: {v}\n")


def _violation(verdicts, p, policy) -> bool:
    return p_principal_assumed(p, policy) and any(not v.holds for v in verdicts)


# -- commands ---------------------------------------------------------------------

def cmd_cyclo(args):
    if args.sub == "phi":
        if args.m < 1:
            raise UsageError("m must be >= 1")
        result = {"m": args.m, "a": args.a, "b": args.b,
                  "value": str(phi_homogeneous(args.m, args.a, args.b)),
                  "polynomial": [str(c) for c in cyclotomic_poly(args.m)]}
    else:
        result = {"a": args.a, "q": args.q, "order": mult_order(args.a, args.q)}
    return result, 0


def cmd_symbol(args):
    params, ctx = _context(args)
    alpha = args.alpha if args.alpha_coeffs is None else args.alpha_coeffs
    mu = symbol(ctx, alpha)
    return {"params": params_dict(params), "context": _context_dict(ctx),
            "alpha": alpha, "mu": mu}, 0


def cmd_criterion(args):
    policy = args.assume_p_principal
    if args.sub == "audit":
        if any(x is None for x in (args.u, args.v)) or not args.q:
            raise UsageError("audit needs --p, --u, --v and --q")
        dossier = audit_pair(args.p, IntPair(args.u, args.v), args.q, policy)
        bad = any(e["first_violation"] and e["applicable"] for e in dossier)
        return {"p": args.p, "u": str(args.u), "v": str(args.v), "assume_p_principal": policy,
                "dossier": dossier, "summary": audit_summary(dossier)}, int(bad)
    params, ctx = _context(args)
    result = {"params": params_dict(params), "context": _context_dict(ctx),
              "applicable": p_principal_assumed(params.p, policy)}
    if args.sub == "main":
        fam = epsilon_family(ctx)
        verdict = check_main(ctx, include_last=not args.exclude_last)
        result["eps"] = [_element(e) for e in fam.eps]
        result["classification"] = fam.classification
        verdicts = [verdict]
    elif args.sub == "special":
        verdicts = [check_special(ctx, args.case)]
    else:
        if args.m is None:
            result["passing_m"] = twisted_passing_exponents(ctx)
            verdicts = []
        else:
            verdicts = [check_twisted(ctx, args.m)]
    result["verdicts"] = [v.to_dict() for v in verdicts]
    code = int(_violation(verdicts, params.p, policy)) if args.sub != "twisted" else 0
    return result, code


def cmd_survey(args):
    if args.sub == "even-order":
        primes = even_order_primes(args.p, args.bound)
        result = {"p": args.p, "bound": args.bound, "count": len(primes), "primes": primes}
        if args.compare == "paper":
            pub = load_published_list()
            if pub["p"] != args.p or pub["bound"] != args.bound:
                raise UsageError(f"the embedded list is for p = {pub['p']}, bound = {pub['bound']}")
            result["comparison"] = compare_with_published(primes, pub["values"])
        return result, 0
    if args.sub == "hypothesis":
        return hypothesis_search(args.p, args.q), 0
    if args.sub == "rank":
        res = estimate_kummer_rank(args.p, args.n, args.trials, offset=args.offset)
        res["probability"] = probability_bounds(args.p, args.n, res["rank"], args.q)
        return res, 0
    return None, 0  # scan is streamed by run()


def _run_scan(args, fmt):
    workers = _workers(args)
    if args.qmin > args.qmax:
        raise UsageError("--qmin must not exceed --qmax")
    sink = None
    rows = []
    if fmt == "jsonl":
        def sink(line):
            sys.stdout.write(line + "\n")
    elif fmt == "csv":
        sink = rows.append
    doc = satisfaction_scan(args.p, args.qmin, args.qmax, mode=args.mode, policy=args.policy,
                            degrees=args.degrees, workers=workers, checkpoint=args.checkpoint,
                            records_path=args.records, record_sink=sink, stop_after=args.stop_after)
    doc["rates"] = derived_rates(doc)
    if fmt == "jsonl":
        a = doc["aggregates"]
        print(f"scan: {a['primes_done']} primes, {a['evaluations']} evaluations, "
              f"{a['holds']} full passes, last q {doc['last_q_done']}", file=sys.stderr)
    elif fmt == "csv":
        _emit("survey scan", doc, "csv", rows=[json.loads(r) for r in rows], keys=list(FIELDS))
    else:
        _emit("survey scan", doc, fmt)
    return 0


def cmd_bounds(args):
    return bounds_report(args.p, with_regularity=not args.no_regularity).to_dict(), 0


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format (default json; jsonl for scans)")
    common.add_argument("--workers", default=None, help="worker processes (env CYCLOSIEVE_WORKERS)")
    common.add_argument("--assume-p-principal", choices=P_PRINCIPAL_POLICIES, default="regular",
                        help="which primes count as p-principal when labelling violations")

    frame = _Parser(add_help=False)
    frame.add_argument("--p", type=int, required=True)
    frame.add_argument("--q", type=int, required=True)
    frame.add_argument("--n", type=int)
    frame.add_argument("--u", type=int)
    frame.add_argument("--v", type=int)
    frame.add_argument("--z-choice", type=int, default=None, help="power of the canonical z when p does not divide n")

    parser = _Parser(prog="cyclosieve", description="p-th power residue criteria for cyclotomic pairs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    cmds = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cyclo = cmds.add_parser("cyclo", help="cyclotomic values and orders")
    cs = cyclo.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    phi = cs.add_parser("phi", parents=[common], help="homogeneous Phi_m(a, b)")
    phi.add_argument("--m", type=int, required=True)
    phi.add_argument("--a", type=int, required=True)
    phi.add_argument("--b", type=int, default=1)
    order = cs.add_parser("order", parents=[common], help="multiplicative order of a mod prime q")
    order.add_argument("--a", type=int, required=True)
    order.add_argument("--q", type=int, required=True)

    sym = cmds.add_parser("symbol", parents=[common, frame], help="residue symbol exponent of alpha")
    g = sym.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=int)
    g.add_argument("--alpha-coeffs", type=_int_list, help="extension element, constant term first")

    crit = cmds.add_parser("criterion", help="congruence criteria")
    cr = crit.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    main_p = cr.add_parser("main", parents=[common, frame], help="eps_k/eps_1 ratio family")
    main_p.add_argument("--exclude-last", action="store_true", help="stop at k = p-2")
    spec = cr.add_parser("special", parents=[common, frame], help="n in {p, 1, 2p, 2}")
    spec.add_argument("--case", choices=tuple(SPECIAL_CASES), default=None)
    tw = cr.add_parser("twisted", parents=[common, frame], help="k^m-twisted family")
    tw.add_argument("--m", type=int, default=None, help="omit to scan m = 1..p-1")
    audit = cr.add_parser("audit", parents=[common], help="all applicable criteria for (u, v) at each q")
    audit.add_argument("--p", type=int, required=True)
    audit.add_argument("--u", type=int, required=True)
    audit.add_argument("--v", type=int, required=True)
    audit.add_argument("--q", type=_int_list, action="extend", required=True, help="one or more primes")

    surv = cmds.add_parser("survey", help="prime lists, scans and searches")
    sv = surv.add_subparsers(dest="sub", required=True, parser_class=_Parser)
    eo = sv.add_parser("even-order", parents=[common], help="primes of even order mod p")
    eo.add_argument("--p", type=int, required=True)
    eo.add_argument("--bound", type=int, required=True)
    eo.add_argument("--compare", choices=("paper",), default=None, help="diff against the embedded p = 491 list")
    sc = sv.add_parser("scan", parents=[common], help="criterion statistics over a q range")
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--qmin", type=int, required=True)
    sc.add_argument("--qmax", type=int, required=True)
    sc.add_argument("--mode", choices=MODES, default="main")
    sc.add_argument("--policy", choices=POLICIES, default="divisors", help="which xi to sample per q")
    sc.add_argument("--degrees", type=_int_list, default=None, help="only q with these orders mod p")
    sc.add_argument("--checkpoint", default=None)
    sc.add_argument("--records", default=None, help="append records to this JSONL file")
    sc.add_argument("--stop-after", type=int, default=None, help="process at most this many primes")
    hy = sv.add_parser("hypothesis", parents=[common], help="check every generator of F_q^x")
    hy.add_argument("--p", type=int, required=True)
    hy.add_argument("--q", type=int, required=True)
    rk = sv.add_parser("rank", parents=[common], help="lower bound for the Kummer degree exponent")
    rk.add_argument("--p", type=int, required=True)
    rk.add_argument("--n", type=int, required=True)
    rk.add_argument("--trials", type=int, required=True)
    rk.add_argument("--offset", type=int, default=0)
    rk.add_argument("--q", type=int, default=None, help="also report phi(q-1)/p^delta")

    bd = cmds.add_parser("bounds", parents=[common], help="Minkowski and GRH bounds, regularity")
    bd.add_argument("--p", type=int, required=True)
    bd.add_argument("--no-regularity", action="store_true")
    return parser


HANDLERS = {"cyclo": cmd_cyclo, "symbol": cmd_symbol, "criterion": cmd_criterion,
            "survey": cmd_survey, "bounds": cmd_bounds}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        command = args.command + (f" {args.sub}" if getattr(args, "sub", None) else "")
        is_scan = command == "survey scan"
        fmt = args.format or ("jsonl" if is_scan else "json")
        if is_scan:
            return _run_scan(args, fmt)
        if args.workers is not None:
            _workers(args)
        result, code = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"cyclosieve: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"cyclosieve: error: {exc}", file=sys.stderr)
        return 2
    rows = None
    if fmt in ("jsonl", "csv") and command == "criterion audit":
        rows = [{"q": e["q"], "status": e["status"], "first_violation": e["first_violation"]}
                for e in result["dossier"]]
    _emit(command, result, fmt, rows=rows)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
