"""Command-line front end: ``verify``, ``show``, ``regulator`` and ``scan``.

Exit codes: 0 success, 1 verification failure, 2 usage or degenerate input,
3 resource exhaustion (factorization or search budget).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import mpmath

from . import family
from .factor import FactorizationTimeout
from .heights import DEFAULT_NORMALIZATION, NORMALIZATIONS, HeightContext, gram_regulator
from .ratfunc import format_ratfunc
from .search import SearchConfig, scan

SCHEMA_VERSION = "1"
CSV_COLUMNS = ["n", "d", "rank_lower_bound", "regulator", "num_points", "error"]
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

CONFIG_KEYS = {"precision": int, "denom_bound": int, "numer_bound": int, "jobs": int,
               "time_budget": float, "normalization": str}

log = logging.getLogger("mordell")


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


def rat(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def real(x, digits: int) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False)


def load_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = CONFIG_KEYS[key](value)
    return out


def read_n_list(path) -> list[str]:
    items = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            items.append(line)
    return items


def load_schema() -> dict:
    """The JSON schema every ``--json`` output validates against."""
    return json.loads(resources.files("mordell").joinpath("schema/output_record.schema.json").read_text())


def record(command: str, inputs: dict, results, timings: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "results": results, "timings": {k: round(v * 1000, 3) for k, v in timings.items()}}


def emit_json(rec: dict, dest=None):
    text = json.dumps(rec, indent=2)
    if dest is None or dest == "-":
        print(text)
    else:
        Path(dest).write_text(text + "\n")


# -- commands -------------------------------------------------------------------

def _mutation_site(spec: str):
    parts = spec.split(":")
    if len(parts) == 1:
        key = parts[0]
        stage = "N"
        for st in ("N", "K", "M"):
            if key in family.FORMULAS[st]:
                stage = st
                break
        return (stage, key, "num", 0, 0)
    if len(parts) == 5:
        stage, key, part, fi, ti = parts
        return (stage, key, part, int(fi) if fi else None, int(ti) if ti else None)
    raise UsageError("--mutate takes KEY or STAGE:KEY:PART:FACTOR:TERM")


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    formulas = family.FORMULAS
    if args.mutate:
        site = _mutation_site(args.mutate)
        try:
            formulas = family.mutate(site, delta=args.delta, exponent=args.exponent)
        except (KeyError, IndexError):
            raise UsageError(f"no printed coefficient at {args.mutate}")
    results = family.verify_all_identities(formulas)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results)
    if args.json:
        payload = {"all_passed": ok, "identities": [
            {"name": r.name, "anchor": r.anchor, "passed": r.passed, "detail": r.detail,
             "residual": None if r.residual is None else format_ratfunc(r.residual)}
            for r in results]}
        emit_json(record("verify", {"mutate": args.mutate}, payload, {"verify": elapsed}))
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            line = f"{status}  {r.name}  [{r.anchor}]"
            if r.detail:
                line += f"  {r.detail}"
            print(line)
            if r.residual is not None:
                print(f"      residual: {format_ratfunc(r.residual)}")
        print(f"{sum(r.passed for r in results)}/{len(results)} identities hold")
    return EXIT_OK if ok else EXIT_FAIL


def _stage_payload(stage: str) -> dict:
    st = {"m": family.stage_m, "k": family.stage_k, "n": family.stage_n}[stage]()
    var = st.param
    return {"stage": stage, "d": format_ratfunc(st.curve_d, var),
            "points": [{"x": format_ratfunc(x, var), "y": format_ratfunc(y, var)} for x, y in st.points]}


def cmd_show(args) -> int:
    if args.n is None and args.stage is None:
        raise UsageError("show needs --n or --stage")
    if args.n is not None and args.stage not in (None, "n"):
        raise UsageError("--stage m|k is a symbolic view and cannot be combined with --n")
    t0 = time.perf_counter()
    if args.n is None:
        payload = _stage_payload(args.stage)
        if args.json:
            emit_json(record("show", {"stage": args.stage}, payload, {"show": time.perf_counter() - t0}))
        else:
            print(f"stage {args.stage}: y^2 = x^3 + {payload['d']}")
            for i, p in enumerate(payload["points"], 1):
                print(f"P{i} = ({p['x']}, {p['y']})")
        return EXIT_OK

    n0 = parse_rational(args.n)
    sp = family.specialize(n0)
    if args.json:
        payload = {"n": rat(n0), "degenerate": sp.degenerate, "reason": sp.reason}
        if not sp.degenerate:
            payload.update({"d": rat(sp.curve.d),
                            "points": [{"x": rat(p.x), "y": rat(p.y)} for p in sp.points],
                            "coincident_points": [list(c) for c in sp.coincident_points],
                            "torsion_hits": sp.torsion_hits})
        emit_json(record("show", {"n": rat(n0)}, payload, {"show": time.perf_counter() - t0}))
        return EXIT_OK
    print(f"n = {n0}")
    if sp.degenerate:
        print(f"{sp.reason} (n in {{{', '.join(str(q) for q in family.degenerate_parameters())}}})")
        return EXIT_OK
    print(f"d = {sp.curve.d}")
    for i, p in enumerate(sp.points, 1):
        print(f"P{i} = ({p.x}, {p.y})")
    for i, j in sp.coincident_points:
        print(f"note: P{i + 1} and P{j + 1} share an x-coordinate")
    for i in sp.torsion_hits:
        print(f"note: P{i + 1} has x = 0 (torsion)")
    return EXIT_OK


def cmd_regulator(args) -> int:
    n0 = parse_rational(args.n)
    t0 = time.perf_counter()
    sp = family.specialize(n0)
    if sp.degenerate:
        print(f"error: n = {n0}: {sp.reason}", file=sys.stderr)
        return EXIT_USAGE
    ctx = HeightContext(args.precision, args.normalization)
    t1 = time.perf_counter()
    rep = gram_regulator(sp.curve, sp.points, ctx)
    t2 = time.perf_counter()
    digits = args.precision
    if args.json:
        payload = {"n": rat(n0), "d": rat(sp.curve.d), "normalization": ctx.normalization,
                   "precision": digits,
                   "matrix": [[real(v, digits) for v in row] for row in rep.matrix],
                   "regulator": real(rep.regulator, digits),
                   "eigenvalues": [real(v, digits) for v in rep.eigenvalues],
                   "min_eigenvalue": real(rep.min_eigenvalue, digits),
                   "rank_lower_bound": rep.rank_lower_bound}
        emit_json(record("regulator", {"n": rat(n0), "precision": digits,
                                       "normalization": ctx.normalization},
                         payload, {"specialize": t1 - t0, "heights": t2 - t1}))
        return EXIT_OK
    print(f"n = {n0}")
    print(f"d = {sp.curve.d}")
    print(f"normalization = {ctx.normalization}, precision = {digits} digits")
    print("Gram matrix of P1, P2, P3:")
    for row in rep.matrix:
        print("  " + "  ".join(real(v, 20) for v in row))
    print(f"regulator = {real(rep.regulator, digits)}")
    print(f"min eigenvalue = {real(rep.min_eigenvalue, digits)}")
    print(f"rank lower bound = {rep.rank_lower_bound}")
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        raw = read_n_list(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}")
    cfg = SearchConfig(args.denom_bound, args.numer_bound, args.time_budget)
    ctx = HeightContext(args.precision, args.normalization)
    t0 = time.perf_counter()
    parsed = []
    for text in raw:
        try:
            parsed.append((text, parse_rational(text)))
        except UsageError:
            parsed.append((text, None))
    good = [q for _, q in parsed if q is not None]
    entries = iter(scan(good, cfg, ctx, jobs=args.jobs))
    elapsed = time.perf_counter() - t0
    digits = args.precision

    out_rows = []
    json_rows = []
    for text, q in parsed:
        if q is None:
            out_rows.append({"n": text, "d": "", "rank_lower_bound": "", "regulator": "",
                             "num_points": "", "error": "unparsable rational"})
            json_rows.append({"n": text, "error": "unparsable rational"})
            continue
        e = next(entries)
        c = e.certificate
        if c is None:
            out_rows.append({"n": rat(q), "d": "", "rank_lower_bound": "", "regulator": "",
                             "num_points": "", "error": e.error})
            json_rows.append({"n": rat(q), "error": e.error})
            continue
        reg = real(c.gram.regulator, digits)
        out_rows.append({"n": rat(q), "d": rat(c.curve.d), "rank_lower_bound": c.rank_lower_bound,
                         "regulator": reg, "num_points": len(c.points), "error": ""})
        json_rows.append({"n": rat(q), "d": rat(c.curve.d), "rank_lower_bound": c.rank_lower_bound,
                          "regulator": reg, "min_eigenvalue": real(c.gram.min_eigenvalue, digits),
                          "points": [{"x": rat(p.x), "y": rat(p.y)} for p in c.points],
                          "search_truncated": c.search_truncated, "error": ""})

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(out_rows)
    if args.json:
        inputs = {"input": str(args.input), "denom_bound": cfg.denom_bound, "numer_bound": cfg.numer_bound,
                  "time_budget": cfg.time_budget, "jobs": args.jobs, "precision": digits,
                  "normalization": ctx.normalization}
        emit_json(record("scan", inputs, json_rows, {"scan": elapsed}), args.json)
    if not args.csv and not args.json:
        w = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(out_rows)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def default_precision() -> int:
    env = os.environ.get("MORDELL_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"MORDELL_PRECISION must be an integer, got {env!r}")
    return 50


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mordell", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file with defaults (flags override it)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="prove the parametric identities exactly")
    p.add_argument("--json", action="store_true")
    p.add_argument("--mutate", metavar="SITE",
                   help="test hook: perturb one printed coefficient, e.g. P3.y or K:d:den:0:0")
    p.add_argument("--delta", type=int, default=1)
    p.add_argument("--exponent", type=int, help="with --mutate, replace the factor's exponent instead")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("show", help="specialize at n, or print a symbolic stage")
    p.add_argument("--n")
    p.add_argument("--stage", choices=("m", "k", "n"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("regulator", help="Gram matrix and regulator of P1, P2, P3 at n")
    p.add_argument("--n", required=True)
    p.add_argument("--precision", type=int)
    p.add_argument("--normalization", choices=NORMALIZATIONS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_regulator)

    p = sub.add_parser("scan", help="certify rank lower bounds for a list of n")
    p.add_argument("--input", required=True)
    p.add_argument("--denom-bound", type=int)
    p.add_argument("--numer-bound", type=int)
    p.add_argument("--time-budget", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--normalization", choices=NORMALIZATIONS)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.set_defaults(func=cmd_scan)
    return parser


def _apply_defaults(args):
    cfg = load_config(args.config) if args.config else {}
    defaults = {"precision": cfg.get("precision", default_precision()),
                "normalization": cfg.get("normalization", DEFAULT_NORMALIZATION),
                "denom_bound": cfg.get("denom_bound", SearchConfig.denom_bound),
                "numer_bound": cfg.get("numer_bound", SearchConfig.numer_bound),
                "time_budget": cfg.get("time_budget", SearchConfig.time_budget),
                "jobs": cfg.get("jobs", 1)}
    for key, value in defaults.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if getattr(args, "precision", None) is not None and args.precision < 20:
        raise UsageError("precision must be at least 20 digits")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_defaults(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FactorizationTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
