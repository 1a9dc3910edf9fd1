"""Command-line front end: beta, sweep, volume and reproduce."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from .chain import ChainError
from .exact import ExactArithmeticError, format_rational, parse_rational
from .families import (FamilyError, Pair, blowup, curve_divisor, make_pair, non_dreamy_chain,
                       p2_chain, p2_example, quadric_chain, tangent_chain)
from .io import DocumentError, load_chain, rows_to_csv, rows_to_json
from .kstability import BetaReport, DomainError, beta
from .picard import SurfaceKind
from .reproduce import SECTIONS, certified_chain, reproduce_paper, table_rows
from .toric import moment_polygon, polytope_volume_integral
from .volume import CertificationError, DivisorOver, volume_profile, volume_rows

EXIT_OK, EXIT_REFUSED, EXIT_PARSE = 0, 1, 2
WORKERS_ENV = "LOGDELPEZZO_WORKERS"


class UsageError(ValueError):
    """Malformed command-line input (exit status 2)."""


class Refusal(RuntimeError):
    """Well-formed request the engine declines to answer (exit status 1)."""


# ----------------------------------------------------------------------------
# parsing

PAIR_ALIASES = {"p2": "p2_conic", "p1xp1": "p1xp1_diag", "p2lines": "p2_lines",
                "fm": "fm", "f1einf": "f1_einf"}
PAIR_PARAMS = {"p2_conic": ("delta",), "p1xp1_diag": ("delta",), "p2_lines": ("d1", "d2"),
               "fm": ("m", "d1", "d2"), "f1_einf": ("delta",)}


def parse_pair_spec(spec: str) -> tuple[str, dict[str, Fraction]]:
    """'p2:delta=1/2' -> ('p2_conic', {'delta': 1/2}); parameters may be left out."""
    name, _, body = spec.partition(":")
    family = PAIR_ALIASES.get(name.strip(), name.strip())
    if family not in PAIR_PARAMS:
        raise UsageError(f"unknown pair {name!r}; choose from {', '.join(PAIR_ALIASES)}")
    params: dict[str, Fraction] = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key not in PAIR_PARAMS[family]:
            raise UsageError(f"bad pair parameter {item!r} for {family}")
        try:
            params[key] = parse_rational(val)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"{key}: {val!r} is not a rational \"p/q\"") from None
    return family, params


def build_pair(family: str, params: dict[str, Fraction]) -> Pair:
    missing = [p for p in PAIR_PARAMS[family] if p not in params]
    if missing:
        raise UsageError(f"pair {family} needs {', '.join(missing)}")
    try:
        return make_pair(family, **params)
    except (FamilyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _ints(parts: Sequence[str], spec: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad integers in divisor spec {spec!r}") from None


def build_divisor(pair: Pair, spec: str) -> DivisorOver:
    """Divisor from a short spec such as 'conic', 'blowup:on', 'chain:5,2,jc=3'."""
    kind, _, body = spec.partition(":")
    kind = kind.strip()
    is_p2 = pair.base.kind is SurfaceKind.PROJECTIVE_PLANE
    try:
        if kind in ("conic", "diagonal", "C"):
            return curve_divisor(pair, "C", "conic" if is_p2 else "diagonal")
        if kind in ("line", "e", "einf", "l", "l1", "l2", "section", "fiber", "fiber1", "fiber2"):
            return curve_divisor(pair, kind)
        if kind == "blowup":
            if body not in ("on", "off", ""):
                raise UsageError("blowup takes 'on' or 'off'")
            return blowup(pair, "C" if body == "on" else None)
        if kind == "tangent":
            return tangent_chain(pair)
        if kind in ("p2ex", "nondreamy") and not (pair.family == "p2_conic"
                                                  and pair.param("delta") == 0):
            raise UsageError(f"{kind} is defined over P2 with empty boundary (p2:delta=0)")
        if kind == "p2ex":
            (m,) = _ints([body], spec)
            return p2_example(m)
        if kind == "nondreamy":
            return non_dreamy_chain()
        if kind in ("toric", "chain"):
            parts = [p.strip() for p in body.split(",") if p.strip()]
            jc = 0
            rest = []
            for p in parts:
                if p.startswith(("jc=", "c=")):
                    (jc,) = _ints([p.split("=", 1)[1]], spec)
                else:
                    rest.append(p)
            if len(rest) != 2:
                raise UsageError(f"{kind} needs weights a,b in {spec!r}")
            a, b = _ints(rest, spec)
            if pair.base.kind is SurfaceKind.QUADRIC:
                builder = quadric_chain
            elif is_p2:
                builder = p2_chain
            else:
                raise UsageError("weighted chains are available on P2 and P1xP1 pairs")
            return certified_chain(builder, pair, a, b, jc)[0]
    except (FamilyError, KeyError, ChainError) as exc:
        raise UsageError(f"divisor {spec!r}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"divisor {spec!r}: {exc}") from None
    raise UsageError(f"unknown divisor {spec!r}")


def parse_grid(spec: str) -> list[Fraction]:
    """'0,1/4,1/2' or 'start:stop:step' (stop included when hit exactly)."""
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise UsageError(f"range grid needs start:stop:step, got {spec!r}")
            lo, hi, step = (parse_rational(p) for p in parts)
            if step <= 0:
                raise UsageError("grid step must be positive")
            out, v = [], lo
            while v <= hi:
                out.append(v)
                v += step
        else:
            out = [parse_rational(p) for p in spec.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad grid {spec!r}: {exc}") from None
    if not out:
        raise UsageError("empty grid")
    return out


# ----------------------------------------------------------------------------
# computations

def _oracle_beta(pair: Pair, divisor: DivisorOver, report: BetaReport) -> Fraction | None:
    if divisor.toric_weights is None or pair.base.kind not in (SurfaceKind.PROJECTIVE_PLANE,
                                                               SurfaceKind.QUADRIC):
        return None
    a, b = divisor.toric_weights
    coeffs = list(divisor.L.coefficients[:pair.base.rank])
    poly = moment_polygon(pair.base.kind.value, coeffs)
    return 1 - polytope_volume_integral(a, b, poly) / (report.A * report.L2)


def report_row(pair: Pair, divisor: DivisorOver, report: BetaReport) -> dict[str, str]:
    row = {"pair": pair.label}
    row.update(report.to_row())
    sign = (report.beta > 0) - (report.beta < 0)
    row["sign"] = {1: "positive", 0: "zero", -1: "negative"}[sign]
    ob = _oracle_beta(pair, divisor, report)
    row["oracle_beta"] = "" if ob is None else format_rational(ob)
    return row


_CLOSED_FORMS = {
    ("p2_conic", "conic"): "p2.conic", ("p2_conic", "C"): "p2.conic",
    ("p2_conic", "line"): "p2.line", ("p2_conic", "blowup:off"): "p2.blowup_off",
    ("p2_conic", "blowup"): "p2.blowup_off", ("p2_conic", "blowup:on"): "p2.blowup_on",
    ("p2_conic", "tangent"): "p2.tangent_chain",
    ("p1xp1_diag", "diagonal"): "quadric.diagonal", ("p1xp1_diag", "C"): "quadric.diagonal",
    ("p1xp1_diag", "blowup:on"): "quadric.blowup_on",
    ("fm", "e"): "fm.e", ("f1_einf", "e"): "f1.e", ("f1_einf", "einf"): "f1.einf",
    ("p2_lines", "l2"): "lines.l2",
}


def closed_form_for(pair: Pair, spec: str | None):
    if spec is None:
        return None
    spec = spec.strip()
    if spec.startswith("p2ex:"):
        return "p2.example_chain", {"m": parse_rational(spec.split(":", 1)[1])}
    key = _CLOSED_FORMS.get((pair.family, spec))
    return (key, dict(pair.params)) if key else None


def compute_beta(pair: Pair, divisor: DivisorOver, allow_uncertified: bool,
                 spec: str | None = None) -> dict[str, str]:
    try:
        r = beta(divisor, closed_form_for(pair, spec), allow_uncertified=allow_uncertified)
    except CertificationError as exc:
        raise Refusal(f"uncertified thresholds for {divisor.id}: {exc}") from None
    except ExactArithmeticError as exc:
        raise Refusal(f"{divisor.id}: {exc}") from None
    return report_row(pair, divisor, r)


def certification_row(pair: Pair, divisor: DivisorOver) -> dict[str, str]:
    """Thresholds and their certificate status, without integrating."""
    try:
        vp = volume_profile(divisor)
    except ExactArithmeticError as exc:
        raise Refusal(f"{divisor.id}: {exc}") from None
    return {"pair": pair.label, "divisor": divisor.id,
            "epsilon": format_rational(vp.epsilon), "tau": format_rational(vp.tau),
            "epsilon_certified": str(vp.epsilon_certified).lower(),
            "certified": str(vp.certified).lower(),
            "binding": " ".join(vp.binding)}


def _row_for(pair: Pair, spec: str, allow: bool, certify_only: bool) -> dict[str, str]:
    div = build_divisor(pair, spec)
    if certify_only:
        return certification_row(pair, div)
    return compute_beta(pair, div, allow, spec)


def _sweep_task(task: tuple) -> list[dict[str, str]]:
    family, params, param, value, divisors, allow, certify_only = task
    pair = build_pair(family, {**params, param: value})
    return [{param: format_rational(value), **_row_for(pair, d, allow, certify_only)}
            for d in divisors]


def _workers(flag: int | None = None) -> int:
    if flag is not None:
        if flag < 1:
            raise UsageError("--workers must be at least 1")
        return flag
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_sweep(family: str, params: dict[str, Fraction], param: str, grid: Sequence[Fraction],
              divisors: Sequence[str], allow_uncertified: bool = False,
              workers: int = 1, seed: int | None = None,
              certify_only: bool = False) -> list[dict[str, str]]:
    tasks = [(family, params, param, v, tuple(divisors), allow_uncertified, certify_only)
             for v in grid]
    order = list(range(len(tasks)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, [tasks[i] for i in order]))
    else:
        results = [_sweep_task(tasks[i]) for i in order]
    by_index = dict(zip(order, results))
    return [row for i in range(len(tasks)) for row in by_index[i]]


# ----------------------------------------------------------------------------
# output

def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(rows: list[dict[str, str]], fmt: str, **meta) -> str:
    if fmt == "json":
        return rows_to_json(rows, **meta)
    if fmt == "csv":
        return rows_to_csv(rows)
    lines = []
    for r in rows:
        width = max(map(len, r))
        lines.extend(f"{k.ljust(width)}  {v}" for k, v in r.items())
        lines.append("")
    return "\n".join(lines)


def _resolve(args) -> tuple[Pair, DivisorOver]:
    if args.input:
        try:
            doc = load_chain(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
        try:
            return doc.pair(), doc.divisor()
        except ChainError as exc:
            raise UsageError(f"{args.input}: {exc}") from None
    if not args.pair or not args.divisor:
        raise UsageError("give --pair and --divisor, or --input")
    pair = build_pair(*parse_pair_spec(args.pair))
    return pair, build_divisor(pair, args.divisor)


def _certify_status(rows: list[dict[str, str]]) -> int:
    return EXIT_OK if all(r["certified"] == "true" for r in rows) else EXIT_REFUSED


def cmd_beta(args) -> int:
    pair, div = _resolve(args)
    if args.certify_only:
        row = certification_row(pair, div)
        _emit(_render([row], args.format, command="certify"), args.output)
        return _certify_status([row])
    row = compute_beta(pair, div, args.allow_uncertified, None if args.input else args.divisor)
    _emit(_render([row], args.format, command="beta"), args.output)
    return EXIT_OK


def cmd_volume(args) -> int:
    pair, div = _resolve(args)
    try:
        r = beta(div, allow_uncertified=args.allow_uncertified)
    except CertificationError as exc:
        raise Refusal(str(exc)) from None
    fn = r.volume.function
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    xs = [fn.tau * i / (args.samples - 1) for i in range(args.samples)]
    rows = volume_rows(r.volume, xs)
    pieces = [{"start": format_rational(p.start), "end": format_rational(p.end),
               "c0": format_rational(p.c0), "c1": format_rational(p.c1),
               "c2": format_rational(p.c2)} for p in fn.pieces]
    if args.format == "json":
        text = rows_to_json(rows, command="volume", divisor=div.id, pieces=pieces,
                            epsilon=r.epsilon, tau=r.tau, certified=r.certified)
    elif args.format == "csv":
        text = rows_to_csv(rows)
    else:
        head = [f"divisor {div.id}: epsilon = {format_rational(r.epsilon)}, "
                f"tau = {format_rational(r.tau)}, certified = {str(r.certified).lower()}"]
        head += [f"  [{p['start']}, {p['end']}]: {p['c0']} + ({p['c1']}) x + ({p['c2']}) x^2"
                 for p in pieces]
        text = "\n".join(head) + "\n\n" + rows_to_csv(rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    family, params = parse_pair_spec(args.pair)
    if args.param not in PAIR_PARAMS[family]:
        raise UsageError(f"{family} has no parameter {args.param!r}")
    grid = parse_grid(args.grid)
    divisors = args.divisor or ["conic" if family == "p2_conic" else
                                "diagonal" if family == "p1xp1_diag" else
                                "l2" if family == "p2_lines" else "e"]
    rows = run_sweep(family, params, args.param, grid, divisors, args.allow_uncertified,
                     _workers(args.workers), args.seed, args.certify_only)
    fmt = "csv" if args.format == "text" else args.format
    _emit(_render(rows, fmt, command="certify" if args.certify_only else "sweep"), args.output)
    return _certify_status(rows) if args.certify_only else EXIT_OK


def cmd_reproduce(args) -> int:
    try:
        tables = reproduce_paper(args.section)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    rows = [r for t in tables for r in table_rows(t)]
    if args.format == "text":
        lines = [f"{'section':10} {'match':5} {'location':26} {'quantity':28} {'params':34} "
                 f"{'rel':3} {'expected':>14} {'engine':>14}"]
        for r in rows:
            lines.append(f"{r['section']:10} {r['match']:5} {r['location']:26} {r['quantity']:28} "
                         f"{r['params']:34} {r['relation']:3} {r['expected']:>14} {r['engine']:>14}")
        summary = [f"{t.section}: {len(t.rows)} rows, "
                   f"{'all match' if t.all_match else 'MISMATCH'}" for t in tables]
        text = "\n".join(lines + [""] + summary) + "\n"
    else:
        text = _render(rows, args.format, command="reproduce", section=args.section)
    _emit(text, args.output)
    bad = next((t.first_divergence() for t in tables if not t.all_match), None)
    if bad is not None:
        print(json.dumps({"status": "mismatch", "first_divergence": bad.as_dict()},
                         sort_keys=True), file=sys.stderr)
        return EXIT_REFUSED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logdelpezzo",
                                description="Exact beta-hat computations on log del Pezzo pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_divisor=True):
        sp.add_argument("--format", choices=("text", "csv", "json"), default="text")
        sp.add_argument("--output", "-o", help="write to this path instead of stdout")
        sp.add_argument("--allow-uncertified", action="store_true",
                        help="report thresholds the curve catalog cannot certify")
        sp.add_argument("--certify-only", action="store_true",
                        help="only report thresholds and certificates; exit 1 if any is missing")
        if with_divisor:
            sp.add_argument("--pair", help="e.g. p2:delta=1/2, p1xp1:delta=1/3, fm:m=2,d1=1/2,d2=0")
            sp.add_argument("--divisor", help="e.g. conic, blowup:on, toric:2,1, chain:5,2,jc=3")
            sp.add_argument("--input", help="chain description JSON")

    sp = sub.add_parser("beta", help="beta-hat of one divisor")
    common(sp)
    sp.set_defaults(func=cmd_beta)

    sp = sub.add_parser("volume", help="volume function pieces and samples")
    common(sp)
    sp.add_argument("--samples", type=int, default=25)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("sweep", help="beta-hat over a parameter grid")
    common(sp, with_divisor=False)
    sp.add_argument("--pair", required=True, help="family with the fixed parameters, e.g. fm:m=2,d2=0")
    sp.add_argument("--param", default="delta", help="parameter to sweep (default delta)")
    sp.add_argument("--grid", required=True, help="'0,1/4,1/2' or 'start:stop:step'")
    sp.add_argument("--divisor", action="append", help="repeatable; defaults to the family's witness")
    sp.add_argument("--seed", type=int, help="shuffle the evaluation order (output order is fixed)")
    sp.add_argument("--workers", type=int,
                    help=f"parallel worker processes (default: ${WORKERS_ENV} or 1)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("reproduce", help="compare engine values with published ones")
    sp.add_argument("section", choices=SECTIONS + ("all",))
    sp.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DocumentError, DomainError) as exc:
        extra = {"where": exc.where} if isinstance(exc, DocumentError) else {}
        _report_error("parse_error", exc, **extra)
        return EXIT_PARSE
    except Refusal as exc:
        _report_error("refused", exc)
        return EXIT_REFUSED


def _report_error(status: str, exc: Exception, **extra: str) -> None:
    """One JSON object per line on stderr, so scripts can branch on ``status``."""
    body = {"status": status, "message": str(exc), **extra}
    print(json.dumps(body, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
