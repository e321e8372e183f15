"""Command-line front end: ``qso3 <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor

from . import basis as bs
from . import matelem as me
from .errors import IntegrityError
from .fockrep import build_space
from .qcg import CGKey, qcg
from .qnum import DeformationParam, q_double_factorial, q_factorial, q_number_scaled
from .verify import GROUPS, run_suite, thread_cap

DEFAULT_VERIFY_TAUS = "-0.3,0,0.1,0.5"


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x + 0.0, ".12g")
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not isinstance(x, bool):
        if not math.isfinite(x):
            return fmt(x)
        return float(fmt(x))
    return x


def parse_number(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise UsageError(f"tau must be finite, got {text!r}")
    return v


def parse_tau_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive linear grid)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"tau grid must be start:stop:count, got {text!r}")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise UsageError(f"grid count must be an integer, got {parts[2]!r}") from None
        if count < 1:
            raise UsageError("grid count must be positive")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    taus = [parse_number(t) for t in text.split(",") if t.strip()]
    if not taus:
        raise UsageError("empty tau grid")
    return taus


def parse_int_range(text: str) -> list[int]:
    """``n``, ``a:b`` (inclusive) or ``a,b,c``."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            vals = list(range(lo, hi + 1))
        else:
            vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None
    if not vals or min(vals) < 0:
        raise UsageError(f"need a non-empty range of non-negative integers, got {text!r}")
    return vals


def parse_half_int(text: str) -> float:
    try:
        v = float(text) if "/" not in text else int(text.split("/")[0]) / int(text.split("/")[1])
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad angular momentum label {text!r}") from None
    if abs(2 * v - round(2 * v)) > 1e-12:
        raise UsageError(f"{text!r} is not a multiple of 1/2")
    return round(2 * v) / 2


def single_tau(args) -> float:
    taus = parse_tau_grid(args.tau)
    if len(taus) != 1:
        raise UsageError("this command takes a single tau")
    return taus[0]


def resolve_nmax(args, lam: int) -> int:
    nmax = args.nmax if args.nmax is not None else max(12, lam + 2)
    if nmax < lam:
        raise UsageError(f"nmax={nmax} is smaller than lambda={lam}")
    return nmax


def emit(rows: list[dict], fields: list[str], args):
    if args.format == "json":
        data = [{k: _json_value(r[k]) for k in fields} for r in rows]
        text = json.dumps(data, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([fmt(r[k]) for k in fields])
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid_map(fn, items):
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------- commands


def cmd_qnum(args) -> int:
    rows = []
    for tau in parse_tau_grid(args.tau):
        p = DeformationParam(tau)
        if args.kind == "number":
            x = parse_number(args.x)
            val = q_number_scaled(x, args.scale, p)
        else:
            try:
                n = int(args.x)
            except ValueError:
                raise UsageError(f"{args.kind} needs an integer --x, got {args.x!r}") from None
            if args.kind == "factorial":
                val = q_factorial(n, p.scaled(args.scale))
            else:
                val = q_double_factorial(n, p.scaled(args.scale))
        rows.append({"kind": args.kind, "x": args.x, "scale": args.scale, "tau": tau, "value": val})
    emit(rows, ["kind", "x", "scale", "tau", "value"], args)
    return 0


def cmd_cg(args) -> int:
    labels = [parse_half_int(t) for t in (args.j1, args.m1, args.j2, args.m2, args.J, args.M)]
    rows = []
    for tau in parse_tau_grid(args.tau):
        key = CGKey(*labels, base_inverted=args.inverted)
        rows.append({"tau": tau, "inverted": args.inverted, "value": qcg(key, DeformationParam(tau))})
    emit(rows, ["tau", "inverted", "value"], args)
    return 0


def cmd_basis(args) -> int:
    p = DeformationParam(single_tau(args))
    if args.route == "explicit":
        vec = bs.basis_state_explicit(args.lam, args.L, args.M, p)
    else:
        space = build_space(resolve_nmax(args, args.lam))
        vec = bs.basis_state_lowering(args.lam, args.L, args.M, space, p)
    rows = [dict(zip(("nplus", "nzero", "nminus", "coeff"), r)) for r in vec.rows()]
    emit(rows, ["nplus", "nzero", "nminus", "coeff"], args)
    return 0


def cmd_rme(args) -> int:
    rows = []
    for tau in parse_tau_grid(args.tau):
        p = DeformationParam(tau)
        if args.oracle:
            space = build_space(resolve_nmax(args, args.lam))
            rec = me.reduced_me_oracle(args.lam, args.Lp, args.L, p, space=space)
        else:
            rec = me.reduced_me(args.lam, args.Lp, args.L, p)
        rows.append(
            {"lambda": rec.lam, "Lp": rec.L_final, "L": rec.L_initial, "tau": tau,
             "value": rec.value, "source": rec.source}
        )
    emit(rows, ["lambda", "Lp", "L", "tau", "value", "source"], args)
    return 0


BE2_FIELDS = ["lambda", "L", "tau", "rme_raising", "rme_diagonal", "be2"]


def _be2_row(point):
    lam, L, tau = point
    p = DeformationParam(tau)
    raising = b = None
    if L + 2 <= lam:
        raising = me.reduced_me_raising(lam, L, p).value
        b = me.be2(lam, L, p).value
    return {"lambda": lam, "L": L, "tau": tau, "rme_raising": raising,
            "rme_diagonal": me.reduced_me_diagonal(lam, L, p).value, "be2": b}


def cmd_be2_table(args) -> int:
    taus = parse_tau_grid(args.tau)
    points = [(lam, L, t) for lam in parse_int_range(args.lam)
              for L in sorted(bs.allowed_L(lam)) for t in taus]
    emit(_grid_map(_be2_row, points), BE2_FIELDS, args)
    return 0


TAYLOR_FIELDS = ["lambda", "Lp", "L", "tau", "closed", "quadratic", "residual"]


def _taylor_rows(point):
    lam, L, tau = point
    p = DeformationParam(tau)
    out = []
    if L + 2 <= lam:
        closed = me.reduced_me_raising(lam, L, p).value
        quad = me.taylor_eval(me.taylor_raising(lam, L), tau)
        out.append({"lambda": lam, "Lp": L + 2, "L": L, "tau": tau, "closed": closed,
                    "quadratic": quad, "residual": abs(closed - quad)})
    closed = me.reduced_me_diagonal(lam, L, p).value
    quad = me.taylor_eval(me.taylor_diagonal(lam, L), tau)
    out.append({"lambda": lam, "Lp": L, "L": L, "tau": tau, "closed": closed,
                "quadratic": quad, "residual": abs(closed - quad)})
    return out


def cmd_taylor_check(args) -> int:
    taus = parse_tau_grid(args.tau)
    points = [(lam, L, t) for lam in parse_int_range(args.lam)
              for L in sorted(bs.allowed_L(lam)) for t in taus]
    rows = [r for chunk in _grid_map(_taylor_rows, points) for r in chunk]
    emit(rows, TAYLOR_FIELDS, args)
    return 0


VERIFY_FIELDS = ["check", "tag", "group", "tau", "residual", "tol", "status"]


def cmd_verify(args) -> int:
    nmax = args.nmax if args.nmax is not None else 12
    if nmax < 3:
        # degree-3 products such as S+ q^{2 S0} have no untruncated sector below 3
        raise UsageError("verify needs nmax >= 3")
    groups = set(args.group) if args.group else None
    results = run_suite(nmax, parse_tau_grid(args.tau), groups=groups, tol=args.tol,
                        max_lambda=args.max_lambda)
    rows = [
        {"check": r.name, "tag": r.tag, "group": r.group, "tau": r.tau,
         "residual": r.residual, "tol": r.tol, "status": "pass" if r.passed else "FAIL"}
        for r in results
    ]
    emit(rows, VERIFY_FIELDS, args)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=sys.stderr)
    return 1 if failed else 0


# ------------------------------------------------------------------ parser


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="qso3", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qnum", parents=[common], help="q-numbers, q-factorials")
    p.add_argument("--x", required=True)
    p.add_argument("--tau", required=True, help="value, list a,b,c or grid start:stop:count")
    p.add_argument("--kind", choices=("number", "factorial", "double-factorial"), default="number")
    p.add_argument("--scale", type=float, default=1.0, help="use base q^scale")
    p.set_defaults(run=cmd_qnum)

    p = sub.add_parser("cg", parents=[common], help="q-Clebsch-Gordan coefficient")
    for name in ("j1", "m1", "j2", "m2", "J", "M"):
        p.add_argument(f"--{name}", required=True, help="e.g. 1, 0.5 or 1/2")
    p.add_argument("--tau", required=True)
    p.add_argument("--inverted", action="store_true", help="evaluate at base 1/q")
    p.set_defaults(run=cmd_cg)

    p = sub.add_parser("basis", parents=[common], help="expand a basis state in Fock states")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--route", choices=("explicit", "lowering"), default="explicit")
    p.add_argument("--nmax", type=int)
    p.set_defaults(run=cmd_basis)

    p = sub.add_parser("rme", parents=[common], help="reduced quadrupole matrix element")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--Lp", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--oracle", action="store_true", help="extract from Fock-space matrices")
    p.add_argument("--nmax", type=int)
    p.set_defaults(run=cmd_rme)

    p = sub.add_parser("be2-table", parents=[common], help="reduced elements and B(E2) on a grid")
    p.add_argument("--lambda", dest="lam", required=True, help="n, a:b or a,b,c")
    p.add_argument("--tau", required=True)
    p.set_defaults(run=cmd_be2_table)

    p = sub.add_parser("taylor-check", parents=[common], help="closed forms vs quadratic expansion")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--tau", required=True)
    p.set_defaults(run=cmd_taylor_check)

    p = sub.add_parser("verify", parents=[common], help="run the identity catalog")
    p.add_argument("--nmax", type=int)
    p.add_argument("--tau", default=DEFAULT_VERIFY_TAUS)
    p.add_argument("--group", action="append", choices=GROUPS)
    p.add_argument("--tol", type=_positive, help="override every check tolerance")
    p.add_argument("--max-lambda", type=int, help="largest irrep used by basis/matelem checks")
    p.set_defaults(run=cmd_verify)
    return parser


def _attach_negative_values(argv):
    """Turn ``--tau -0.3,0`` into ``--tau=-0.3,0`` so argparse keeps it as a value."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and re.match(r"-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        return args.run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except IntegrityError as exc:
        print(f"qso3 {args.command}: integrity failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OverflowError) as exc:
        print(f"qso3 {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
