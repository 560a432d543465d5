"""Command-line front end.

Every command writes one report to stdout: a JSON envelope (default), CSV with
a fixed header, or a short text rendering.  Output depends only on the
arguments, never on timing or thread count.

Exit codes: 0 success, 1 domain error (structured JSON on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import SCHEMA_VERSION, __version__
from .covering import (
    MAX_INTERVALS,
    admissible_eps,
    cover_recurse,
    find_witness,
    lemma3_exponent,
)
from .density import density_profile, dyadic_schedule, reciprocal_ledger
from .errors import ResourceError, ToolkitError
from .euler_erdos import TABLE_CAP, SmoothCountRecord, contradiction_scan, first_below_half, smooth_count
from .progressions import DEFAULT_SLACK, ORACLE_CAP, REFINE_CAP, best_ap_exact, best_ap_search, fmt_q
from .sets import gen_powers, gen_squares, load_set, sieve_primes, write_set

DEFAULT_MAX_SIEVE = 10**8


# --- argument types -----------------------------------------------------------


def rational(text: str) -> Fraction:
    num, sep, den = text.strip().partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        if int(den) == 0:
            raise ValueError
        return Fraction(int(num), int(den))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p/q (decimals are not accepted), got {text!r}") from None


def int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def int_list(text: str) -> list[int]:
    """Comma list ``10,100,1000`` or decades ``10^3..10^6``."""
    if ".." in text:
        lo, hi = text.split("..")
        try:
            b1, e1 = lo.split("^")
            b2, e2 = hi.split("^")
            if b1 != b2:
                raise ValueError
            return [int(b1) ** e for e in range(int(e1), int(e2) + 1)]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected B^i..B^j, got {text!r}") from None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None


def schedule_arg(text: str):
    return "dyadic" if text == "dyadic" else int_list(text)


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--threads", type=int, default=1, help="worker processes; results do not depend on it")
    common.add_argument("--max-sieve", type=int, default=DEFAULT_MAX_SIEVE)
    common.add_argument("--oracle-cap", type=int, default=ORACLE_CAP)
    common.add_argument("--max-intervals", type=int, default=MAX_INTERVALS)

    source = argparse.ArgumentParser(add_help=False)
    g = source.add_mutually_exclusive_group(required=True)
    g.add_argument("--set", dest="set_file", metavar="FILE")
    g.add_argument("--primes", type=int, metavar="L", help="primes <= L")
    g.add_argument("--squares", type=int, metavar="L", help="squares <= L")
    g.add_argument("--powers", type=int, metavar="L", help="powers of --base <= L")
    source.add_argument("--base", type=int, default=2)

    ap = argparse.ArgumentParser(prog="approxap", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"approxap {__version__} (schema {SCHEMA_VERSION})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a set file")
    p.add_argument("kind", choices=("primes", "powers", "squares"))
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--out", required=True)

    p = sub.add_parser("search", parents=[common, source], help="best approximate progression")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="exhaustive oracle (capped)")
    p.add_argument("--range", type=int_range, metavar="A..B")
    p.add_argument("--slack", type=int, default=DEFAULT_SLACK)
    p.add_argument("--refine-cap", type=int, default=REFINE_CAP, help="seeded refinement for sets up to this size")

    p = sub.add_parser("witness", parents=[common, source], help="covering witness search")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=rational, required=True, metavar="P/Q")
    p.add_argument("--scan", type=int_range, metavar="NMIN..NMAX")
    p.add_argument("--aggressive", action="store_true")

    p = sub.add_parser("cover", parents=[common, source], help="covering certificate for one window")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=rational, required=True, metavar="P/Q")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--aggressive", action="store_true")

    p = sub.add_parser("bound", parents=[common], help="admissible eps and the count exponent")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=rational, required=True, metavar="P/Q")

    p = sub.add_parser("density", parents=[common, source], help="best-window log density profile")
    p.add_argument("--schedule", type=schedule_arg, default="dyadic", help="'dyadic' or a list of window lengths")

    p = sub.add_parser("recip", parents=[common, source], help="reciprocal sum against dyadic bound")
    p.add_argument("--T", type=int, required=True)

    p = sub.add_parser("erdos", parents=[common], help="smooth-number counts for one (N, L)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--L", type=int, required=True)

    p = sub.add_parser("erdos-scan", parents=[common], help="smooth counts over a schedule of N")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--schedule", type=int_list, required=True, help="e.g. 10^3..10^6 or 100,1000")
    return ap


# --- commands -----------------------------------------------------------------


def _load(args):
    if args.primes is not None and args.primes > args.max_sieve:
        raise ResourceError(f"--primes {args.primes} exceeds --max-sieve {args.max_sieve}")
    if args.set_file:
        return load_set(args.set_file)
    if args.primes is not None:
        return sieve_primes(args.primes)
    if args.squares is not None:
        return gen_squares(args.squares)
    return gen_powers(args.base, args.powers)


def _source_config(args):
    for name in ("set_file", "primes", "squares", "powers"):
        v = getattr(args, name)
        if v is not None:
            cfg = {"kind": name.replace("_file", ""), "value": v}
            if name == "powers":
                cfg["base"] = args.base
            return cfg
    return None


def cmd_gen(args):
    if args.kind == "primes" and args.limit > args.max_sieve:
        raise ResourceError(f"--limit {args.limit} exceeds --max-sieve {args.max_sieve}")
    if args.kind == "primes":
        X = sieve_primes(args.limit)
    elif args.kind == "squares":
        X = gen_squares(args.limit)
    else:
        X = gen_powers(args.base, args.limit)
    write_set(X, args.out)
    res = {"path": args.out, "label": X.label, "provenance": X.provenance, "size": len(X)}
    return res, (["path", "label", "provenance", "size"], [list(res.values())]), (
        f"wrote {len(X)} elements ({X.label}) to {args.out}"
    )


def _report_outputs(rep):
    rows = []
    for j, ((x, d), p) in enumerate(zip(rep.nearest, rep.progression.points())):
        rows.append([j, fmt_q(p), x, fmt_q(d)])
    P = rep.progression
    text = (
        f"progression start={fmt_q(P.start)} gap={fmt_q(P.gap)} k={P.length}\n"
        + "\n".join(f"  {fmt_q(p):>16} -> {x} (distance {d})" for _, p, x, d in rows)
        + f"\nrelative error {fmt_q(rep.relative_error)} (~{float(rep.relative_error):.6g})"
        + (" [heuristic]" if rep.heuristic else "")
    )
    return rep.to_dict(), (["slot", "point", "element", "distance"], rows), text


def cmd_search(args):
    X = _load(args)
    if args.exact:
        rep = best_ap_exact(X, args.k, args.range, cap=args.oracle_cap)
    else:
        rep = best_ap_search(X, args.k, slack=args.slack, threads=args.threads, refine_cap=args.refine_cap)
    return _report_outputs(rep)


def cmd_witness(args):
    X = _load(args)
    lo, hi = args.scan if args.scan else (None, None)
    res = find_witness(X, args.k, args.eps, n_min=lo, n_max=hi, aggressive=args.aggressive)
    d = res.to_dict()
    if res.found:
        c = res.certificate
        rows = [["witness", c.m, c.n, c.outcome.level, fmt_q(res.report.relative_error), ""]]
        text = c.render()
    else:
        rows = [
            ["bound", c.m, c.n, c.depth, c.outcome.actual_count, c.outcome.count_bound]
            for c in res.strongest_bounds
        ]
        text = "no witness found; strongest bounds:\n" + "\n\n".join(c.render() for c in res.strongest_bounds)
    return d, (["outcome", "m", "n", "level_or_depth", "value", "count_bound"], rows), text


def cmd_cover(args):
    X = _load(args)
    params = admissible_eps(args.eps, args.k)
    cert = cover_recurse(args.m, args.n, params, X, args.aggressive, args.max_intervals)
    rows = [[ell, len(ivs), params.kept**ell] for ell, ivs in enumerate(cert.levels)]
    return cert.to_dict(), (["level", "intervals", "budget"], rows), cert.render()


def cmd_bound(args):
    params = admissible_eps(args.eps, args.k)
    s = lemma3_exponent(params)
    d = {
        "k": params.k,
        "half_inv": params.half_inv,
        "epsilon": fmt_q(params.epsilon),
        "epsilon_requested": fmt_q(params.requested),
        "kept_per_step": params.kept,
        "pieces_per_step": params.pieces,
        "s_star": s,
    }
    text = f"k={params.k} eps={fmt_q(params.epsilon)} (1/(2eps)={params.half_inv})  s* = {s:.10f}"
    return d, (list(d.keys()), [list(d.values())]), text


def cmd_density(args):
    X = _load(args)
    sched = dyadic_schedule(X.max) if args.schedule == "dyadic" else args.schedule
    prof = density_profile(X, sched)
    text = "\n".join(f"n={e.n:>12}  count={e.best_count:>10}  m={e.best_m:>12}  ratio={e.ratio:.6f}" for e in prof.entries)
    return prof.to_dict(), prof.csv_rows(), text


def cmd_recip(args):
    X = _load(args)
    led = reciprocal_ledger(X, args.T)
    text = (
        f"sum 1/x over x <= {args.T}: {float(led.partial_sum):.12f}\n"
        f"dyadic bound: {float(led.dyadic_bound):.12f}\n"
        f"inequality holds: {led.holds}"
    )
    return led.to_dict(), led.csv_rows(), text


def _erdos_out(records, extra=None):
    d = {"records": [r.to_dict() for r in records]}
    if extra:
        d.update(extra)
    text = "\n".join(
        f"N={r.N:>10} L={r.L:>3} p_L={r.p_L:>5} A={r.A:>10}  A^2<=N4^L:{r.sqrt_bound_holds}  "
        f"N-A<=tail:{r.tail_holds}  A<N/2:{r.below_half}"
        for r in records
    )
    return d, (SmoothCountRecord.CSV_HEADER, [r.csv_row() for r in records]), text


def cmd_erdos(args):
    return _erdos_out([smooth_count(args.N, args.L, cap=min(TABLE_CAP, args.max_sieve))])


def cmd_erdos_scan(args):
    recs = contradiction_scan(args.L, args.schedule, cap=min(TABLE_CAP, args.max_sieve))
    return _erdos_out(recs, {"first_below_half": first_below_half(recs)})


COMMANDS = {
    "gen": cmd_gen,
    "search": cmd_search,
    "witness": cmd_witness,
    "cover": cmd_cover,
    "bound": cmd_bound,
    "density": cmd_density,
    "recip": cmd_recip,
    "erdos": cmd_erdos,
    "erdos-scan": cmd_erdos_scan,
}

# execution knobs that cannot change a result stay out of the embedded config
_EXECUTION_ONLY = {"threads", "format"}


def resolved_config(args) -> dict:
    cfg = {"command": args.command}
    for key, value in sorted(vars(args).items()):
        if key in _EXECUTION_ONLY or key == "command":
            continue
        if isinstance(value, Fraction):
            value = fmt_q(value)
        elif isinstance(value, tuple):
            value = list(value)
        cfg[key] = value
    src = _source_config(args) if hasattr(args, "set_file") else None
    if src:
        cfg["source"] = src
    return cfg


def render(args, payload) -> str:
    data, (header, rows), text = payload
    if args.format == "json":
        env = {
            "tool": "approxap",
            "version": __version__,
            "schema_version": SCHEMA_VERSION,
            "config": resolved_config(args),
            "result": data,
        }
        return json.dumps(env, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    return text + "\n"


def load_schema(command: str) -> dict:
    """The JSON schema shipped for ``command``'s output."""
    from importlib.resources import files

    return json.loads(files("approxap").joinpath("schemas", f"{command}.json").read_text())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = COMMANDS[args.command](args)
    except ToolkitError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    sys.stdout.write(render(args, payload))
    return 0


run = main


if __name__ == "__main__":
    sys.exit(main())

