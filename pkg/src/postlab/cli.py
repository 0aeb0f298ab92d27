"""postlab command line.

Exit codes: 0 success or expected outcome, 1 usage error, 2 unconfirmed
cell or failed witness.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import postnum
from .certify import (
    STRATEGIES,
    UNCONFIRMED,
    CellVerdict,
    InvalidUnion,
    certify_maximal_rank,
    exceptional_probe,
    matches_expectation,
    verify_theorem_cell,
)
from .exactlin import DEFAULT_PRIME, FieldTooSmall
from .reconcile import build_rows, render_markdown
from .records import Appender, RunRecord, read_records, utc_now
from .witness import WitnessFailed, build_witness_B, build_witness_H, build_witness_R

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
TABLE_COLUMNS = ("m", "d", "k", "h0@k-1", "h1@k", "status")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _common(p: argparse.ArgumentParser, out: bool = True) -> None:
    # None means "not given", so the environment can fill it in later
    p.add_argument("--seed", type=int, default=None, help="master seed (env POSTLAB_SEED, default 0)")
    p.add_argument("--prime", type=int, default=None, help=f"field modulus (env POSTLAB_PRIME, default {DEFAULT_PRIME})")
    if out:
        p.add_argument("--out", default="results.jsonl", help="JSONL file to append records to")


def _resolve(args) -> None:
    if getattr(args, "seed", "n/a") is None:
        args.seed = _env_int("POSTLAB_SEED", 0)
    if getattr(args, "prime", "n/a") is None:
        args.prime = _env_int("POSTLAB_PRIME", DEFAULT_PRIME)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="postlab", description="Postulation checks for mP plus general lines in P^3.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="certify one (m, d, t) cell")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    _common(p)

    p = sub.add_parser("sweep", help="verify every cell up to m-max with critical value <= t-max")
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--format", choices=("md", "csv"), default="md")
    p.add_argument("--table", default=None, help="also write the summary table here")
    _common(p)

    p = sub.add_parser("witness", help="build and check a witness configuration")
    p.add_argument("kind", choices=("b", "r", "h"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=None, help="degree for kind h")
    _common(p)

    p = sub.add_parser("comb", help="print the ledger cell (a, b) for (m, k)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("reconcile", help="compare printed ledger identities with derived values")
    p.add_argument("--m-max", type=int, default=60)
    p.add_argument("--format", choices=("md", "json"), default="md")

    p = sub.add_parser("report", help="render a table from sweep records")
    p.add_argument("--in", dest="infile", default="results.jsonl")
    p.add_argument("--format", choices=("md", "csv"), default="md")
    return parser


# -- check --------------------------------------------------------------------


def cmd_check(args) -> int:
    started = utc_now()
    cert = certify_maximal_rank(
        args.m, args.d, args.t, strategy=args.strategy, seed=args.seed, retries=args.retries, prime=args.prime
    )
    rec = RunRecord(
        "check",
        {"m": args.m, "d": args.d, "t": args.t, "seed": args.seed, "prime": args.prime,
         "retries": args.retries, "strategy": args.strategy},
        [cert],
        started_at=started,
        finished_at=utc_now(),
    )
    Appender(args.out).write([rec])
    flag = " exceptional" if cert.exceptional else ""
    print(f"{cert.status} h0={cert.h0} h1={cert.h1} rank={cert.rank}/{min(cert.N, cert.degree)}{flag}")
    print(f"  N={cert.N} degree={cert.degree} prime={cert.prime} attempts={cert.attempts}: {cert.note}")
    if cert.status == UNCONFIRMED:
        return EXIT_FAIL
    return EXIT_OK if matches_expectation(cert) else EXIT_FAIL


# -- sweep --------------------------------------------------------------------


def sweep_cells(m_max: int, t_max: int) -> list[tuple[int, int]]:
    cells = []
    for m in range(1, m_max + 1):
        d = 1
        while postnum.critical_value(m, d) <= t_max:
            cells.append((m, d))
            d += 1
    return cells


def _run_cell(job):
    m, d, seed, prime, retries = job
    started = utc_now()
    verdict = verify_theorem_cell(m, d, seed=seed, retries=retries, prime=prime)
    return verdict, started, utc_now()


def _run_probe(job):
    m, d, seed, prime = job
    started = utc_now()
    res = exceptional_probe(m, d, seed=seed, prime=prime)
    return res, started, utc_now()


def _map(fn, jobs, n_workers):
    if n_workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


def render_table(rows: list[dict], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in rows:
            w.writerow(["" if r[c] is None else r[c] for c in TABLE_COLUMNS])
        return buf.getvalue()
    lines = ["| " + " | ".join(TABLE_COLUMNS) + " |", "|" + "---|" * len(TABLE_COLUMNS)]
    for r in rows:
        lines.append("| " + " | ".join("-" if r[c] is None else str(r[c]) for c in TABLE_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    if args.m_max < 1 or args.t_max < args.m_max or args.jobs < 1:
        raise UsageError("need m-max >= 1, t-max >= m-max and jobs >= 1")
    cells = sweep_cells(args.m_max, args.t_max)
    probes = [(m, d) for m in range(2, args.m_max + 1) for d in range(2, m + 1)]
    results = _map(_run_cell, [(m, d, args.seed, args.prime, args.retries) for m, d in cells], args.jobs)
    probe_results = _map(_run_probe, [(m, d, args.seed, args.prime) for m, d in probes], args.jobs)

    records = []
    rows = []
    for verdict, started, finished in results:
        verdict: CellVerdict
        row = verdict.row()
        rows.append(row)
        records.append(
            RunRecord("sweep-cell", {"m": verdict.m, "d": verdict.d, "k": verdict.k, "seed": args.seed,
                                     "prime": args.prime, "retries": args.retries},
                      verdict.certificates(), result=row, started_at=started, finished_at=finished)
        )
    for res, started, finished in probe_results:
        records.append(
            RunRecord("sweep-probe", {"m": res.m, "d": res.d, "t": res.t, "seed": args.seed, "prime": args.prime},
                      [], result={"h0": res.h0, "h1": res.h1, "samples": res.samples,
                                  "observed": [list(o) for o in res.observed], "caveat": res.caveat},
                      started_at=started, finished_at=finished)
        )
    Appender(args.out).write(records)
    table = render_table(rows, args.format)
    sys.stdout.write(table)
    if args.table:
        with open(args.table, "w", encoding="utf-8") as fh:
            fh.write(table)
    bad = [r for r in rows if r["status"] == UNCONFIRMED]
    print(f"{len(rows)} cells, {len(probes)} probes, {len(bad)} unconfirmed")
    return EXIT_FAIL if bad else EXIT_OK


# -- witness, comb, reconcile, report ----------------------------------------------


def cmd_witness(args) -> int:
    started = utc_now()
    try:
        if args.kind == "b":
            cfg = build_witness_B(args.m, seed=args.seed, prime=args.prime)
        elif args.kind == "r":
            cfg = build_witness_R(args.m, seed=args.seed, prime=args.prime)
        else:
            if args.k is None:
                raise UsageError("witness h needs --k")
            cfg = build_witness_H(args.m, args.k, seed=args.seed, prime=args.prime)
    except WitnessFailed as exc:
        report = {"kind": exc.kind, "failed_check": exc.check, "detail": exc.detail, "passed": False}
        print(json.dumps(report, indent=2))
        Appender(args.out).write([RunRecord("witness", vars_of(args), [], report, started, utc_now())])
        return EXIT_FAIL
    report = cfg.report()
    print(json.dumps(report, indent=2, default=str))
    Appender(args.out).write([RunRecord("witness", vars_of(args), [], report, started, utc_now())])
    return EXIT_OK if cfg.passed else EXIT_FAIL


def vars_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "out", "func")}


def cmd_comb(args) -> int:
    cell = postnum.ab(args.m, args.k)
    print(json.dumps({"m": args.m, "k": args.k, "a": cell.a, "b": cell.b}))
    return EXIT_OK


def cmd_reconcile(args) -> int:
    rows = build_rows(args.m_max)
    if args.format == "json":
        print(json.dumps([r.as_dict() for r in rows], indent=2))
    else:
        print(render_markdown(rows))
    return EXIT_OK


def cmd_report(args) -> int:
    rows = [rec.result for rec in read_records(args.infile) if rec.command == "sweep-cell"]
    # last record for a cell wins, table sorted by cell
    latest = {(r["m"], r["d"]): r for r in rows}
    sys.stdout.write(render_table([latest[k] for k in sorted(latest)], args.format))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "sweep": cmd_sweep,
    "witness": cmd_witness,
    "comb": cmd_comb,
    "reconcile": cmd_reconcile,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _resolve(args)
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, FieldTooSmall, FileNotFoundError) as exc:
        print(f"postlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidUnion as exc:
        print(f"postlab: could not build a valid union: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
