"""Command-line driver: configure a parameter regime, run relation suites,
print a human summary, and optionally write the JSON report."""

import argparse
import sys

from .verify import (RunConfig, SUITE_IDS, run_suite, emit_report,
                     list_relations)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcurrents",
        description="Verify the free-field current relations at a chosen "
                    "parameter regime.")
    p.add_argument("--N", type=int, default=2, help="rank parameter (>= 2)")
    p.add_argument("--k", type=int, default=1, help="level (>= 1)")
    p.add_argument("--r", type=int, default=3,
                   help="elliptic parameter; r - k must stay positive")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="comma-separated weight entries, length N-1")
    p.add_argument("--order", type=int, default=12,
                   help="series truncation order")
    p.add_argument("--backend", choices=("exact", "numeric"),
                   default="exact")
    p.add_argument("--suite", action="append", default=None,
                   metavar="ID", help="suite id (repeatable); default: all")
    p.add_argument("--out", default=None, help="path for the JSON report")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel relation evaluations")
    p.add_argument("--screening-shift", choices=("A", "B"), default="A",
                   help="which q-difference reading the screening "
                        "commutator is checked against")
    p.add_argument("--list", action="store_true", dest="list_only",
                   help="print the relation table and exit")
    return p


def _parse_config(argv) -> tuple:
    args = _build_parser().parse_args(argv)
    if args.lam is None:
        lam = tuple([1] * (args.N - 1))
    else:
        lam = tuple(int(x) for x in args.lam.split(","))
    cfg = RunConfig(N=args.N, k=args.k, r=args.r, lam=lam, T=args.order,
                    backend=args.backend,
                    suites=tuple(args.suite) if args.suite else SUITE_IDS,
                    out=args.out, jobs=args.jobs,
                    screening_shift=args.screening_shift)
    return cfg, args.list_only


def parse_and_run(argv=None) -> int:
    try:
        cfg, list_only = _parse_config(argv)
        ctx = cfg.to_context()
    except (ValueError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2

    if list_only:
        for suite, rel_id in list_relations(ctx, cfg.suites):
            print(f"{suite}\t{rel_id}")
        return 0

    failed = False
    docs = []
    for suite in cfg.suites:
        reports = run_suite(suite, ctx, cfg)
        doc = emit_report(suite, reports, fmt="dict")
        docs.append(doc)
        s = doc["summary"]
        print(f"{suite}: {s['pass']} pass, {s['fail']} fail, "
              f"{s['skip']} skip")
        for rep in reports:
            if rep.verdict == "fail":
                failed = True
                print(f"  FAIL {rep.id} [{rep.method}] {rep.witness}")
    if cfg.out:
        import json
        with open(cfg.out, "w") as fh:
            json.dump(docs[0] if len(docs) == 1 else docs, fh, indent=2)
            fh.write("\n")
    return 1 if failed else 0


def main() -> None:
    sys.exit(parse_and_run())
