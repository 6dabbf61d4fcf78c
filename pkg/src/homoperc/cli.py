"""Command-line harness: experiment configuration, execution, serialization.

Subcommands
-----------
betti       Betti numbers of the full complex.
trial       per-trial critical probabilities plus duality audits at probe p's.
sweep       coupled event evaluation across a probability grid.
threshold   critical-probability estimation only (median p_star_A = lambda(N)).
audit       duality audits at the given probabilities; nonzero exit on failure.

Exit codes: 0 success, 2 invalid configuration, 3 duality audit failure.
CSV columns are fixed: model,d,i,N,q,seed,trial,p,rank_phi,rank_psi,
event_A,event_S,p_star_A,p_star_S,ms.  With identical (config, seed) the
outputs are byte-identical except the wall-time fields; pass --no-timing
to zero those out and make runs literally byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .fields import PrimeField
from .homology import betti
from .percolation import (
    CUBICAL,
    PERMUTOHEDRAL,
    DualityAuditError,
    admissibility_violations,
    make_model,
    run_trials,
    summarize,
)
from .permutohedral import build_clique_complex, validate_torus
from .svg import write_cdf_svg

CSV_COLUMNS = [
    "model", "d", "i", "N", "q", "seed", "trial", "p",
    "rank_phi", "rank_psi", "event_A", "event_S", "p_star_A", "p_star_S", "ms",
]

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_AUDIT = 3


@dataclass
class ExperimentConfig:
    model: str
    d: int
    i: int
    N: int
    q: int
    mode: str
    p_grid: list[float] = field(default_factory=list)
    trials: int = 1
    seed: int = 0
    budget: int = 10_000_000
    output: str | None = None
    fmt: str = "both"
    emit_svg: bool = False
    workers: int = 1
    timing: bool = True


def validate(config: ExperimentConfig) -> list[str]:
    """Every violated constraint, without executing anything."""
    v: list[str] = []
    if config.model not in (CUBICAL, PERMUTOHEDRAL):
        v.append(f"unknown model {config.model!r}")
        return v
    if config.d < 2:
        v.append("d must be >= 2")
    if not (1 <= config.i <= config.d - 1):
        v.append(f"i must satisfy 1 <= i <= d-1 = {config.d - 1}")
    try:
        PrimeField(config.q)
    except ValueError as e:
        v.append(str(e))
        return v
    v += admissibility_violations(config.model, config.d, config.q)
    if config.model == CUBICAL:
        if config.N < 3:
            v.append("cubical model requires N >= 3")
        else:
            from math import comb

            count = comb(config.d, config.i + 1) * config.N**config.d
            if count > config.budget:
                v.append(f"{count} (i+1)-cells exceeds budget {config.budget}")
    else:
        v += validate_torus(config.d, config.N)
    if config.mode not in ("betti", "trial", "sweep", "threshold", "audit"):
        v.append(f"unknown mode {config.mode!r}")
    if config.mode in ("trial", "sweep", "audit") and not config.p_grid:
        v.append(f"mode {config.mode} requires at least one probability (-p)")
    for p in config.p_grid:
        if not (0.0 <= p <= 1.0):
            v.append(f"probability {p} outside [0, 1]")
    if config.trials < 1:
        v.append("trials must be >= 1")
    if not (0 <= config.seed < 2**64):
        v.append("seed must fit in 64 bits")
    return v


def _rows_from_reports(config, reports):
    rows = []
    base = {
        "model": config.model, "d": config.d, "i": config.i, "N": config.N,
        "q": config.q, "seed": config.seed,
    }
    for r in reports:
        ms = round(r.ms, 3) if config.timing else 0.0
        pa = "" if r.p_star_A is None else repr(r.p_star_A)
        ps = "" if r.p_star_S is None else repr(r.p_star_S)
        if r.probes:
            for pr in r.probes:
                rows.append(dict(
                    base, trial=r.trial, p=repr(pr.p),
                    rank_phi=pr.rank_phi, rank_psi=pr.rank_psi,
                    event_A=int(pr.event_A), event_S=int(pr.event_S),
                    p_star_A=pa, p_star_S=ps, ms=ms,
                ))
        else:
            rows.append(dict(
                base, trial=r.trial, p="", rank_phi="", rank_psi="",
                event_A="", event_S="", p_star_A=pa, p_star_S=ps, ms=ms,
            ))
    return rows


def _write_outputs(config: ExperimentConfig, rows, summary) -> None:
    if config.output is None:
        return
    base = config.output
    for ext in (".csv", ".json", ".svg"):
        if base.endswith(ext):
            base = base[: -len(ext)]
    if config.fmt in ("csv", "both") and rows is not None:
        with open(base + ".csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, quoting=csv.QUOTE_MINIMAL)
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    if config.fmt in ("json", "both"):
        report = {
            "schema_version": SCHEMA_VERSION,
            "config": asdict(config),
            "rows": rows or [],
            "summary": summary,
        }
        if config.timing:
            report["timestamp"] = time.time()
        with open(base + ".json", "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if config.emit_svg and summary and "p_star_A_values" in summary:
        title = f"{config.model} d={config.d} i={config.i} N={config.N}: CDF of p*_A"
        write_cdf_svg(summary["p_star_A_values"], base + ".svg", title)


def run(config: ExperimentConfig) -> int:
    """Execute the configured mode; returns the process exit status."""
    violations = validate(config)
    if violations:
        for msg in violations:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    f = PrimeField(config.q)
    rows = None
    summary: dict = {}

    if config.mode == "betti":
        if config.model == CUBICAL:
            handle = make_model(CUBICAL, config.d, config.N, config.i).handle
        else:
            from .permutohedral import PermTorusSpec

            handle = build_clique_complex(
                PermTorusSpec(config.d, config.N, config.i), config.d + 1, config.budget
            )
        numbers = [betti(handle, k, f) for k in range(config.d + 1)]
        summary = {"betti": numbers}
        print(f"betti numbers: {numbers}")
        _write_outputs(config, None, summary)
        return EXIT_OK

    model = make_model(config.model, config.d, config.N, config.i)
    compute_pstar = config.mode in ("trial", "threshold")
    probe_ps = tuple(config.p_grid) if config.mode in ("trial", "sweep", "audit") else ()
    try:
        reports = run_trials(
            model, f, config.trials, config.seed,
            probe_ps=probe_ps, compute_pstar=compute_pstar, workers=config.workers,
        )
    except DualityAuditError as e:
        print(f"audit failure: {e}", file=sys.stderr)
        return EXIT_AUDIT

    rows = _rows_from_reports(config, reports)
    summary = summarize(reports)
    if compute_pstar:
        summary["p_star_A_values"] = [r.p_star_A for r in reports]
    if "median_p_star_A" in summary:
        print(f"median p*_A = {summary['median_p_star_A']:.4f} over {config.trials} trials")
    if "event_frequencies" in summary:
        for p, stats in summary["event_frequencies"].items():
            print(f"p={p}: P(A)={stats['A']:.3f} P(S)={stats['S']:.3f}")
    _write_outputs(config, rows, summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homoperc",
        description="Giant-cycle percolation on cubical and permutohedral tori",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("betti", "trial", "sweep", "threshold", "audit"):
        sp = sub.add_parser(mode)
        sp.add_argument("--model", choices=[CUBICAL, PERMUTOHEDRAL], required=True)
        sp.add_argument("-d", type=int, required=True, help="ambient dimension")
        sp.add_argument("-i", type=int, default=1, help="homology dimension")
        sp.add_argument("-N", type=int, required=True, help="torus side length")
        sp.add_argument("-q", type=int, default=3, help="prime field modulus")
        sp.add_argument("-p", type=float, action="append", default=None,
                        help="probability; repeat for a grid")
        sp.add_argument("--trials", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=10_000_000,
                        help="max (i+1)-cell count")
        sp.add_argument("--output", "-o", default=None, help="output base path")
        sp.add_argument("--format", choices=["csv", "json", "both"], default="both")
        sp.add_argument("--emit-svg", action="store_true",
                        help="write an SVG of the empirical CDF of p*_A")
        sp.add_argument("--workers", type=int,
                        default=int(os.environ.get("HOMOPERC_THREADS", "1")))
        sp.add_argument("--timing", action=argparse.BooleanOptionalAction, default=True,
                        help="--no-timing zeroes wall-time fields for byte-stable output")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        model=args.model, d=args.d, i=args.i, N=args.N, q=args.q, mode=args.mode,
        p_grid=list(args.p) if args.p else [],
        trials=args.trials, seed=args.seed, budget=args.budget,
        output=args.output, fmt=args.format, emit_svg=args.emit_svg,
        workers=args.workers, timing=args.timing,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
