"""Command-line pipelines: ingest, analyze, simulate.

Stages communicate only through files (the word-day matrix format plus
CSV/JSON reports), so each one can be run and tested in isolation.  All
randomized stages take an explicit ``--seed``; reruns with an identical
configuration produce byte-identical outputs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dense import (
    matched_poisson_null,
    pool_rescaled,
    sigma_scaling,
    write_sigma_scaling_csv,
    write_xtilde_csv,
)
from .ensembles import build_ensembles, select_dilute, write_spectrum_csv
from .errors import EmptySampleError, FitDidNotConverge, WordburstError
from .fileio import atomic_writer
from .ingest import ScanLog, bin_daily, clean_missing_scans, read_flat_corpus
from .matrix import load_matrix, save_matrix
from .nullmodels import SyntheticCorpusSpec, generate
from .rankstats import (
    fit_modified_power_law,
    fit_report_json,
    fit_zipf,
    fit_zipf_mandelbrot,
    rank_curve,
    write_rank_csv,
)
from .waiting import (
    aggregate_distribution,
    ensemble_distribution,
    fit_stretched_exponential,
    log_binned_density,
    mean_waiting_check,
    rescale_time,
    risk_function,
    write_distribution_csv,
    write_rescaled_csv,
    write_zeta_csv,
    zeta_by_ensemble,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code this tool promises (1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wordburst", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_ingest = sub.add_parser("ingest", help="flat corpus -> cleaned matrix + cleaning report")
    p_ingest.add_argument("--input", required=True, help="flat corpus file (date<TAB>feed_id<TAB>text)")
    p_ingest.add_argument("--scan-log", help="optional scan log JSON; days it marks as missed are cleaned")
    p_ingest.add_argument("--output", required=True, help="output directory")
    p_ingest.set_defaults(func=cmd_ingest)

    p_analyze = sub.add_parser("analyze", help="matrix -> CSV/JSON statistics for one mode")
    p_analyze.add_argument("--input", required=True, help="matrix file")
    p_analyze.add_argument("--mode", required=True, choices=("rank", "dilute", "dense"))
    p_analyze.add_argument("--k-min", type=int, help="lowest class k to include")
    p_analyze.add_argument("--k-max", type=int, help="highest class k to include")
    p_analyze.add_argument("--seed", type=int, default=0, help="seed for randomized analysis stages")
    p_analyze.add_argument("--emit-plots", action="store_true", help="also write plot-ready column files")
    p_analyze.add_argument("--output", required=True, help="output directory")
    p_analyze.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="generator spec JSON -> synthetic matrix")
    p_sim.add_argument("--spec", required=True, help="generator spec JSON file")
    p_sim.add_argument("--output", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except WordburstError as exc:
        if isinstance(exc, FitDidNotConverge):
            print(f"wordburst: numeric failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"wordburst: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"wordburst: {exc}", file=sys.stderr)
        return EXIT_DATA


def cmd_ingest(args) -> int:
    outdir = _prepare_outdir(args.output)
    posts, horizon = read_flat_corpus(args.input)
    matrix = bin_daily(posts, horizon)
    if args.scan_log:
        log = ScanLog.from_json(Path(args.scan_log).read_text(encoding="utf-8"))
    else:
        log = ScanLog.all_scanned(horizon)
    matrix, report = clean_missing_scans(matrix, log)
    save_matrix(matrix, outdir / "matrix.tsv")
    _write_text(outdir / "cleaning_report.json", report.to_json() + "\n")
    _write_manifest(outdir, "ingest", {
        "input": args.input, "scan_log": args.scan_log,
    }, ["matrix.tsv", "cleaning_report.json"])
    return EXIT_OK


def cmd_analyze(args) -> int:
    outdir = _prepare_outdir(args.output)
    matrix = load_matrix(args.input)
    config = {
        "input": args.input, "mode": args.mode, "k_min": args.k_min,
        "k_max": args.k_max, "seed": args.seed, "emit_plots": args.emit_plots,
    }
    if args.mode == "rank":
        outputs = _analyze_rank(matrix, outdir, args)
    elif args.mode == "dilute":
        outputs = _analyze_dilute(matrix, outdir, args)
    else:
        outputs = _analyze_dense(matrix, outdir, args)
    _write_manifest(outdir, "analyze", config, outputs)
    return EXIT_OK


def _analyze_rank(matrix, outdir, args) -> list[str]:
    curve = rank_curve(matrix)
    fit = fit_modified_power_law(curve)
    zipf = fit_zipf(curve)
    zm = fit_zipf_mandelbrot(curve)
    write_rank_csv(outdir / "rank.csv", curve, fit)
    _write_text(outdir / "fit.json", fit_report_json(fit, zipf, zm) + "\n")
    outputs = ["rank.csv", "fit.json"]
    if args.emit_plots:
        _write_plot(outdir / "plot_rank.csv", ["rank", "count", "fitted"],
                    zip(curve.ranks, curve.counts, fit.predict(curve.ranks)))
        outputs.append("plot_rank.csv")
    return outputs


def _analyze_dilute(matrix, outdir, args) -> list[str]:
    index = build_ensembles(matrix)
    selected = [e for e in select_dilute(index)
                if (args.k_min is None or e.k >= args.k_min)
                and (args.k_max is None or e.k <= args.k_max)]
    entries = []
    rescaled = []
    fits: dict[str, dict] = {}
    checks = []
    for ens in selected:
        try:
            dist = ensemble_distribution(ens, matrix)
        except EmptySampleError:
            continue
        risk = risk_function(dist)
        entries.append((ens.k, dist, risk))
        rescaled.append(rescale_time(risk, ens.k))
        checks.append(mean_waiting_check(dist))
        try:
            fit = fit_stretched_exponential(risk)
            fits[str(ens.k)] = {"a": fit.a, "nu": fit.nu, "C": fit.C,
                                "residual": fit.residual, "n_points": fit.n_points}
        except (EmptySampleError, FitDidNotConverge) as exc:
            fits[str(ens.k)] = {"skipped": str(exc)}
    write_distribution_csv(outdir / "waiting.csv", entries)
    write_rescaled_csv(outdir / "rescaled.csv", rescaled)
    rows = zeta_by_ensemble(index, matrix, k_lo=args.k_min, k_hi=args.k_max, seed=args.seed)
    write_zeta_csv(outdir / "zeta.csv", rows)
    _write_meancheck_csv(outdir / "meancheck.csv", checks)
    write_spectrum_csv(index, outdir / "spectrum.csv")
    outputs = ["waiting.csv", "rescaled.csv", "zeta.csv", "meancheck.csv", "spectrum.csv", "fits.json"]
    try:
        agg = aggregate_distribution(index, matrix)
        agg_risk = risk_function(agg)
        _write_aggregate_csv(outdir / "aggregate.csv", agg, agg_risk)
        _write_binned_csv(outdir / "aggregate_binned.csv", agg)
        outputs += ["aggregate.csv", "aggregate_binned.csv"]
        try:
            fit = fit_stretched_exponential(agg_risk)
            fits["aggregate"] = {"a": fit.a, "nu": fit.nu, "C": fit.C,
                                 "residual": fit.residual, "n_points": fit.n_points}
        except (EmptySampleError, FitDidNotConverge) as exc:
            fits["aggregate"] = {"skipped": str(exc)}
    except EmptySampleError:
        print("wordburst: warning: no waiting times in any sparse class", file=sys.stderr)
    _write_text(outdir / "fits.json", json.dumps(fits, indent=2, sort_keys=True) + "\n")
    if args.emit_plots:
        _write_plot(outdir / "plot_rescaled.csv", ["t_R", "R", "k"],
                    ((t, v, c.k) for c in rescaled for t, v in zip(c.t_r, c.values) if v > 0))
        outputs.append("plot_rescaled.csv")
    return sorted(outputs)


def _analyze_dense(matrix, outdir, args) -> list[str]:
    k_lo = args.k_min if args.k_min is not None else 1000
    k_hi = args.k_max if args.k_max is not None else 2000
    empirical = pool_rescaled(matrix, k_lo, k_hi)
    sidecar = {
        "k_min": k_lo, "k_max": k_hi, "seed": args.seed,
        "bin_width": 0.25, "window": [-6.0, 10.0],
        "word_count": empirical.word_count, "skipped_words": empirical.skipped_words,
        "clipped_values": empirical.clipped_count,
    }
    outputs = ["xtilde.csv", "dense.json"]
    if empirical.word_count == 0:
        print(f"wordburst: warning: no words with totals in [{k_lo}, {k_hi}]", file=sys.stderr)
        null = empirical
    else:
        null_matrix = matched_poisson_null(matrix, k_lo, k_hi, args.seed)
        null = pool_rescaled(null_matrix, k_lo, k_hi)
        try:
            table = sigma_scaling(matrix)
            write_sigma_scaling_csv(outdir / "sigma_scaling.csv", table)
            sidecar["sigma_exponent_rel"] = table.exponent_rel
            sidecar["sigma_exponent_abs"] = table.exponent_abs
            outputs.append("sigma_scaling.csv")
        except ValueError as exc:
            sidecar["sigma_scaling_skipped"] = str(exc)
    write_xtilde_csv(outdir / "xtilde.csv", empirical, null)
    _write_text(outdir / "dense.json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    if args.emit_plots:
        _write_plot(outdir / "plot_xtilde.csv", ["xtilde", "empirical", "null"],
                    zip(empirical.bin_centers, empirical.density, null.density))
        outputs.append("plot_xtilde.csv")
    return sorted(outputs)


def cmd_simulate(args) -> int:
    outdir = _prepare_outdir(args.output)
    spec = SyntheticCorpusSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    matrix = generate(spec)
    save_matrix(matrix, outdir / "matrix.tsv")
    _write_text(outdir / "spec.json", spec.to_json() + "\n")
    _write_manifest(outdir, "simulate", {"spec": json.loads(spec.to_json())}, ["matrix.tsv", "spec.json"])
    return EXIT_OK


def _prepare_outdir(path) -> Path:
    outdir = Path(path)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _write_text(path, text: str) -> None:
    with atomic_writer(path) as fh:
        fh.write(text)


def _write_manifest(outdir: Path, command: str, config: dict, outputs: list[str]) -> None:
    manifest = {
        "tool": "wordburst",
        "version": __version__,
        "command": command,
        "config": config,
        "outputs": sorted(outputs),
    }
    _write_text(outdir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _write_meancheck_csv(path, checks) -> None:
    import csv

    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "mean_tau", "expected", "deviation", "sample_count", "low_sample"])
        for c in checks:
            writer.writerow([c.k, f"{c.mean_tau:.12g}", f"{c.expected:.12g}",
                             f"{c.deviation:.12g}", c.sample_count, int(c.low_sample)])


def _write_aggregate_csv(path, dist, risk) -> None:
    import csv

    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", "f", "R"])
        for tau, f, r in zip(dist.support, dist.f, risk.values):
            if f > 0:
                writer.writerow([tau, f"{f:.12g}", f"{r:.12g}"])


def _write_binned_csv(path, dist) -> None:
    import csv

    taus = np.repeat(dist.support, np.round(dist.f * dist.sample_count).astype(np.int64))
    lo, hi, center, density = log_binned_density(taus)
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau_lo", "tau_hi", "tau_center", "density"])
        for a, b, c, d in zip(lo, hi, center, density):
            writer.writerow([f"{a:.12g}", f"{b:.12g}", f"{c:.12g}", f"{d:.12g}"])


def _write_plot(path, columns, rows) -> None:
    """Two/three-column file with a comment header, ready for plotting tools."""
    with atomic_writer(path) as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for row in rows:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


if __name__ == "__main__":
    sys.exit(main())
