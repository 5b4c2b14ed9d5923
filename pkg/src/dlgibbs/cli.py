"""Command-line entry point: posterior chains, the Geweke harness, the study.

Exit-code protocol (so CI scripts can assert the statistical claims
directly): 0 success, 2 usage or input error, 3 Geweke rejection (some
adjusted p fell below the threshold), 4 partial simulation-study failure.

Every run writes a ``run_meta.json`` sidecar with the fully resolved
configuration and the artifact version next to its outputs, never writes
outside ``--out``, and finalizes files with write-then-rename so an
interrupted run leaves no corrupt outputs.  Outputs are byte-reproducible
under a fixed seed for any ``--threads`` value.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParameterError
from .geweke import geweke_report
from .kernels import ChainConfig, KernelId, posterior_summary, run_posterior_chain
from .model import PriorConfig
from .rng import RngStream
from .simstudy import ScenarioGrid, gen_data, gen_truth, resolve_concentration, run_study

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_GEWEKE_REJECT = 3
_EXIT_STUDY_PARTIAL = 4

_KERNEL_CHOICES = [k.value for k in KernelId]

_SYNTH_DATA_STREAM = 0x73796E
_SAMPLE_CHAIN_STREAM = 0x636E


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_meta(out_dir: Path, command: str, config: dict) -> None:
    meta = {
        "artifact": {"name": "dlgibbs", "version": __version__},
        "command": command,
        "config": config,
    }
    _write_atomic(out_dir / "run_meta.json",
                  json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=1,
                        help="master seed; outputs are byte-reproducible under it (default: 1)")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory; all files go here (default: current directory)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker parallelism bound; never changes results (default: 1)")


def _load_y_csv(path: Path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["y"]:
            raise ParameterError(f"{path}: expected a single-column CSV with header 'y'")
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 1:
                raise ParameterError(f"{path}:{lineno}: expected one value per row")
            values.append(float(row[0]))
    if not values:
        raise ParameterError(f"{path}: no data rows")
    return np.asarray(values)


def _parse_synthetic(spec: str) -> tuple[int, int, float]:
    parts = spec.split(",")
    if len(parts) != 3:
        raise ParameterError(f"--synthetic expects 'n,q_n,A', got {spec!r}")
    return int(parts[0]), int(parts[1]), float(parts[2])


def cmd_sample(args: argparse.Namespace) -> int:
    out_dir: Path = args.out
    try:
        if args.input is not None:
            if not args.input.is_file():
                print(f"error: input file not found: {args.input}", file=sys.stderr)
                return _EXIT_USAGE
            y = _load_y_csv(args.input)
            source = {"input": str(args.input)}
        else:
            n, q_n, signal = _parse_synthetic(args.synthetic)
            theta0 = gen_truth(n, q_n, signal)
            y = gen_data(theta0, RngStream(args.seed, _SYNTH_DATA_STREAM))
            source = {"synthetic": {"n": n, "q_n": q_n, "A": signal}}
        a_value, a_label = resolve_concentration(args.a, y.size)
        chain = ChainConfig(iterations=args.iterations, burn_in=args.burn_in,
                            thin=args.thin, seed=args.seed,
                            kernel=KernelId(args.kernel),
                            prior=PriorConfig(n=y.size, a=a_value))
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    matrix = run_posterior_chain(y, chain, RngStream(args.seed, _SAMPLE_CHAIN_STREAM))
    summary = posterior_summary(matrix)
    lines = ["coordinate,mean,median,q2.5,q97.5"]
    for j in range(y.size):
        lines.append(f"theta_{j + 1},{float(summary['mean'][j])!r},"
                     f"{float(summary['median'][j])!r},"
                     f"{float(summary['q2.5'][j])!r},{float(summary['q97.5'][j])!r}")

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "samples.csv", matrix.to_csv())
    _write_atomic(out_dir / "posterior_summary.csv", "\n".join(lines) + "\n")
    _write_meta(out_dir, "sample", {
        "source": source, "kernel": chain.kernel.value, "a": a_label,
        "n": y.size, "iterations": chain.iterations, "burn_in": chain.burn_in,
        "thin": chain.thin, "seed": args.seed,
    })
    return _EXIT_OK


def cmd_geweke(args: argparse.Namespace) -> int:
    out_dir: Path = args.out
    try:
        config = PriorConfig(n=args.n, a=float(args.a))
        report = geweke_report(config, KernelId(args.kernel), args.m, args.seed,
                               scs_thin=args.scs_thin, qq_grid=args.qq_grid)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "geweke_summary.csv", report.to_summary_csv())
    _write_atomic(out_dir / "geweke_qq.csv", report.to_qq_csv())
    _write_meta(out_dir, "geweke", {
        "kernel": report.kernel, "n": config.n, "a": config.a, "m": report.M,
        "scs_thin": report.scs_thin, "qq_grid": args.qq_grid,
        "threshold": args.threshold, "seed": args.seed,
    })
    for r in report.results:
        print(f"{r.function}: ks={r.ks:.5f} p_adj={r.p_adj:.3g}")
    if not report.passed(args.threshold):
        print(f"geweke: REJECTED (min adjusted p = {report.min_adjusted_p():.3g} "
              f"< {args.threshold:g})", file=sys.stderr)
        return _EXIT_GEWEKE_REJECT
    print(f"geweke: passed (min adjusted p = {report.min_adjusted_p():.3g})")
    return _EXIT_OK


def cmd_simstudy(args: argparse.Namespace) -> int:
    out_dir: Path = args.out
    if args.full:
        print("warning: --full runs the full published-scale grids (n up to 1000, "
              "R=100); expect hours, not minutes", file=sys.stderr)
    try:
        grids = _simstudy_grids(args)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    tables = [run_study(grid, args.threads, args.seed) for grid in grids]
    table = tables[0]
    if len(tables) > 1:
        from dataclasses import replace
        table = replace(table, cells=tuple(c for t in tables for c in t.cells))

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "simtable.csv", table.to_csv())
    _write_atomic(out_dir / "simtable.txt", table.to_text())
    _write_meta(out_dir, "simstudy", {
        "grids": [
            {"n": list(g.n_values),
             "sparsity": list(g.sparsity_fractions),
             "A": list(g.signal_strengths),
             "a": [str(sp) for sp in g.concentrations],
             "kernels": [k.value for k in g.kernels],
             "replicates": g.replicates,
             "estimators": list(g.estimators),
             "iterations": g.iterations, "burn_in": g.burn_in, "thin": g.thin}
            for g in grids
        ],
        "full": args.full, "seed": args.seed,
    })
    failed = table.failed_cells()
    if failed:
        for c in failed:
            print(f"cell failed: n={c.n} sparsity={c.sparsity} A={c.signal} "
                  f"a={c.a_label} kernel={c.kernel}: {c.error}", file=sys.stderr)
        return _EXIT_STUDY_PARTIAL
    print(f"simstudy: {len(table.cells)} cells written to {out_dir / 'simtable.csv'}")
    return _EXIT_OK


def _simstudy_grids(args: argparse.Namespace) -> list[ScenarioGrid]:
    estimators = ("median", "mean") if args.estimator == "both" else (args.estimator,)
    kernels = tuple(KernelId(k) for k in args.kernel)
    concentrations = tuple(args.a)
    common = dict(kernels=kernels, estimators=estimators, concentrations=concentrations,
                  iterations=args.iterations, burn_in=args.burn_in, thin=args.thin)
    explicit = args.n is not None or args.sparsity is not None or args.signal is not None
    if explicit:
        grid = ScenarioGrid(
            n_values=tuple(args.n or (100, 200)),
            sparsity_fractions=tuple(s / 100.0 for s in (args.sparsity or (5, 10, 20))),
            signal_strengths=tuple(args.signal or (5.0, 6.0)),
            replicates=args.replicates, **common)
        return [grid]
    if args.full:
        # Published scale: the two signal-strength tables plus the
        # high-dimensional signal sweep, 100 replicates each.
        return [
            ScenarioGrid(n_values=(100, 200), sparsity_fractions=(0.05, 0.10, 0.20),
                         signal_strengths=(5.0, 6.0, 7.0, 8.0),
                         replicates=args.replicates if args.replicates != 20 else 100,
                         **common),
            ScenarioGrid(n_values=(1000,), sparsity_fractions=(0.05,),
                         signal_strengths=(2.0, 3.0, 4.0, 5.0, 6.0, 7.0),
                         replicates=args.replicates if args.replicates != 20 else 100,
                         **common),
        ]
    # Desk scale: the weak-signal table cells at reduced replicate count.
    return [ScenarioGrid(n_values=(100, 200), sparsity_fractions=(0.05, 0.10, 0.20),
                         signal_strengths=(5.0, 6.0), replicates=args.replicates,
                         **common)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlgibbs",
        description="Dirichlet-Laplace normal-means posterior simulation: "
                    "chains, kernel-correctness harness, simulation study.")
    parser.add_argument("--version", action="version", version=f"dlgibbs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run one posterior chain and write draws + summaries")
    _add_common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path,
                     help="CSV with a single column 'y' of observations")
    src.add_argument("--synthetic", type=str, metavar="N,QN,A",
                     help="generate data: N coordinates, QN signals of strength A")
    p.add_argument("--kernel", choices=_KERNEL_CHOICES, default="corrected",
                   help="transition kernel (default: corrected)")
    p.add_argument("--a", default="0.5",
                   help="Dirichlet concentration, a number or '1/n' (default: 0.5)")
    p.add_argument("--iterations", type=int, default=5000,
                   help="total sweeps (default: 5000)")
    p.add_argument("--burn-in", type=int, default=1000,
                   help="discarded initial sweeps (default: 1000)")
    p.add_argument("--thin", type=int, default=1,
                   help="keep every thin-th retained sweep (default: 1)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("geweke", help="joint-distribution test of a kernel "
                                      "(exit 3 when it rejects)")
    _add_common(p)
    p.add_argument("--kernel", choices=_KERNEL_CHOICES, default="corrected",
                   help="transition kernel under test (default: corrected)")
    p.add_argument("--n", type=int, default=5,
                   help="model dimension (default: 5)")
    p.add_argument("--a", default="0.5",
                   help="Dirichlet concentration (default: 0.5)")
    p.add_argument("--m", type=int, default=250_000,
                   help="iterations per simulator (default: 250000)")
    p.add_argument("--scs-thin", type=int, default=10,
                   help="thin the successive-conditional draws by this factor "
                        "before testing (default: 10)")
    p.add_argument("--qq-grid", type=int, default=99,
                   help="number of QQ probability points (default: 99)")
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="reject when any Bonferroni-adjusted p falls below this "
                        "(default: 0.001)")
    p.set_defaults(func=cmd_geweke)

    p = sub.add_parser("simstudy", help="squared-error study across kernels "
                                        "(exit 4 on partial failure)")
    _add_common(p)
    p.add_argument("--n", type=int, nargs="+", default=None,
                   help="dimensions (default grid: 100 200)")
    p.add_argument("--sparsity", type=float, nargs="+", default=None,
                   help="signal percentages q_n/n*100 (default grid: 5 10 20)")
    p.add_argument("--signal", type=float, nargs="+", default=None,
                   help="signal strengths A (default grid: 5 6)")
    p.add_argument("--a", nargs="+", default=["1/n", "0.5"],
                   help="concentrations, numbers or '1/n' (default: 1/n 0.5)")
    p.add_argument("--kernel", nargs="+", choices=_KERNEL_CHOICES,
                   default=_KERNEL_CHOICES,
                   help="kernels to compare (default: all three)")
    p.add_argument("--replicates", type=int, default=20,
                   help="replicates per cell (default: 20; --full default: 100)")
    p.add_argument("--estimator", choices=["median", "mean", "both"],
                   default="median",
                   help="posterior point estimator scored against the truth "
                        "(default: median)")
    p.add_argument("--iterations", type=int, default=5000,
                   help="sweeps per replicate chain (default: 5000)")
    p.add_argument("--burn-in", type=int, default=1000,
                   help="burn-in per replicate chain (default: 1000)")
    p.add_argument("--thin", type=int, default=1,
                   help="chain thinning (default: 1)")
    p.add_argument("--full", action="store_true",
                   help="full published-scale grids incl. n=1000 at R=100 (slow)")
    p.set_defaults(func=cmd_simstudy)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
