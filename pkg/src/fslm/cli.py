"""Command-line interface: simulate, fit, table1, moran.

Flag precedence is flags > JSON config file (--config) > built-in
defaults.  Exit codes: 0 success, 2 validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as fio
from .basis import build_bspline_basis, smooth_curves
from .mle import fit_ml
from .model import FslmData, PriorSpec
from .sampler import MhConfig, run_mwg, summarize
from .simgen import SimulationSpec, make_dataset, simulate_covariates, simulate_response
from .spatial import (
    grid_contiguity,
    morans_i,
    row_standardize,
    weights_from_edges,
)

BAYES_METHODS = {"normal-kernel": "normal", "uniform-kernel": "uniform"}


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except Exception:
        raise argparse.ArgumentTypeError("grid must look like ROWSxCOLS, e.g. 11x11")


def _parse_rho_list(text: str) -> list[float]:
    vals = [float(v) for v in text.split(",") if v.strip() != ""]
    if not vals:
        raise argparse.ArgumentTypeError("rho-list must not be empty")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fslm")
    parser.add_argument("--config", type=Path, help="JSON file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic data bundle")
    sim.add_argument("--rho", type=float, default=0.5)
    sim.add_argument("--sigma2", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--grid", type=_parse_grid, default=(11, 11))
    sim.add_argument("--edges", type=Path, help="edge-list CSV instead of a lattice")
    sim.add_argument("--n-units", type=int, help="unit count when using --edges")
    sim.add_argument("--basis-count", type=int, default=7)
    sim.add_argument("--noise-sd", type=float, default=1.0)
    sim.add_argument("--out", type=Path, required=True)

    fit = sub.add_parser("fit", help="fit estimators to a simulated bundle")
    fit.add_argument("--data", type=Path, required=True, help="bundle directory")
    fit.add_argument(
        "--method",
        choices=["normal-kernel", "uniform-kernel", "ml", "all"],
        default="normal-kernel",
    )
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--n-iter", type=int, default=20_000)
    fit.add_argument("--burn-in", type=int, default=5_000)
    fit.add_argument("--tuning-c", type=float, default=0.1)
    fit.add_argument("--adapt", action=argparse.BooleanOptionalAction, default=True)
    fit.add_argument("--basis-count", type=int, default=7)
    fit.add_argument("--svg", action="store_true", help="emit SVG trace plots")
    fit.add_argument("--out", type=Path, required=True)

    tab = sub.add_parser("table1", help="simulate and compare all methods per rho")
    tab.add_argument("--rho-list", type=_parse_rho_list, required=True)
    tab.add_argument("--replicates", type=int, default=1)
    tab.add_argument("--seed", type=int, default=0)
    tab.add_argument("--grid", type=_parse_grid, default=(11, 11))
    tab.add_argument("--basis-count", type=int, default=7)
    tab.add_argument("--n-iter", type=int, default=5_000)
    tab.add_argument("--burn-in", type=int, default=1_500)
    tab.add_argument("--tuning-c", type=float, default=0.1)
    tab.add_argument("--out", type=Path, required=True)

    mor = sub.add_parser("moran", help="Moran's I permutation test")
    mor.add_argument("--response", type=Path, required=True)
    mor.add_argument("--weights", type=Path, required=True)
    mor.add_argument("--permutations", type=int, default=999)
    mor.add_argument("--seed", type=int, default=0)

    parser._subcommand_parsers = {"simulate": sim, "fit": fit, "table1": tab,
                                  "moran": mor}
    return parser


def cmd_simulate(args) -> int:
    if not 0 <= args.rho < 1:
        raise ValueError("--rho must be in [0, 1)")
    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    grid_t = np.arange(101.0)
    basis = build_bspline_basis(grid_t[0], grid_t[-1], args.basis_count, 4)
    if args.edges is not None:
        edges = fio.read_edges_csv(args.edges)
        n = args.n_units or (1 + max(max(e) for e in edges))
        w = row_standardize(weights_from_edges(n, edges))
        rng = np.random.default_rng(args.seed)
        signal = np.cos(grid_t) + np.sin(grid_t)
        raw = signal[None, :] + args.noise_sd * rng.standard_normal((n, grid_t.size))
        sample = smooth_curves(grid_t, raw, basis)
        dataset = simulate_response(
            sample, w, rho=args.rho, sigma2=args.sigma2,
            seed=args.seed + 1, t_grid=grid_t,
        )
        raw_obs = raw
    else:
        rows, cols = args.grid
        spec = SimulationSpec(
            rho_true=args.rho,
            sigma2_true=args.sigma2,
            lattice_rows=rows,
            lattice_cols=cols,
            grid_t=grid_t,
            noise_sd=args.noise_sd,
            n_basis=args.basis_count,
            seed=args.seed,
        )
        dataset = make_dataset(spec)
        # regenerate the raw draws for the curve file (same seed path)
        rng = np.random.default_rng(args.seed)
        signal = np.cos(grid_t) + np.sin(grid_t)
        raw_obs = signal[None, :] + args.noise_sd * rng.standard_normal(
            (spec.n_units, grid_t.size)
        )

    fio.write_curves_csv(out / "curves.csv", grid_t, raw_obs)
    fio.write_response_csv(out / "response.csv", dataset.data.y)
    fio.write_weights_csv(out / "weights.csv", dataset.data.w)
    fio.write_truth_json(out / "truth.json", dataset)
    print(
        f"simulated n={dataset.data.n} units: rho={fio.fmt(dataset.true_theta.rho)} "
        f"sigma2={fio.fmt(dataset.true_theta.sigma2)}"
    )
    print(f"wrote curves.csv response.csv weights.csv truth.json to {out}")
    return 0


def _load_bundle(data_dir: Path, basis_count: int) -> FslmData:
    t_grid, obs = fio.read_curves_csv(data_dir / "curves.csv")
    y = fio.read_response_csv(data_dir / "response.csv")
    w = fio.read_weights_csv(data_dir / "weights.csv", n=y.size)
    basis = build_bspline_basis(t_grid[0], t_grid[-1], basis_count, 4)
    sample = smooth_curves(t_grid, obs, basis)
    return FslmData(y=y, z=sample.scores, w=w)


def _fit_one(method: str, data: FslmData, args) -> tuple[dict, object]:
    """Returns (report entry, chain or None)."""
    if method == "ml":
        est = fit_ml(data)
        return est.to_json_dict(), None
    prior = PriorSpec.diffuse(data.k)
    config = MhConfig(
        n_iter=args.n_iter,
        burn_in=args.burn_in,
        tuning_c=args.tuning_c,
        kernel=BAYES_METHODS[method],
        adapt=getattr(args, "adapt", True),
        seed=args.seed,
    )
    chain = run_mwg(data, prior, config)
    summary = summarize(chain, config.burn_in, data)
    return summary.to_json_dict(), chain


def cmd_fit(args) -> int:
    data = _load_bundle(args.data, args.basis_count)
    args.out.mkdir(parents=True, exist_ok=True)
    methods = (
        ["normal-kernel", "uniform-kernel", "ml"] if args.method == "all"
        else [args.method]
    )
    report = {}
    for method in methods:
        entry, chain = _fit_one(method, data, args)
        report[method] = entry
        if chain is not None:
            fio.write_chain_csv(args.out / f"trace_{method}.csv", chain)
            if args.svg:
                _write_trace_svg(args.out / f"trace_{method}.svg", chain)
    fio.write_json(args.out / "report.json", report)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _write_trace_svg(path, chain) -> None:
    series = {"sigma2": chain.draws_sigma2, "rho": chain.draws_rho}
    for j in range(chain.draws_beta.shape[1]):
        series[f"beta_{j + 1}"] = chain.draws_beta[:, j]
    width, height, pad = 600, 120, 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{(height + pad) * len(series)}">'
    ]
    for row, (name, vals) in enumerate(series.items()):
        lo, hi = float(vals.min()), float(vals.max())
        span = (hi - lo) or 1.0
        y0 = row * (height + pad)
        xs = np.linspace(0, width, vals.size)
        ys = y0 + height - height * (vals - lo) / span
        points = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="black" stroke-width="0.5" '
            f'points="{points}"/>'
            f'<text x="2" y="{y0 + 12}" font-size="10">{name}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def cmd_table1(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for rho in args.rho_list:
        if not 0 <= rho < 1:
            raise ValueError(f"rho {rho} outside [0, 1)")
    rows_lat, cols_lat = args.grid

    def one_replicate(rho: float, rep: int) -> dict:
        spec = SimulationSpec(
            rho_true=rho,
            lattice_rows=rows_lat,
            lattice_cols=cols_lat,
            n_basis=args.basis_count,
            seed=args.seed + 1000 * rep + int(rho * 1e6),
        )
        dataset = make_dataset(spec)
        out = {}
        for method in ["uniform-kernel", "normal-kernel", "ml"]:
            entry, _ = _fit_one(method, dataset.data, args)
            out[method] = entry
        return out

    tasks = [(rho, rep) for rho in args.rho_list for rep in range(args.replicates)]
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda t: one_replicate(*t), tasks))
    by_key = {}
    for (rho, rep), res in zip(tasks, results):
        by_key.setdefault(rho, []).append(res)

    k = args.basis_count
    header = (
        ["rho_true", "method"]
        + [f"beta_{j + 1}" for j in range(k)]
        + ["sigma2", "rho", "bic"]
    )
    if args.replicates > 1:
        header += (
            [f"sd_beta_{j + 1}" for j in range(k)] + ["sd_sigma2", "sd_rho", "sd_bic"]
        )
    out_path = args.out / "table1.csv"
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for rho in args.rho_list:
            for method in ["uniform-kernel", "normal-kernel", "ml"]:
                entries = [r[method] for r in by_key[rho]]
                stack = np.array(
                    [e["beta_mean"] + [e["sigma2_mean"], e["rho_mean"], e["bic"]]
                     for e in entries]
                )
                row = [fio.fmt(rho), method] + [fio.fmt(v) for v in stack.mean(axis=0)]
                if args.replicates > 1:
                    row += [fio.fmt(v) for v in stack.std(axis=0, ddof=1)]
                writer.writerow(row)
    print(f"wrote {out_path}")
    return 0


def cmd_moran(args) -> int:
    y = fio.read_response_csv(args.response)
    w = fio.read_weights_csv(args.weights, n=y.size)
    result = morans_i(y, w, n_permutations=args.permutations, seed=args.seed)
    print(f"moran_i={fio.fmt(result.statistic)}")
    print(f"expected={fio.fmt(result.expected)}")
    print(f"p_value={fio.fmt(result.p_value)} ({result.n_permutations} permutations)")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "table1": cmd_table1,
    "moran": cmd_moran,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        defaults = json.loads(Path(args.config).read_text())
        for sub in parser._subcommand_parsers.values():
            sub.set_defaults(**defaults)
        args = parser.parse_args(argv)  # flags still win over config values
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
