#!/usr/bin/env python3
"""Reproduce the minimal-measurement-number thresholds for both models.

Writes one JSON report, one CSV and one SVG curve plot per model under
``results/``.  The recoverable fraction jumps from 0 to 1 at m = 2d - 1
(linear) and m = 2d (affine).
"""

import argparse
from pathlib import Path

from phaseonly import ExperimentConfig, run_threshold_experiment
from phaseonly.cli import main as cli_main


def run(model: str, dims, trials: int, seed: int, outdir: Path) -> Path:
    counts = (
        ["2d-2", "2d-1", "2d", "2d+1"]
        if model == "linear"
        else ["2d-1", "2d", "2d+1", "2d+2"]
    )
    config = ExperimentConfig(
        name=f"threshold-{model}",
        kind="threshold",
        model=model,
        dims=list(dims),
        measurement_counts=counts,
        trials=trials,
        seed=seed,
    )
    report = run_threshold_experiment(config)
    json_path = outdir / f"threshold_{model}.json"
    report.write_json(json_path)
    report.write_csv(outdir / f"threshold_{model}.csv")
    cli_main(["plot", str(json_path), "--out", str(outdir / f"threshold_{model}.svg")])
    for cell in report.cells:
        frac = cell["recoverable"] / cell["trials"]
        print(
            f"{model:6s} d={cell['d']} m={cell['m']:2d}  recoverable {frac:5.2f}  "
            f"roundtrip {cell['roundtrip']}/{cell['trials']}  "
            f"mean dim {cell['mean_solution_dim']:.2f}"
        )
    return json_path


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    run("linear", args.dims, args.trials, args.seed, args.outdir)
    run("affine", args.dims, args.trials, args.seed + 1, args.outdir)
