"""Command-line interface.

Subcommands: ``analyze`` (verdict for a matrix/signal pair), ``solve``
(reconstruction from an observation), ``design`` (materialize a design spec),
``select`` (minimal row subset), ``experiment`` (run a config, write a
report), ``plot`` (recoverability curves as SVG).

Exit codes: 0 on success, 1 on domain errors, 2 on I/O or parse errors.
Domain errors print machine-readable JSON to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .designs import DesignSpec, build_design
from .discriminant import (
    MeasurementEnsemble,
    verdict_affine_lift,
    verdict_linear,
    verdict_real_lift,
)
from .errors import PhaseOnlyError
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .linalg import DEFAULT_TOL, Tolerance, load_matrix, load_vector, save_matrix, save_vector
from .selection import select_rows_affine, select_rows_linear
from .solver import PhaseObservation, solve_affine, solve_linear


def _tolerance(args) -> Tolerance:
    return Tolerance(
        relative_rank_tol=args.rank_tol if args.rank_tol is not None else DEFAULT_TOL.relative_rank_tol,
        zero_entry_tol=args.zero_tol if args.zero_tol is not None else DEFAULT_TOL.zero_entry_tol,
    )


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args) -> int:
    tol = _tolerance(args)
    A = load_matrix(args.matrix)
    x = load_vector(args.signal)
    if args.affine:
        if not args.offset:
            raise ValueError("--affine requires --offset")
        ens = MeasurementEnsemble(A, load_vector(args.offset))
        verdict = verdict_affine_lift(ens, x, tol)
    elif args.real_signal:
        verdict = verdict_real_lift(A, x, tol)
    else:
        verdict = verdict_linear(A, x, tol)
    _emit(verdict.to_dict(), args.out)
    return 0


def _cmd_solve(args) -> int:
    tol = _tolerance(args)
    A = load_matrix(args.matrix)
    obs = PhaseObservation(load_vector(args.observation))
    if args.offset:
        ens = MeasurementEnsemble(A, load_vector(args.offset))
        result = solve_affine(ens, obs, tol)
    else:
        result = solve_linear(A, obs, tol)
    _emit(result.to_dict(), args.out)
    return 0


def _cmd_design(args) -> int:
    with open(args.spec) as fh:
        spec = DesignSpec.from_dict(json.load(fh))
    built = build_design(spec)
    if isinstance(built, MeasurementEnsemble):
        if not args.offset_out:
            raise ValueError(f"design kind {spec.kind} is affine; pass --offset-out")
        save_matrix(built.matrix, args.out)
        save_vector(built.offset, args.offset_out)
    else:
        save_matrix(built, args.out)
    return 0


def _cmd_select(args) -> int:
    tol = _tolerance(args)
    A = load_matrix(args.matrix)
    x = load_vector(args.signal)
    if args.affine:
        if not args.offset:
            raise ValueError("--affine requires --offset")
        ens = MeasurementEnsemble(A, load_vector(args.offset))
        result = select_rows_affine(ens, x, tol)
    else:
        result = select_rows_linear(A, x, tol)
    _emit(result.to_dict(), args.out)
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        config = ExperimentConfig.from_dict(json.load(fh))
    report = run_experiment(config, threads=args.threads)
    out = args.out or config.output
    text = report.to_json(include_timings=args.with_timings)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        if report.kind == "threshold":
            report.write_csv(args.csv)
        else:
            sys.stderr.write("csv output is only defined for threshold experiments\n")
    return 0


def _cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(args.report) as fh:
        report = ExperimentReport.from_json(fh.read())
    if report.kind != "threshold":
        raise ValueError("plot expects a threshold report")
    fig, ax = plt.subplots(figsize=(6, 4))
    dims = sorted({cell["d"] for cell in report.cells})
    for d in dims:
        pts = sorted(
            (c["m"], c["recoverable"] / c["trials"])
            for c in report.cells
            if c["d"] == d
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"d={d}")
    ax.set_xlabel("measurements m")
    ax.set_ylabel("recoverable fraction")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    plt.close(fig)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseonly",
        description="Phase-only signal reconstruction toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--rank-tol", type=float, default=None, help="relative rank cutoff")
        p.add_argument("--zero-tol", type=float, default=None, help="relative zero-entry cutoff")

    p = sub.add_parser("analyze", help="recoverability verdict for a matrix/signal pair")
    p.add_argument("matrix")
    p.add_argument("signal")
    p.add_argument("--affine", action="store_true")
    p.add_argument("--real-signal", action="store_true")
    p.add_argument("--offset", default=None)
    p.add_argument("--out", default=None)
    add_tol(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("solve", help="reconstruct a signal from an observation")
    p.add_argument("matrix")
    p.add_argument("observation")
    p.add_argument("--offset", default=None)
    p.add_argument("--out", default=None)
    add_tol(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("design", help="materialize a design spec into matrix files")
    p.add_argument("spec")
    p.add_argument("--out", required=True)
    p.add_argument("--offset-out", default=None)
    p.set_defaults(fn=_cmd_design)

    p = sub.add_parser("select", help="minimal row subset preserving recoverability")
    p.add_argument("matrix")
    p.add_argument("signal")
    p.add_argument("--affine", action="store_true")
    p.add_argument("--offset", default=None)
    p.add_argument("--out", default=None)
    add_tol(p)
    p.set_defaults(fn=_cmd_select)

    p = sub.add_parser("experiment", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--with-timings", action="store_true")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("plot", help="recoverability-vs-m curves from a report")
    p.add_argument("report")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PhaseOnlyError as exc:
        sys.stderr.write(
            json.dumps({"error": exc.code, "message": str(exc)}) + "\n"
        )
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
