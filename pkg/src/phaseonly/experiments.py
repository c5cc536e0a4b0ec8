"""Seeded Monte Carlo experiments reproducing the measurement-number thresholds.

Three experiment kinds:

* ``threshold``: Gaussian ensembles and signals per (d, m) cell; fraction of
  recoverable trials and solver round trips.  The recoverable fraction jumps
  from 0 to 1 between m = 2d-2 and m = 2d-1 in the linear model and between
  2d-1 and 2d in the affine model.
* ``symmetric_fourier``: conjugate-symmetric signals under symmetric Fourier
  rows are never recoverable without zero measurements; planting a maximal
  set of zero measurements plus one extra phase makes them recoverable.
* ``ma_equivalence``: for real signals under plain Fourier rows with no zero
  measurement, the aligned-row rank test agrees with the classical
  Toeplitz/Hankel invertibility test on every trial.

Reports are bit-reproducible: per-trial seeds derive from the master seed,
the cell parameters and the trial index, aggregation order is fixed, and the
serialized report carries no wall-clock data unless explicitly requested
(timings are diagnostics, not results).
"""

from __future__ import annotations

import csv
import json
import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .designs import design_fourier, design_fourier_symmetric
from .discriminant import (
    MeasurementEnsemble,
    ma_condition,
    verdict_affine_lift,
    verdict_linear,
    verdict_real_phase,
)
from .linalg import DEFAULT_TOL, Tolerance, numerical_rank, support
from .solver import PhaseObservation, solve_affine, solve_linear

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "resolve_count",
    "run_threshold_experiment",
    "run_symmetric_fourier_experiment",
    "run_ma_equivalence_experiment",
    "run_experiment",
]

EXPERIMENT_KINDS = ("threshold", "symmetric_fourier", "ma_equivalence")

_COUNT_RE = re.compile(r"^\s*(\d*)\s*d\s*(?:([+-])\s*(\d+))?\s*$")


def resolve_count(spec, d: int) -> int:
    """Resolve a measurement count that may be symbolic in d (e.g. "2d-1")."""
    if isinstance(spec, int):
        return spec
    text = str(spec).strip()
    if text.isdigit():
        return int(text)
    match = _COUNT_RE.match(text)
    if not match:
        raise ValueError(f"cannot parse measurement count {spec!r}")
    mult = int(match.group(1)) if match.group(1) else 1
    offset = 0
    if match.group(2):
        offset = int(match.group(3)) * (1 if match.group(2) == "+" else -1)
    return mult * d + offset


@dataclass
class ExperimentConfig:
    """Dataclass mirror of the experiment config JSON.

    ``measurement_counts`` entries may be integers or symbolic strings in d.
    For the symmetric Fourier experiment the symbol refers to the ambient
    signal length 2d - 1.
    """

    name: str
    kind: str = "threshold"
    model: str = "linear"
    dims: list[int] = field(default_factory=lambda: [2, 3])
    measurement_counts: list = field(default_factory=lambda: ["2d-1"])
    trials: int = 100
    seed: int = 0
    relative_rank_tol: float | None = None
    zero_entry_tol: float | None = None
    output: str | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.model not in ("linear", "affine"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.dims:
            raise ValueError("dims must be nonempty")

    @property
    def tolerance(self) -> Tolerance:
        base = DEFAULT_TOL
        return Tolerance(
            relative_rank_tol=(
                base.relative_rank_tol
                if self.relative_rank_tol is None
                else self.relative_rank_tol
            ),
            zero_entry_tol=(
                base.zero_entry_tol
                if self.zero_entry_tol is None
                else self.zero_entry_tol
            ),
        )

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "kind": self.kind,
            "model": self.model,
            "dims": list(self.dims),
            "measurement_counts": list(self.measurement_counts),
            "trials": self.trials,
            "seed": self.seed,
        }
        if self.relative_rank_tol is not None:
            out["relative_rank_tol"] = self.relative_rank_tol
        if self.zero_entry_tol is not None:
            out["zero_entry_tol"] = self.zero_entry_tol
        if self.output is not None:
            out["output"] = self.output
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        allowed = {
            "name",
            "kind",
            "model",
            "dims",
            "measurement_counts",
            "trials",
            "seed",
            "relative_rank_tol",
            "zero_entry_tol",
            "output",
        }
        unknown = set(payload) - allowed
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**payload)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


@dataclass
class ExperimentReport:
    """Per-cell records plus the config echo; serializes deterministically."""

    kind: str
    config: dict
    cells: list[dict]
    timings: dict = field(default_factory=dict)

    def to_json(self, include_timings: bool = False) -> str:
        payload = {
            "kind": self.kind,
            "toolkit_version": __version__,
            "config": self.config,
            "cells": self.cells,
        }
        if include_timings:
            payload["wall_time_seconds"] = self.timings
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write_json(self, path, include_timings: bool = False) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json(include_timings=include_timings))

    def write_csv(self, path) -> None:
        """Fixed-schema CSV, one row per cell (threshold experiments only)."""
        if self.kind != "threshold":
            raise ValueError("CSV output is defined for threshold experiments")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["d", "m", "trials", "recoverable", "roundtrip", "mean_solution_dim", "seconds"]
            )
            for cell in self.cells:
                writer.writerow(
                    [
                        cell["d"],
                        cell["m"],
                        cell["trials"],
                        cell["recoverable"],
                        cell["roundtrip"],
                        cell["mean_solution_dim"],
                        self.timings.get(f"d={cell['d']},m={cell['m']}", ""),
                    ]
                )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        payload = json.loads(text)
        return cls(
            kind=payload["kind"],
            config=payload["config"],
            cells=payload["cells"],
            timings=payload.get("wall_time_seconds", {}),
        )


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("PHASEONLY_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def _run_trials(fn, trials: int, threads: int):
    """Run trial callables; results land in trial order regardless of threads."""
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _trial_rng(*key) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


# ---------------------------------------------------------------------------
# Threshold experiment
# ---------------------------------------------------------------------------


def _threshold_trial_linear(seed, d, m, t, tol):
    rng = _trial_rng(seed, d, m, t)
    A = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v = verdict_linear(A, x, tol)
    roundtrip = False
    if v.recoverable:
        obs = PhaseObservation.from_vector(A @ x, tol)
        rec = solve_linear(A, obs, tol)
        target = x / np.linalg.norm(x)
        roundtrip = bool(np.linalg.norm(rec.signal - target) <= 1e-8)
    return v.recoverable, roundtrip, v.solution_dim


def _threshold_trial_affine(seed, d, m, t, tol):
    rng = _trial_rng(seed, d, m, t)
    A = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
    b = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    ens = MeasurementEnsemble(A, b)
    v = verdict_affine_lift(ens, x, tol)
    roundtrip = False
    if v.recoverable:
        obs = PhaseObservation.from_vector(A @ x + b, tol)
        rec = solve_affine(ens, obs, tol)
        roundtrip = bool(np.max(np.abs(rec.signal - x)) <= 1e-8)
    return v.recoverable, roundtrip, v.solution_dim


def run_threshold_experiment(
    config: ExperimentConfig, threads: int | None = None
) -> ExperimentReport:
    """Recoverable fraction and solver round trip per (d, m) cell."""
    tol = config.tolerance
    nthreads = _thread_count(threads)
    trial_fn = (
        _threshold_trial_linear if config.model == "linear" else _threshold_trial_affine
    )
    cells, timings = [], {}
    for d in config.dims:
        for spec in config.measurement_counts:
            m = resolve_count(spec, d)
            if m < d:
                raise ValueError(f"cell d={d}, m={m}: need at least d rows")
            if config.model == "affine" and m <= d:
                raise ValueError(
                    f"cell d={d}, m={m}: the affine model needs m > d, else the "
                    "offset always lies in the column space"
                )
            start = time.perf_counter()
            results = _run_trials(
                lambda t: trial_fn(config.seed, d, m, t, tol), config.trials, nthreads
            )
            elapsed = time.perf_counter() - start
            rec = sum(1 for r in results if r[0])
            rt = sum(1 for r in results if r[1])
            mean_dim = sum(r[2] for r in results) / config.trials
            cells.append(
                {
                    "d": d,
                    "m": m,
                    "trials": config.trials,
                    "recoverable": rec,
                    "roundtrip": rt,
                    "mean_solution_dim": mean_dim,
                }
            )
            timings[f"d={d},m={m}"] = elapsed
    cells.sort(key=lambda c: (c["d"], c["m"]))
    return ExperimentReport(
        kind="threshold", config=config.to_dict(), cells=cells, timings=timings
    )


# ---------------------------------------------------------------------------
# Symmetric Fourier experiment
# ---------------------------------------------------------------------------


def _distinct_frequencies(rng, count, lo=0.05, hi=math.pi - 0.05, gap=0.03):
    """Sorted random frequencies in (lo, hi) with guaranteed pairwise gap.

    Nearly coincident frequencies make the Fourier systems borderline
    degenerate (nearly duplicated rows), which the rank cutoff rightly
    rejects; the experiments sample away from that boundary.
    """
    span = hi - lo - count * gap
    if span <= 0:
        gap = 0.5 * (hi - lo) / count
        span = hi - lo - count * gap
    u = np.sort(rng.uniform(0.0, 1.0, size=count))
    return lo + gap * np.arange(count) + span * u


def _symmetric_signal(rng, d):
    """Random conjugate-symmetric signal of length 2d - 1."""
    n = 2 * d - 1
    center = d - 1
    x = np.zeros(n, dtype=complex)
    x[center] = rng.standard_normal()
    for k in range(1, d):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        x[center + k] = z
        x[center - k] = np.conj(z)
    return x


def _conj_flip(v):
    return np.conj(v[::-1])


# symmetric-signal instances sample the full circle: frequencies confined to
# a half circle put all Vandermonde nodes on an arc, whose conditioning decays
# exponentially with the signal length; the realness of symmetric
# measurements holds for any frequency
_FULL_CIRCLE = (0.05, 2.0 * math.pi - 0.05)


def _planted_symmetric_instance(rng, d, tol):
    """Symmetric signal with 2d - 2 planted zero rows plus one nonzero row.

    The kernel of 2d - 2 symmetric Fourier rows is one complex dimension and
    closed under conjugate flipping, so a unimodular rotation of a kernel
    vector is conjugate symmetric.  One extra row with a nonzero measurement
    then pins the signal up to positive scale.
    """
    n = 2 * d - 1
    for _ in range(100):
        w = _distinct_frequencies(rng, n, *_FULL_CIRCLE)
        A_zero = design_fourier_symmetric(w[: n - 1], d)
        _, s, vh = np.linalg.svd(A_zero)
        if s[-1] <= 1e-6 * s[0]:
            continue  # kernel direction poorly determined
        v = vh[-1].conj()
        flip = _conj_flip(v)
        ref = int(np.argmax(np.abs(v)))
        c = flip[ref] / v[ref]
        x = np.exp(1j * np.angle(c) / 2) * v
        x = 0.5 * (x + _conj_flip(x))
        extra = design_fourier_symmetric(w[n - 1 :], d)
        A = np.vstack([A_zero, extra])
        meas = A @ x
        scale = np.max(np.abs(meas))
        if abs(meas[-1]) < 1e-3 * scale:
            continue
        if np.max(np.abs(A_zero @ x)) > 1e-10 * scale:
            continue
        return A, x
    raise RuntimeError("failed to construct a planted symmetric instance")


def _symmetric_trial(seed, d, m, t, tol):
    rng = _trial_rng(seed, d, m, t, 101)
    n = 2 * d - 1
    # arm 1: generic symmetric signal, no zero measurements
    for _ in range(100):
        w = _distinct_frequencies(rng, m, *_FULL_CIRCLE)
        A = design_fourier_symmetric(w, d)
        x = _symmetric_signal(rng, d)
        meas = A @ x
        if np.max(np.abs(meas.imag)) > 1e-10 * np.max(np.abs(meas)):
            raise AssertionError("symmetric measurements must be real")
        if support(meas, tol).size == m and np.min(np.abs(meas)) > 1e-6 * np.max(
            np.abs(meas)
        ):
            break
    symmetric_recoverable = verdict_linear(A, x, tol).recoverable

    # arm 2: planted zero measurements per the boundary regime
    A_p, x_p = _planted_symmetric_instance(rng, d, tol)
    planted_recoverable = verdict_linear(A_p, x_p, tol).recoverable

    # arm 3: control, generic (asymmetric) signal with 2(2d-1)-1 rows
    w_c = _distinct_frequencies(rng, 2 * n - 1, *_FULL_CIRCLE)
    A_c = design_fourier_symmetric(w_c, d)
    x_c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    control_recoverable = verdict_linear(A_c, x_c, tol).recoverable
    return symmetric_recoverable, planted_recoverable, control_recoverable


def run_symmetric_fourier_experiment(
    config: ExperimentConfig, threads: int | None = None
) -> ExperimentReport:
    """Impossibility for symmetric signals, possibility in the planted regime.

    ``config.dims`` lists the half-length parameter d (signal length 2d - 1);
    symbolic measurement counts resolve against the ambient length.
    """
    tol = config.tolerance
    nthreads = _thread_count(threads)
    cells, timings = [], {}
    for d in config.dims:
        if d < 2:
            raise ValueError("symmetric experiment needs d >= 2")
        n = 2 * d - 1
        for spec in config.measurement_counts:
            m = resolve_count(spec, n)
            if m < n:
                raise ValueError(
                    f"cell d={d}: need at least {n} rows for a rank-{n} matrix"
                )
            start = time.perf_counter()
            results = _run_trials(
                lambda t: _symmetric_trial(config.seed, d, m, t, tol),
                config.trials,
                nthreads,
            )
            elapsed = time.perf_counter() - start
            cells.append(
                {
                    "d": d,
                    "length": n,
                    "m": m,
                    "trials": config.trials,
                    "symmetric_recoverable": sum(1 for r in results if r[0]),
                    "planted_trials": config.trials,
                    "planted_recoverable": sum(1 for r in results if r[1]),
                    "control_recoverable": sum(1 for r in results if r[2]),
                }
            )
            timings[f"d={d},m={m}"] = elapsed
    cells.sort(key=lambda c: (c["d"], c["m"]))
    return ExperimentReport(
        kind="symmetric_fourier", config=config.to_dict(), cells=cells, timings=timings
    )


# ---------------------------------------------------------------------------
# Equivalence with the classical invertibility test
# ---------------------------------------------------------------------------


def _ma_trial(seed, d, m, t, tol):
    rng = _trial_rng(seed, d, m, t, 202)
    for _ in range(100):
        w = _distinct_frequencies(rng, m)
        A = design_fourier(w, d)
        x = rng.standard_normal(d)
        if abs(x[0]) <= tol.zero_entry_tol * np.max(np.abs(x)):
            continue
        meas = A @ x
        if support(meas, tol).size != m or np.min(np.abs(meas)) < 1e-6 * np.max(
            np.abs(meas)
        ):
            continue
        if numerical_rank(np.vstack([A.real, A.imag]), tol) < d:
            continue
        break
    lhs = ma_condition(x, tol)
    rhs = verdict_real_phase(A, x, tol).recoverable
    return lhs == rhs, lhs


def _singular_test_signal(d):
    """A real signal whose Toeplitz/Hankel difference is singular."""
    x = np.zeros(d)
    x[0] = 1.0
    x[d - 1] = 1.0
    return x


def run_ma_equivalence_experiment(
    config: ExperimentConfig, threads: int | None = None
) -> ExperimentReport:
    """Boolean agreement between the invertibility test and the rank test."""
    tol = config.tolerance
    nthreads = _thread_count(threads)
    cells, timings = [], {}
    for d in config.dims:
        if d < 3:
            raise ValueError("equivalence experiment needs d >= 3")
        for spec in config.measurement_counts:
            m = resolve_count(spec, d)
            if m < d - 1:
                raise ValueError(f"cell d={d}: need at least d-1 = {d - 1} rows")
            start = time.perf_counter()
            results = _run_trials(
                lambda t: _ma_trial(config.seed, d, m, t, tol),
                config.trials,
                nthreads,
            )
            elapsed = time.perf_counter() - start

            # deliberately singular signal: both tests must say no
            rng = _trial_rng(config.seed, d, m, 303)
            xs = _singular_test_signal(d)
            ws = _distinct_frequencies(rng, max(m, d - 1))
            As = design_fourier(ws, d)
            singular_agree = (
                ma_condition(xs, tol) is False
                and verdict_real_phase(As, xs, tol).recoverable is False
            )

            # zero first entry: the invertibility test is undefined, skip it
            skipped = []
            try:
                ma_condition(np.concatenate([[0.0], np.ones(d - 1)]), tol)
            except Exception as exc:  # noqa: BLE001 - recorded, not silenced
                skipped.append(f"d={d}: first entry zero, skipped ({type(exc).__name__})")

            cells.append(
                {
                    "d": d,
                    "m": m,
                    "trials": config.trials,
                    "agreements": sum(1 for r in results if r[0]),
                    "condition_true": sum(1 for r in results if r[1]),
                    "singular_agree": bool(singular_agree),
                    "skipped": skipped,
                }
            )
            timings[f"d={d},m={m}"] = elapsed
    cells.sort(key=lambda c: (c["d"], c["m"]))
    return ExperimentReport(
        kind="ma_equivalence", config=config.to_dict(), cells=cells, timings=timings
    )


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    """Dispatch on the config kind."""
    runner = {
        "threshold": run_threshold_experiment,
        "symmetric_fourier": run_symmetric_fourier_experiment,
        "ma_equivalence": run_ma_equivalence_experiment,
    }[config.kind]
    return runner(config, threads=threads)
