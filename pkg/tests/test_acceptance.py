"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  Every tolerance and trial count is pinned here; nothing is
calibrated at runtime.
"""

import itertools
import time

import numpy as np
from phaseonly import (
    ExperimentConfig,
    MeasurementEnsemble,
    PhaseObservation,
    block_lift,
    consistency_sweep,
    design_affine_3d,
    design_pairwise,
    exact_rank,
    lift_discriminant,
    lift_discriminant_affine,
    ma_matrix,
    numerical_rank,
    random_gaussian,
    run_symmetric_fourier_experiment,
    run_threshold_experiment,
    select_rows_affine,
    select_rows_linear,
    solve_affine,
    solve_linear,
    stack_lift,
    vanishing_row_signal,
    verdict_affine_lift,
    verdict_linear,
)
from phaseonly.discriminant import phase_blocks
from phaseonly.experiments import run_ma_equivalence_experiment


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_complex(r, shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


def report(num, ok, detail):
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    assert ok, line


def test_criterion_01_lift_algebra():
    start = time.perf_counter()
    r = rng(1001)
    worst = 0.0
    for _ in range(200):
        m, k, n = (int(r.integers(1, 9)) for _ in range(3))
        A = random_complex(r, (m, k))
        B = random_complex(r, (k, n))
        worst = max(
            worst,
            float(np.max(np.abs(block_lift(A @ B) - block_lift(A) @ block_lift(B)))),
            float(np.max(np.abs(stack_lift(A @ B) - block_lift(A) @ stack_lift(B)))),
        )
        lifted = numerical_rank(block_lift(A))
        direct = np.linalg.matrix_rank(A)
        assert lifted == 2 * direct
    elapsed = time.perf_counter() - start
    report(
        1,
        worst <= 1e-12 and elapsed < 5.0,
        f"lift algebra over 200 matrices, max deviation {worst:.2e} "
        f"({elapsed:.2f}s < 5s)",
    )


def test_criterion_02_criterion_equivalence():
    start = time.perf_counter()
    rep = consistency_sweep(500, [2, 3, 4, 5], seed=2002)
    elapsed = time.perf_counter() - start
    report(
        2,
        rep.consistent and elapsed < 60.0,
        f"equivalence sweep: {len(rep.failures)} inconsistencies in 500 trials "
        f"({elapsed:.1f}s < 60s)",
    )


def test_criterion_03_linear_threshold():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        name="acceptance-linear",
        kind="threshold",
        model="linear",
        dims=[2, 3, 4, 5],
        measurement_counts=["2d-2", "2d-1"],
        trials=200,
        seed=3003,
    )
    rep = run_threshold_experiment(cfg)
    by_key = {(c["d"], c["m"]): c for c in rep.cells}
    ok = True
    for d in cfg.dims:
        low, high = by_key[(d, 2 * d - 2)], by_key[(d, 2 * d - 1)]
        ok &= low["recoverable"] == 0
        ok &= high["recoverable"] == 200 and high["roundtrip"] == 200
    elapsed = time.perf_counter() - start
    report(
        3,
        ok and elapsed < 120.0,
        f"linear threshold 0.00 at 2d-2 / 1.00 at 2d-1 with certified round "
        f"trips, 200 trials per cell ({elapsed:.1f}s < 120s)",
    )


def test_criterion_04_affine_threshold():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        name="acceptance-affine",
        kind="threshold",
        model="affine",
        dims=[2, 3, 4, 5],
        measurement_counts=["2d-1", "2d"],
        trials=200,
        seed=4004,
    )
    rep = run_threshold_experiment(cfg)
    by_key = {(c["d"], c["m"]): c for c in rep.cells}
    ok = True
    for d in cfg.dims:
        low, high = by_key[(d, 2 * d - 1)], by_key[(d, 2 * d)]
        ok &= low["recoverable"] == 0
        ok &= high["recoverable"] == 200 and high["roundtrip"] == 200
    elapsed = time.perf_counter() - start
    report(
        4,
        ok and elapsed < 120.0,
        f"affine threshold 0.00 at 2d-1 / 1.00 at 2d with exact round trips, "
        f"200 trials per cell ({elapsed:.1f}s < 120s)",
    )


GRID = [0.0, 1.0, -1.0, 1j, -1j, 1.0 + 1j]


def test_criterion_05_all_signal_designs():
    start = time.perf_counter()
    failures = 0
    total = 0
    for d in (1, 2, 3):
        A = design_pairwise(d)
        ens = design_affine_3d(d)
        for combo in itertools.product(GRID, repeat=d):
            x = np.array(combo, dtype=complex)
            total += 1
            res = solve_linear(A, PhaseObservation.from_vector(A @ x))
            if np.any(x):
                target = x / np.linalg.norm(x)
                if np.linalg.norm(res.signal - target) > 1e-8:
                    failures += 1
            elif np.any(res.signal):
                failures += 1
            obs = PhaseObservation.from_vector(ens.matrix @ x + ens.offset)
            if np.max(np.abs(solve_affine(ens, obs).signal - x)) > 1e-8:
                failures += 1
    elapsed = time.perf_counter() - start
    report(
        5,
        failures == 0,
        f"all-signal designs: {total} grid signals per model, {failures} "
        f"failures ({elapsed:.1f}s)",
    )


def test_criterion_06_ma_equivalence():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        name="acceptance-ma",
        kind="ma_equivalence",
        dims=[3, 4, 5, 6, 7, 8],
        measurement_counts=["d-1"],
        trials=167,  # 6 dims x 167 = 1002 trials
        seed=6006,
    )
    rep = run_ma_equivalence_experiment(cfg)
    trials = sum(c["trials"] for c in rep.cells)
    agreements = sum(c["agreements"] for c in rep.cells)
    singular_ok = all(c["singular_agree"] for c in rep.cells)
    elapsed = time.perf_counter() - start
    report(
        6,
        trials >= 1000 and agreements == trials and singular_ok and elapsed < 30.0,
        f"invertibility test vs rank test: {agreements}/{trials} agreements "
        f"({elapsed:.1f}s < 30s)",
    )


def test_criterion_07_symmetric_fourier():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        name="acceptance-symmetric",
        kind="symmetric_fourier",
        dims=[2, 3, 4],
        measurement_counts=["2d-1"],
        trials=67,  # 3 dims x 67 = 201 instances per arm
        seed=7007,
    )
    rep = run_symmetric_fourier_experiment(cfg)
    sym = sum(c["symmetric_recoverable"] for c in rep.cells)
    planted = sum(c["planted_recoverable"] for c in rep.cells)
    planted_total = sum(c["planted_trials"] for c in rep.cells)
    instances = sum(c["trials"] for c in rep.cells)
    elapsed = time.perf_counter() - start
    report(
        7,
        instances >= 200 and sym == 0 and planted == planted_total,
        f"symmetric impossibility {sym}/{instances} recoverable; planted "
        f"regime {planted}/{planted_total} recoverable ({elapsed:.1f}s)",
    )


def test_criterion_08_selection_soundness_and_tightness():
    start = time.perf_counter()
    r = rng(8008)
    sound = 0
    checked = 0
    while checked < 150:
        d = int(r.integers(2, 5))
        m = int(r.integers(2 * d - 1, 4 * d + 1))
        A = random_gaussian(m, d, seed=int(r.integers(2**32)))
        x = random_complex(r, d)
        if not verdict_linear(A, x).recoverable:
            continue
        checked += 1
        sound += select_rows_linear(A, x).verified
    while checked < 300:
        d = int(r.integers(2, 5))
        m = int(r.integers(2 * d, 4 * d + 1))
        ens = random_gaussian(m, d, seed=int(r.integers(2**32)), affine=True)
        x = random_complex(r, d)
        if not verdict_affine_lift(ens, x).recoverable:
            continue
        checked += 1
        sound += select_rows_affine(ens, x).verified

    tight_violations = 0
    for d in (2, 3):
        for _ in range(25):
            A = random_gaussian(2 * d - 1, d, seed=int(r.integers(2**32)))
            x = random_complex(r, d)
            if not verdict_linear(A, x).recoverable:
                continue
            for S in itertools.combinations(range(2 * d - 1), 2 * d - 2):
                tight_violations += verdict_linear(A[list(S)], x).recoverable
    elapsed = time.perf_counter() - start
    report(
        8,
        sound == 300 and tight_violations == 0,
        f"selection: {sound}/300 re-verified; {tight_violations} recoverable "
        f"(2d-2)-subsets in exhaustive enumeration ({elapsed:.1f}s)",
    )


def test_criterion_09_vanishing_row_witness():
    start = time.perf_counter()
    r = rng(9009)
    worst = 0.0
    count = 0
    for d in (2, 3, 4):
        for _ in range(34):  # 3 x 34 > 100 canonical matrices
            if count >= 100 and d == 4:
                break
            A = np.vstack([np.eye(d), random_complex(r, (d - 1, d))])
            x0 = vanishing_row_signal(A, seed=int(r.integers(2**32)))
            E0, _, supp = phase_blocks(A, x0)
            assert supp.size == d
            worst = max(worst, float(np.max(np.abs(E0[0]))))
            count += 1
    elapsed = time.perf_counter() - start
    report(
        9,
        count >= 100 and worst <= 1e-10,
        f"vanishing first phase row on {count} canonical matrices, max entry "
        f"{worst:.2e} <= 1e-10 ({elapsed:.1f}s)",
    )


def test_criterion_10_exact_rank_referee():
    start = time.perf_counter()
    r = rng(1010)
    choices = np.array([0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j], dtype=complex)
    disagreements = 0
    checked = 0
    # lift discriminants of exactly rational ensembles, linear and affine
    for _ in range(60):
        d = int(r.integers(2, 5))
        m = int(r.integers(d, 3 * d + 1))
        A = r.choice(choices, size=(m, d))
        x = r.choice(choices, size=d)
        if not np.any(x):
            continue
        D = lift_discriminant(A, x)
        disagreements += exact_rank(D) != numerical_rank(D)
        checked += 1
        b = r.choice(choices, size=m)
        Dab = lift_discriminant_affine(MeasurementEnsemble(A, b), x)
        disagreements += exact_rank(Dab) != numerical_rank(Dab)
        checked += 1
    # invertibility test matrices of integer signals
    for _ in range(40):
        d = int(r.integers(2, 8))
        x = r.integers(-3, 4, size=d).astype(float)
        B = ma_matrix(x)
        disagreements += exact_rank(B) != numerical_rank(B)
        checked += 1
    elapsed = time.perf_counter() - start
    report(
        10,
        checked >= 100 and disagreements == 0,
        f"exact-rational referee: {disagreements} disagreements on {checked} "
        f"rational discriminants ({elapsed:.1f}s)",
    )


def test_criterion_11_determinism(monkeypatch):
    start = time.perf_counter()
    cfg = ExperimentConfig(
        name="acceptance-determinism",
        kind="threshold",
        model="linear",
        dims=[2, 3],
        measurement_counts=["2d-2", "2d-1"],
        trials=40,
        seed=1111,
    )
    monkeypatch.setenv("PHASEONLY_THREADS", "1")
    first = run_threshold_experiment(cfg).to_json().encode()
    monkeypatch.setenv("PHASEONLY_THREADS", "4")
    second = run_threshold_experiment(cfg).to_json().encode()
    third = run_threshold_experiment(cfg, threads=2).to_json().encode()
    elapsed = time.perf_counter() - start
    report(
        11,
        first == second == third,
        f"byte-identical reports across thread caps 1/4/2 ({elapsed:.1f}s)",
    )
