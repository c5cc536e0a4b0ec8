"""Independent verification machinery.

The rank verdicts are never trusted on their own.  This module provides

* constructive non-uniqueness witnesses: when the solution space has extra
  dimensions, an explicit second signal with the same observed phases is
  built and validated purely by phase comparison;
* an exact-rational rank referee with no tolerance at all, for matrices whose
  entries are exactly rational;
* a consistency sweep cross-checking every criterion against every other and
  against the witnesses, over seeded random instances;
* the vanishing-row construction: for any canonical matrix a signal whose
  first phase row degenerates to zero, which forces the row-count lower
  bound of the all-signal regime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .discriminant import (
    MeasurementEnsemble,
    check_canonical,
    lift_discriminant,
    solution_space_dim,
    verdict_affine_lift,
    verdict_affine_phase,
    verdict_canonical,
    verdict_linear,
)
from .errors import RankDeficientMatrix, ZeroSignal
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    as_vector,
    block_lift,
    complex_rank,
    nullspace,
    numerical_rank,
    phase_vector,
    stack_lift,
    support,
)
from .solver import canonicalize_affine, canonicalize_linear

__all__ = [
    "Witness",
    "counterexample_search",
    "counterexample_search_affine",
    "exact_rank",
    "rationalize",
    "consistency_sweep",
    "ConsistencyReport",
    "vanishing_row_signal",
]

WITNESS_PHASE_TOL = 1e-8


@dataclass(frozen=True)
class Witness:
    """A candidate second signal sharing the observed phases.

    ``same_phases`` is checked by direct phase comparison, never by rank, so
    a valid witness certifies non-uniqueness independently of the tolerance
    policy.  ``proportional`` reports whether the candidate is just the
    trivial ambiguity (a positive rescaling in the linear model, equality in
    the affine model); a valid witness has ``same_phases`` and not
    ``proportional``.
    """

    y: np.ndarray
    same_phases: bool
    proportional: bool

    @property
    def valid(self) -> bool:
        return self.same_phases and not self.proportional


def _phases_match(measured, reference, tol) -> bool:
    p_m, s_m = phase_vector(measured, tol)
    p_r, s_r = phase_vector(reference, tol)
    if not np.array_equal(s_m, s_r):
        return False
    return bool(np.max(np.abs(p_m - p_r), initial=0.0) <= WITNESS_PHASE_TOL)


def _orthogonal_kernel_direction(basis, anchor):
    """A unit kernel element orthogonal to ``anchor`` (which lies in the kernel)."""
    coeff = basis.T @ anchor
    unit = coeff / np.linalg.norm(coeff)
    k = basis.shape[1]
    e = np.zeros(k)
    e[int(np.argmin(np.abs(unit)))] = 1.0
    q = e - (unit @ e) * unit
    q /= np.linalg.norm(q)
    return basis @ q


def counterexample_search(A, x, tol: Tolerance = DEFAULT_TOL, max_halvings: int = 200):
    """Search for a signal with the same phases that is not a rescaling of x.

    Returns ``None`` when the solution space is one dimensional.  Otherwise
    walks a small step along a kernel direction independent of the solution
    induced by ``x``, shrinking the step until the magnitude block stays
    strictly positive, reconstructs the second signal and validates it by
    phase comparison alone.
    """
    A, x = as_matrix(A), as_vector(x)
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("witness search requires full column rank")
    if not np.any(x):
        raise ZeroSignal("witness search is undefined for the zero signal")
    w = A @ x
    phases, supp = phase_vector(w, tol)
    s = supp.size
    U = np.zeros((m, s), dtype=complex)
    U[supp, np.arange(s)] = phases[supp]
    M = np.hstack([block_lift(A), -stack_lift(U)])
    basis = nullspace(M, tol)
    if basis.shape[1] <= 1:
        return None
    anchor = np.concatenate([stack_lift(x), np.abs(w[supp])])
    direction = _orthogonal_kernel_direction(basis, anchor)
    lam_x = np.abs(w[supp])
    eps = 0.1 * float(lam_x.min())
    for _ in range(max_halvings):
        cand = anchor + eps * direction
        if cand[2 * d :].min() > 0.0:
            break
        eps *= 0.5
    else:
        cand = anchor  # degenerate direction, fall back to the trivial solution
    y = cand[:d] - 1j * cand[d : 2 * d]
    same = _phases_match(A @ y, w, tol)
    t = np.linalg.norm(y) / np.linalg.norm(x)
    proportional = bool(
        t > 0 and np.linalg.norm(y - t * x) <= 1e-8 * np.linalg.norm(y)
    )
    return Witness(y=y, same_phases=same, proportional=proportional)


def counterexample_search_affine(
    ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL, max_halvings: int = 200
):
    """Affine witness: a different signal with the same phases of A y + b.

    Returns ``None`` when the lifted coefficient matrix has trivial kernel
    (the observation pins the signal).  ``proportional`` means equality here,
    since the affine model has no scaling ambiguity.
    """
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset")
    A, b = ens.matrix, ens.offset
    A, x = as_matrix(A), as_vector(x)
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("witness search requires full column rank")
    w = A @ x + b
    phases, supp = phase_vector(w, tol)
    s = supp.size
    U = np.zeros((m, s), dtype=complex)
    U[supp, np.arange(s)] = phases[supp]
    M = np.hstack([block_lift(A), -stack_lift(U)])
    basis = nullspace(M, tol)
    if basis.shape[1] == 0:
        return None
    anchor = np.concatenate([stack_lift(x), np.abs(w[supp])])
    direction = basis[:, 0]
    if s:
        eps = 0.1 * float(np.abs(w[supp]).min())
        for _ in range(max_halvings):
            cand = anchor + eps * direction
            if cand[2 * d :].min() > 0.0:
                break
            eps *= 0.5
        else:
            cand = anchor
    else:
        cand = anchor + direction
    y = cand[:d] - 1j * cand[d : 2 * d]
    same = _phases_match(A @ y + b, w, tol)
    proportional = bool(np.linalg.norm(y - x) <= 1e-8 * (1.0 + np.linalg.norm(x)))
    return Witness(y=y, same_phases=same, proportional=proportional)


# ---------------------------------------------------------------------------
# Exact rational rank
# ---------------------------------------------------------------------------


def rationalize(M) -> list[list[tuple[Fraction, Fraction]]]:
    """Convert a numeric matrix to exact rational (real, imag) pairs.

    Doubles convert exactly (every IEEE-754 double is rational), so this is
    only meaningful for matrices constructed from exactly representable
    values.
    """
    M = np.atleast_2d(np.asarray(M))
    out = []
    for row in M:
        out.append(
            [(Fraction(float(np.real(z))), Fraction(float(np.imag(z)))) for z in row]
        )
    return out


def _to_pair(entry) -> tuple[Fraction, Fraction]:
    if isinstance(entry, tuple):
        re, im = entry
        return Fraction(re), Fraction(im)
    if isinstance(entry, complex):
        return Fraction(entry.real), Fraction(entry.imag)
    return Fraction(entry), Fraction(0)


def exact_rank(entries) -> int:
    """Rank by fraction-exact Gaussian elimination; no tolerance involved.

    ``entries`` is a matrix given as nested sequences whose elements are
    integers, :class:`~fractions.Fraction` values, or ``(re, im)`` pairs of
    either (exact complex rationals).  Arbitrary-size integer arithmetic
    rules out overflow.
    """
    if isinstance(entries, np.ndarray):
        entries = rationalize(entries)
    rows = [[_to_pair(e) for e in row] for row in entries]
    if not rows:
        return 0
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    rank = 0
    col = 0
    nrows = len(rows)
    while rank < nrows and col < ncols:
        pivot_row = None
        for r in range(rank, nrows):
            if rows[r][col] != (Fraction(0), Fraction(0)):
                pivot_row = r
                break
        if pivot_row is None:
            col += 1
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pre, pim = rows[rank][col]
        denom = pre * pre + pim * pim
        for r in range(rank + 1, nrows):
            ere, eim = rows[r][col]
            if ere == 0 and eim == 0:
                continue
            # (e / p) with exact complex rationals
            fre = (ere * pre + eim * pim) / denom
            fim = (eim * pre - ere * pim) / denom
            rows[r] = [
                (
                    are - (fre * bre - fim * bim),
                    aim - (fre * bim + fim * bre),
                )
                for (are, aim), (bre, bim) in zip(rows[r], rows[rank])
            ]
        rank += 1
        col += 1
    return rank


# ---------------------------------------------------------------------------
# Consistency sweep
# ---------------------------------------------------------------------------


@dataclass
class ConsistencyReport:
    """Outcome of a criterion cross-check sweep."""

    trials: int
    linear_checked: int = 0
    affine_checked: int = 0
    rational_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps(
            {
                "trials": self.trials,
                "linear_checked": self.linear_checked,
                "affine_checked": self.affine_checked,
                "rational_checked": self.rational_checked,
                "failures": self.failures,
                "consistent": self.consistent,
            },
            sort_keys=True,
            indent=2,
        )


GAUSSIAN_INT_CHOICES = np.array(
    [0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, 2, -2j], dtype=complex
)


def _random_rational_instance(rng, d, m):
    for _ in range(50):
        A = rng.choice(GAUSSIAN_INT_CHOICES, size=(m, d))
        if complex_rank(A) == d:
            break
    else:
        raise RuntimeError("failed to draw a full-rank rational matrix")
    while True:
        x = rng.choice(GAUSSIAN_INT_CHOICES[:7], size=d)
        if np.any(x):
            return A, x


def _plant_zero_measurement(rng, A, x):
    """Project x onto the kernel of one row so that row measures exactly zero."""
    j = int(rng.integers(A.shape[0]))
    g = A[j]
    u = g.conj()
    x2 = x - u * (g @ x) / (g @ u)
    return j, x2


def consistency_sweep(
    trials: int,
    dims,
    seed: int,
    tol: Tolerance = DEFAULT_TOL,
    include_affine: bool = True,
) -> ConsistencyReport:
    """Cross-check every uniqueness criterion on seeded random instances.

    Per linear instance the sweep requires four judgements to coincide: the
    lift verdict, the phase verdict after canonicalization, the solution
    space having dimension one, and the absence of a valid non-uniqueness
    witness.  Every third instance plants an exact zero measurement and every
    fourth uses small exact-rational entries, whose lift discriminant rank is
    additionally refereed by exact elimination.  Affine instances check the
    two affine criteria against the affine witness.
    """
    dims = list(dims)
    report = ConsistencyReport(trials=trials)
    for t in range(trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, t))))
        d = dims[t % len(dims)]
        m = int(rng.integers(2 * d - 1, 3 * d + 1))
        rational = t % 4 == 3
        if rational:
            A, x = _random_rational_instance(rng, d, m)
        else:
            A = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
            x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            if t % 3 == 2:
                _, x = _plant_zero_measurement(rng, A, x)
                if not np.any(x):
                    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)

        v_lift = verdict_linear(A, x, tol)
        A_can, _, P = canonicalize_linear(A, tol)
        v_phase = verdict_canonical(A_can, P @ x, tol)
        dim = solution_space_dim(A, x, tol)
        witness = counterexample_search(A, x, tol)
        answers = {
            "lift": v_lift.recoverable,
            "phase": v_phase.recoverable,
            "dim": dim == 1,
            "witness": witness is None or not witness.valid,
        }
        report.linear_checked += 1
        if len(set(answers.values())) != 1:
            report.failures.append(
                {"trial": t, "model": "linear", "seed": [seed, t], "answers": answers}
            )
        if rational:
            D = lift_discriminant(A, x, tol)
            report.rational_checked += 1
            if exact_rank(D) != numerical_rank(D, tol):
                report.failures.append(
                    {
                        "trial": t,
                        "model": "linear-rational",
                        "seed": [seed, t],
                        "answers": {
                            "exact_rank": exact_rank(D),
                            "numerical_rank": numerical_rank(D, tol),
                        },
                    }
                )

        if include_affine:
            m2 = int(rng.integers(2 * d, 3 * d + 1))
            A2 = rng.standard_normal((m2, d)) + 1j * rng.standard_normal((m2, d))
            b2 = rng.standard_normal(m2) + 1j * rng.standard_normal(m2)
            x2 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            ens = MeasurementEnsemble(A2, b2)
            va = verdict_affine_lift(ens, x2, tol)
            can, transform = canonicalize_affine(ens, tol)
            vp = verdict_affine_phase(can, transform.to_canonical(x2), tol)
            wa = counterexample_search_affine(ens, x2, tol)
            answers = {
                "lift": va.recoverable,
                "phase": vp.recoverable,
                "witness": wa is None or not wa.valid,
            }
            report.affine_checked += 1
            if len(set(answers.values())) != 1:
                report.failures.append(
                    {
                        "trial": t,
                        "model": "affine",
                        "seed": [seed, t],
                        "answers": answers,
                    }
                )
    return report


def vanishing_row_signal(
    A, tol: Tolerance = DEFAULT_TOL, seed: int = 0, max_attempts: int = 100
) -> np.ndarray:
    """A signal, free of zero measurements, whose first phase row vanishes.

    For a canonical matrix the signal aligns each coordinate phase against
    the first row below the identity block, with positive magnitudes drawn
    until no measurement vanishes.  The first aligned row of the phase
    discriminant of the result is then identically zero, which is what forces
    at least 2d rows for all-signal recovery.
    """
    A = as_matrix(A)
    check_canonical(A, tol)
    m, d = A.shape
    if m <= d:
        raise ValueError("need at least one row below the identity block")
    row = A[d]
    align = np.exp(-1j * np.angle(row))
    align[row == 0] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_attempts):
        lam = rng.uniform(0.5, 1.5, size=d)
        x = align * lam
        meas = A @ x
        if support(meas, tol).size == m and np.min(np.abs(meas)) > 1e-6 * np.max(
            np.abs(meas)
        ):
            return x
    raise RuntimeError("failed to draw positive magnitudes avoiding zero measurements")
