"""Discriminant matrices and rank-based recoverability verdicts.

Two families of tests decide whether a signal is pinned down by the phases of
its measurements:

* lift discriminants, assembled from the real block lifting of the matrix
  next to the lifted measurement diagonal; they apply to any full-column-rank
  matrix (and any offset in the affine model);
* phase discriminants, assembled row by row from phase-aligned measurement
  equations; they need the canonical form (exact identity top block) in the
  complex models but work row-wise for real signals.

Both give exact criteria: the signal is recoverable precisely when the
discriminant reaches a dimension-counting rank.  The verdict helpers package
rank achieved/required, the dimension of the consistent magnitude space, and
diagnostics about fragile zero classifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllMeasurementsZero,
    FirstEntryZero,
    NonRealSignal,
    NotCanonical,
    OffsetInRange,
    RankDeficientLifting,
    RankDeficientMatrix,
    ZeroSignal,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    as_vector,
    complex_rank,
    near_threshold_indices,
    numerical_rank,
    phase_vector,
    support,
)

__all__ = [
    "RecoverabilityVerdict",
    "MeasurementEnsemble",
    "CRITERIA",
    "lift_discriminant",
    "verdict_linear",
    "solution_space_dim",
    "phase_discriminant",
    "phase_blocks",
    "verdict_canonical",
    "lift_discriminant_real",
    "verdict_real_lift",
    "phase_discriminant_real",
    "verdict_real_phase",
    "ma_matrix",
    "ma_full_matrix",
    "ma_condition",
    "lift_discriminant_affine",
    "verdict_affine_lift",
    "phase_discriminant_affine",
    "phase_blocks_affine",
    "verdict_affine_phase",
    "check_canonical",
    "check_offset_outside_range",
]

CANONICAL_ATOL = 1e-14
OFFSET_RANGE_RTOL = 1e-8

CRITERIA = (
    "LinearD",
    "CanonicalE",
    "RealD",
    "RealE",
    "AffineD",
    "AffineE",
    "MaCondition",
)


@dataclass(frozen=True)
class RecoverabilityVerdict:
    """Outcome of one rank test.

    ``recoverable`` holds exactly when ``rank_achieved == rank_required``.
    ``solution_dim`` is the dimension of the space of consistent magnitude
    assignments (for the lift criteria) or of the discriminant kernel (for
    the phase criteria); in the linear model a unique solution means
    ``solution_dim == 1``, in the affine model ``solution_dim == 0``.
    """

    criterion: str
    rank_achieved: int
    rank_required: int
    solution_dim: int
    recoverable: bool
    support_x: int
    support_meas: int
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "rank_achieved": self.rank_achieved,
            "rank_required": self.rank_required,
            "solution_dim": self.solution_dim,
            "recoverable": self.recoverable,
            "support_x": self.support_x,
            "support_meas": self.support_meas,
            "diagnostics": list(self.diagnostics),
        }


@dataclass(frozen=True)
class MeasurementEnsemble:
    """A measurement matrix together with an optional affine offset."""

    matrix: np.ndarray
    offset: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))
        if self.offset is not None:
            off = as_vector(self.offset)
            if off.size != self.matrix.shape[0]:
                raise ValueError(
                    f"offset length {off.size} does not match row count "
                    f"{self.matrix.shape[0]}"
                )
            object.__setattr__(self, "offset", off)

    @property
    def is_affine(self) -> bool:
        return self.offset is not None

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def _near_threshold_diag(meas, tol) -> list[str]:
    idx = near_threshold_indices(meas, tol)
    if idx.size:
        return [
            "measurement magnitudes within 10x of the zero threshold at "
            f"indices {idx.tolist()}"
        ]
    return []


def _check_full_column_rank(A, tol):
    if complex_rank(A, tol) < A.shape[1]:
        raise RankDeficientMatrix(
            f"matrix of shape {A.shape} does not have full column rank"
        )


def check_canonical(A, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise :class:`NotCanonical` unless the top block of ``A`` is exactly I."""
    A = as_matrix(A)
    m, d = A.shape
    if m < d or np.max(np.abs(A[:d, :d] - np.eye(d))) > CANONICAL_ATOL:
        raise NotCanonical("top block must equal the identity exactly")


def check_offset_outside_range(A, b, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise :class:`OffsetInRange` when ``b`` lies in the column space of ``A``.

    Uses the relative least-squares residual ``|b - A A^+ b| / |b|`` with a
    fixed 1e-8 cutoff; generic offsets clear this by many orders.
    """
    A, b = as_matrix(A), as_vector(b)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        raise OffsetInRange("zero offset lies in the column space trivially")
    z, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(b - A @ z) <= OFFSET_RANGE_RTOL * nb:
        raise OffsetInRange("offset lies in the column space of the matrix")


# ---------------------------------------------------------------------------
# Linear model, general matrix (lift criterion)
# ---------------------------------------------------------------------------


def lift_discriminant(A, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The 2m x (2d+m) lift discriminant of ``(A, x)``.

    Block layout ``[[Re A, Im A, dg(Re Ax)], [-Im A, Re A, -dg(Im Ax)]]``;
    its rank decides membership in the recoverable set for the linear model.
    """
    A, x = as_matrix(A), as_vector(x)
    if A.shape[1] != x.size:
        raise ValueError(f"shape mismatch: matrix {A.shape} vs signal {x.size}")
    w = A @ x
    top = np.hstack([A.real, A.imag, np.diag(w.real)])
    bot = np.hstack([-A.imag, A.real, -np.diag(w.imag)])
    return np.vstack([top, bot])


def verdict_linear(A, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Rank test for the linear model: recoverable up to a positive scale?

    Requires full column rank.  The zero signal is trivially recoverable
    (an all-zero observation forces the zero signal); this is reported with a
    diagnostic instead of an error so callers can analyze arbitrary inputs.
    """
    A, x = as_matrix(A), as_vector(x)
    _check_full_column_rank(A, tol)
    d = A.shape[1]
    if not np.any(x):
        return RecoverabilityVerdict(
            criterion="LinearD",
            rank_achieved=2 * d,
            rank_required=2 * d,
            solution_dim=0,
            recoverable=True,
            support_x=0,
            support_meas=0,
            diagnostics=("zero signal: trivially recoverable",),
        )
    w = A @ x
    n_meas = support(w, tol).size
    rank = numerical_rank(lift_discriminant(A, x, tol), tol)
    required = 2 * d + n_meas - 1
    return RecoverabilityVerdict(
        criterion="LinearD",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=2 * d + n_meas - rank,
        recoverable=rank == required,
        support_x=support(x, tol).size,
        support_meas=n_meas,
        diagnostics=tuple(_near_threshold_diag(w, tol)),
    )


def solution_space_dim(A, x, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the space of magnitude vectors consistent with the phases.

    Always at least 1 for a nonzero signal; equals 1 exactly when the signal
    is recoverable.
    """
    x = as_vector(x)
    if not np.any(x):
        raise ZeroSignal("solution space dimension is undefined for the zero signal")
    v = verdict_linear(A, x, tol)
    return v.solution_dim


# ---------------------------------------------------------------------------
# Linear model, canonical matrix (phase criterion)
# ---------------------------------------------------------------------------


def _phases_or_one(x, tol):
    """Entrywise phases with ones at entries classified as zero."""
    p, idx = phase_vector(x, tol)
    out = np.ones(x.size, dtype=complex)
    out[idx] = p[idx]
    return out


def phase_blocks(A, x, tol: Tolerance = DEFAULT_TOL):
    """Row blocks of the canonical phase discriminant with provenance.

    Returns ``(E0, owners, supp_x)`` where ``E0`` stacks one row per nonzero
    measurement beyond the identity block and two rows (sine row then cosine
    row) per zero measurement, ``owners[i]`` is the measurement row index that
    produced row ``i`` of ``E0``, and ``supp_x`` is the support of the signal.
    Restricting ``E0`` to the support columns gives the discriminant proper.
    """
    A, x = as_matrix(A), as_vector(x)
    check_canonical(A, tol)
    m, d = A.shape
    if x.size != d:
        raise ValueError(f"signal length {x.size} does not match {d} columns")
    if not np.any(x):
        raise ZeroSignal("phase discriminant is undefined for the zero signal")
    px = _phases_or_one(x, tol)
    meas = A @ x
    meas_phase, meas_supp = phase_vector(meas, tol)
    nonzero = np.zeros(m, dtype=bool)
    nonzero[meas_supp] = True
    rows, owners = [], []
    for j in range(d, m):
        aligned = A[j] * px
        if nonzero[j]:
            rows.append((np.conj(meas_phase[j]) * aligned).imag)
            owners.append(j)
        else:
            rows.append(aligned.imag)
            rows.append(aligned.real)
            owners.extend([j, j])
    E0 = np.array(rows, dtype=float).reshape(len(rows), d)
    return E0, np.array(owners, dtype=np.int64), support(x, tol)


def phase_discriminant(A, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Canonical phase discriminant: stacked aligned rows, support columns only.

    Annihilates the magnitude vector: ``E @ |x|[supp] == 0``.
    """
    E0, _, supp = phase_blocks(A, x, tol)
    return E0[:, supp]


def verdict_canonical(A, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Rank test for a canonical matrix: recoverable iff rank is |supp(x)| - 1."""
    A, x = as_matrix(A), as_vector(x)
    d = A.shape[1]
    E0, _, supp = phase_blocks(A, x, tol)
    E = E0[:, supp]
    # aligned rows can cancel to exact zeros; floor the rank cutoff at the
    # magnitude of the entries they were assembled from
    scale = float(np.max(np.abs(A[d:]))) if A.shape[0] > d else 0.0
    rank = numerical_rank(E, tol, scale=scale)
    required = supp.size - 1
    meas = A @ x
    return RecoverabilityVerdict(
        criterion="CanonicalE",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=supp.size - rank,
        recoverable=rank == required,
        support_x=supp.size,
        support_meas=support(meas, tol).size,
        diagnostics=tuple(_near_threshold_diag(meas, tol)),
    )


# ---------------------------------------------------------------------------
# Real signals
# ---------------------------------------------------------------------------


def _as_real_signal(x, tol):
    x = as_vector(x)
    scale = np.max(np.abs(x))
    if scale > 0 and np.max(np.abs(x.imag)) > tol.zero_entry_tol * scale:
        raise NonRealSignal("signal has a nonzero imaginary part")
    return x.real.astype(float)


def _check_real_lifting_rank(A, tol):
    if numerical_rank(np.vstack([A.real, A.imag]), tol) < A.shape[1]:
        raise RankDeficientLifting(
            "stacked [Re A; Im A] lifting is column rank deficient"
        )


def lift_discriminant_real(A, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The 2m x (d+m) lift discriminant for a real signal."""
    A = as_matrix(A)
    x = _as_real_signal(x, tol)
    if A.shape[1] != x.size:
        raise ValueError(f"shape mismatch: matrix {A.shape} vs signal {x.size}")
    w = A @ x
    top = np.hstack([A.real, np.diag(w.real)])
    bot = np.hstack([A.imag, np.diag(w.imag)])
    return np.vstack([top, bot])


def verdict_real_lift(A, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Rank test for real signals: recoverable iff rank is d + |supp(Ax)| - 1."""
    A = as_matrix(A)
    xr = _as_real_signal(x, tol)
    _check_real_lifting_rank(A, tol)
    if not np.any(xr):
        raise ZeroSignal("real lift verdict is undefined for the zero signal")
    d = A.shape[1]
    w = A @ xr
    n_meas = support(w, tol).size
    rank = numerical_rank(lift_discriminant_real(A, xr, tol), tol)
    required = d + n_meas - 1
    return RecoverabilityVerdict(
        criterion="RealD",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=d + n_meas - rank,
        recoverable=rank == required,
        support_x=support(xr, tol).size,
        support_meas=n_meas,
        diagnostics=tuple(_near_threshold_diag(w, tol)),
    )


def phase_discriminant_real(A, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Phase-aligned row discriminant for real signals, one block per row of A.

    One aligned row per nonzero measurement, a (sine, cosine) pair per zero
    measurement.  Annihilates the signal: ``E @ x == 0``.
    """
    A = as_matrix(A)
    xr = _as_real_signal(x, tol)
    if A.shape[1] != xr.size:
        raise ValueError(f"shape mismatch: matrix {A.shape} vs signal {xr.size}")
    if not np.any(xr):
        raise ZeroSignal("phase discriminant is undefined for the zero signal")
    meas = A @ xr
    meas_phase, meas_supp = phase_vector(meas, tol)
    nonzero = np.zeros(A.shape[0], dtype=bool)
    nonzero[meas_supp] = True
    rows = []
    for j in range(A.shape[0]):
        if nonzero[j]:
            rows.append((np.conj(meas_phase[j]) * A[j]).imag)
        else:
            rows.append(A[j].imag)
            rows.append(A[j].real)
    return np.array(rows, dtype=float)


def verdict_real_phase(A, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Rank test for real signals via aligned rows: recoverable iff rank d - 1.

    At least one measurement must be nonzero.
    """
    A = as_matrix(A)
    xr = _as_real_signal(x, tol)
    if not np.any(xr):
        raise ZeroSignal("real phase verdict is undefined for the zero signal")
    meas = A @ xr
    meas_supp = support(meas, tol)
    if meas_supp.size == 0:
        # only possible when the lifting is rank deficient, but it is the
        # sharper diagnosis for this criterion
        raise AllMeasurementsZero("every measurement of the signal vanished")
    _check_real_lifting_rank(A, tol)
    d = A.shape[1]
    scale = float(np.max(np.abs(A)))
    rank = numerical_rank(phase_discriminant_real(A, xr, tol), tol, scale=scale)
    required = d - 1
    return RecoverabilityVerdict(
        criterion="RealE",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=d - rank,
        recoverable=rank == required,
        support_x=support(xr, tol).size,
        support_meas=meas_supp.size,
        diagnostics=tuple(_near_threshold_diag(meas, tol)),
    )


# ---------------------------------------------------------------------------
# Toeplitz/Hankel invertibility test for real signals under Fourier rows
# ---------------------------------------------------------------------------


def ma_matrix(x) -> np.ndarray:
    """The (d-1) x (d-1) difference of a lower-triangular Toeplitz and a Hankel.

    Entry ``(i, j)`` is ``x[i-j] - x[i+j+1]`` (0-based, out-of-range terms
    zero).  Invertibility of this matrix is Ma's classical uniqueness test.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    if d < 2:
        raise ValueError("signal dimension must be at least 2")
    B = np.zeros((d - 1, d - 1))
    for i in range(d - 1):
        for j in range(d - 1):
            toe = x[i - j] if i >= j else 0.0
            han = x[i + j + 2] if i + j + 2 < d else 0.0
            B[i, j] = toe - han
    return B


def ma_full_matrix(x) -> np.ndarray:
    """The (d-1) x d variant whose kernel contains the signal.

    Entry ``(u, k)`` is ``x[k-u] - x[k+u]`` in 1-based index arithmetic with
    out-of-range terms zero; satisfies ``ma_full_matrix(x) @ x == 0``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    if d < 2:
        raise ValueError("signal dimension must be at least 2")
    padded = np.zeros(2 * d + 2)
    padded[1 : d + 1] = x  # padded[k] = x_k in 1-based indexing
    Bf = np.zeros((d - 1, d))
    for u in range(1, d):
        for k in range(1, d + 1):
            lo = padded[k - u] if k - u >= 1 else 0.0
            Bf[u - 1, k - 1] = lo - padded[k + u]
    return Bf


def ma_condition(x, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Ma's uniqueness test: is the Toeplitz/Hankel difference invertible?

    Only defined for real signals with a nonzero first entry.
    """
    xr = _as_real_signal(x, tol)
    scale = np.max(np.abs(xr))
    if scale == 0.0 or abs(xr[0]) <= tol.zero_entry_tol * scale:
        raise FirstEntryZero("the test requires a nonzero first entry")
    B = ma_matrix(xr)
    return numerical_rank(B, tol) == xr.size - 1


# ---------------------------------------------------------------------------
# Affine model
# ---------------------------------------------------------------------------


def _split_ensemble(ens) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(ens, MeasurementEnsemble):
        raise TypeError("expected a MeasurementEnsemble")
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset; use the linear criteria")
    return ens.matrix, ens.offset


def lift_discriminant_affine(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The 2m x (2d+m) lift discriminant of the affine model."""
    A, b = _split_ensemble(ens)
    x = as_vector(x)
    if A.shape[1] != x.size:
        raise ValueError(f"shape mismatch: matrix {A.shape} vs signal {x.size}")
    w = A @ x + b
    top = np.hstack([A.real, A.imag, np.diag(w.real)])
    bot = np.hstack([-A.imag, A.real, -np.diag(w.imag)])
    return np.vstack([top, bot])


def verdict_affine_lift(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Affine rank test: exactly recoverable iff rank is 2d + |supp(Ax+b)|.

    Requires full column rank and an offset outside the column space (else the
    problem degenerates to a single recoverable point).
    """
    A, b = _split_ensemble(ens)
    x = as_vector(x)
    _check_full_column_rank(A, tol)
    check_offset_outside_range(A, b, tol)
    d = A.shape[1]
    w = A @ x + b
    n_meas = support(w, tol).size
    rank = numerical_rank(lift_discriminant_affine(ens, x, tol), tol)
    required = 2 * d + n_meas
    return RecoverabilityVerdict(
        criterion="AffineD",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=2 * d + n_meas - rank,
        recoverable=rank == required,
        support_x=support(x, tol).size,
        support_meas=n_meas,
        diagnostics=tuple(_near_threshold_diag(w, tol)),
    )


def check_canonical_affine(ens: MeasurementEnsemble, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise unless the ensemble is ``[[I, 0], [A1, b1]]`` exactly."""
    A, b = _split_ensemble(ens)
    check_canonical(A, tol)
    d = A.shape[1]
    if np.max(np.abs(b[:d])) > CANONICAL_ATOL:
        raise NotCanonical("top offset entries must be exactly zero")


def phase_blocks_affine(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL):
    """Aligned row blocks plus the offset column for a canonical affine ensemble.

    Returns ``(E0, offset_rows, owners, supp_x)``: ``E0`` holds the signal
    columns, ``offset_rows`` the aligned offset contribution, and the
    restricted system satisfies ``E0[:, supp] @ |x|[supp] + offset_rows == 0``.
    """
    A, b = _split_ensemble(ens)
    check_canonical_affine(ens, tol)
    x = as_vector(x)
    m, d = A.shape
    if x.size != d:
        raise ValueError(f"signal length {x.size} does not match {d} columns")
    px = _phases_or_one(x, tol)
    meas = A @ x + b
    meas_phase, meas_supp = phase_vector(meas, tol)
    nonzero = np.zeros(m, dtype=bool)
    nonzero[meas_supp] = True
    rows, offs, owners = [], [], []
    for j in range(d, m):
        aligned = A[j] * px
        if nonzero[j]:
            u = np.conj(meas_phase[j])
            rows.append((u * aligned).imag)
            offs.append((u * b[j]).imag)
            owners.append(j)
        else:
            rows.append(aligned.imag)
            offs.append(b[j].imag)
            rows.append(aligned.real)
            offs.append(b[j].real)
            owners.extend([j, j])
    E0 = np.array(rows, dtype=float).reshape(len(rows), d)
    return E0, np.array(offs, dtype=float), np.array(owners, dtype=np.int64), support(x, tol)


def phase_discriminant_affine(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Canonical affine phase discriminant (signal columns on the support)."""
    E0, _, _, supp = phase_blocks_affine(ens, x, tol)
    return E0[:, supp]


def verdict_affine_phase(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL) -> RecoverabilityVerdict:
    """Affine phase test: exactly recoverable iff rank equals |supp(x)|.

    The offset removes the scaling ambiguity, so the required rank is the full
    support size with no reduction by one.
    """
    A, b = _split_ensemble(ens)
    x = as_vector(x)
    d = A.shape[1]
    E0, _, _, supp = phase_blocks_affine(ens, x, tol)
    E = E0[:, supp]
    if A.shape[0] > d:
        scale = float(max(np.max(np.abs(A[d:])), np.max(np.abs(b[d:]))))
    else:
        scale = 0.0
    rank = numerical_rank(E, tol, scale=scale)
    required = supp.size
    meas = A @ x + b
    return RecoverabilityVerdict(
        criterion="AffineE",
        rank_achieved=rank,
        rank_required=required,
        solution_dim=supp.size - rank,
        recoverable=rank == required,
        support_x=supp.size,
        support_meas=support(meas, tol).size,
        diagnostics=tuple(_near_threshold_diag(meas, tol)),
    )
