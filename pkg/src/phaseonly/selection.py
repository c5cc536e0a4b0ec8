"""Minimal row selection preserving recoverability of a given signal.

Whenever a signal is recoverable from m measurements, 2d - 1 of them suffice
in the linear model and 2d in the affine model.  Selection works in canonical
coordinates: a pivoted QR on the rows of the phase discriminant picks a
full-rank row subset, the owning measurements are kept together with the
identity block, and the set is padded with the lowest-index unused rows.
The returned subset is re-verified against the original matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .discriminant import (
    MeasurementEnsemble,
    phase_blocks,
    phase_blocks_affine,
    verdict_affine_lift,
    verdict_linear,
)
from .errors import NotRecoverable, TooFewRows
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_vector, numerical_rank
from .solver import canonicalize_affine, canonicalize_linear

__all__ = ["SelectionResult", "select_rows_linear", "select_rows_affine"]


@dataclass(frozen=True)
class SelectionResult:
    """Selected row indices (original numbering) and their re-verification."""

    selected: tuple[int, ...]
    verified: bool

    def to_dict(self) -> dict:
        return {"selected": list(self.selected), "verified": self.verified}


def _pivot_row_subset(E, size, tol) -> np.ndarray:
    """Indices of ``size`` rows of ``E`` spanning its row space (greedy QR)."""
    if size == 0:
        return np.array([], dtype=np.int64)
    _, _, piv = scipy.linalg.qr(E.T, mode="economic", pivoting=True)
    return np.asarray(piv[:size], dtype=np.int64)


def _pad_to(indices: set[int], target: int, m: int) -> list[int]:
    chosen = sorted(indices)
    for j in range(m):
        if len(chosen) >= target:
            break
        if j not in indices:
            chosen.append(j)
    return sorted(chosen)


def select_rows_linear(A, x, tol: Tolerance = DEFAULT_TOL) -> SelectionResult:
    """Pick 2d - 1 rows of ``A`` that still make ``x`` recoverable.

    The signal must be recoverable from the full matrix.  Indices refer to
    the original row numbering; ``verified`` reports the verdict on the
    selected submatrix.
    """
    A, x = as_matrix(A), as_vector(x)
    m, d = A.shape
    target = 2 * d - 1
    if m < target:
        raise TooFewRows(f"need at least {target} rows, matrix has {m}")
    head = verdict_linear(A, x, tol)
    if not head.recoverable:
        raise NotRecoverable("signal is not recoverable from the full matrix")

    A_can, row_perm, P = canonicalize_linear(A, tol)
    if not np.any(x):
        # the zero signal only needs any full-column-rank subset
        mandatory = {int(row_perm[c]) for c in range(d)}
    else:
        x_can = P @ x
        E0, owners, supp = phase_blocks(A_can, x_can, tol)
        E = E0[:, supp]
        scale = float(np.max(np.abs(A_can[d:]))) if m > d else 0.0
        rank = numerical_rank(E, tol, scale=scale)
        subset = _pivot_row_subset(E, rank, tol)
        keep = {int(owners[r]) for r in subset}
        mandatory = {int(row_perm[c]) for c in set(range(d)) | keep}
    selected = _pad_to(mandatory, target, m)
    sub = verdict_linear(A[selected], x, tol)
    return SelectionResult(selected=tuple(selected), verified=bool(sub.recoverable))


def select_rows_affine(ens: MeasurementEnsemble, x, tol: Tolerance = DEFAULT_TOL) -> SelectionResult:
    """Pick 2d rows of an affine ensemble that still pin ``x`` exactly."""
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset; use select_rows_linear")
    A, b = ens.matrix, ens.offset
    x = as_vector(x)
    m, d = A.shape
    target = 2 * d
    if m < target:
        raise TooFewRows(f"need at least {target} rows, ensemble has {m}")
    head = verdict_affine_lift(ens, x, tol)
    if not head.recoverable:
        raise NotRecoverable("signal is not recoverable from the full ensemble")

    can, transform = canonicalize_affine(ens, tol)
    x_can = transform.to_canonical(x)
    E0, _, owners, supp = phase_blocks_affine(can, x_can, tol)
    E = E0[:, supp]
    if m > d:
        scale = float(
            max(np.max(np.abs(can.matrix[d:])), np.max(np.abs(can.offset[d:])))
        )
    else:
        scale = 0.0
    rank = numerical_rank(E, tol, scale=scale)
    subset = _pivot_row_subset(E, rank, tol)
    keep = {int(owners[r]) for r in subset}
    mandatory = {int(transform.row_perm[c]) for c in set(range(d)) | keep}
    selected = _pad_to(mandatory, target, m)
    sub_ens = MeasurementEnsemble(A[selected], b[selected])
    sub = verdict_affine_lift(sub_ens, x, tol)
    return SelectionResult(selected=tuple(selected), verified=bool(sub.recoverable))
