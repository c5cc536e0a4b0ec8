"""Complex-to-real liftings, tolerance-based rank and nullspace, phase primitives.

Everything downstream builds on this module.  Matrices are dense numpy
arrays (``complex128`` for measurement operators, ``float64`` for their real
liftings); index sets are 0-based sorted ``int64`` arrays.  All rank
decisions in the package go through :func:`numerical_rank` so the tolerance
policy lives in exactly one place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "as_vector",
    "phase",
    "phase_vector",
    "support",
    "near_threshold_indices",
    "block_lift",
    "stack_lift",
    "numerical_rank",
    "nullspace",
    "complex_rank",
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy: rank cutoff and zero-measurement classification.

    relative_rank_tol
        A singular value counts toward the rank when it exceeds
        ``relative_rank_tol * max(rows, cols) * sigma_max``.
    zero_entry_tol
        An entry of a measured vector is classified as an exact zero when its
        modulus is at most ``zero_entry_tol * max(|v|)``.  The threshold is
        relative so constructed zeros stay stable under rescaling.
    """

    relative_rank_tol: float = 1e-10
    zero_entry_tol: float = 1e-12

    def __post_init__(self):
        if self.relative_rank_tol < 0 or self.zero_entry_tol < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(v) -> np.ndarray:
    """Validate and return ``v`` as a finite 1-d complex array."""
    w = np.asarray(v, dtype=complex).reshape(-1)
    if w.size < 1:
        raise ValueError("expected a nonempty vector")
    if not np.all(np.isfinite(w.real)) or not np.all(np.isfinite(w.imag)):
        raise ValueError("vector entries must be finite")
    return w


def phase(z: complex, scale: float = 1.0, tol: Tolerance = DEFAULT_TOL) -> complex:
    """Unit-modulus phase of ``z``, with the convention that zero maps to zero.

    ``scale`` sets the magnitude against which ``z`` is compared; entries with
    ``|z| <= zero_entry_tol * scale`` are classified as exact zeros.
    """
    z = complex(z)
    if abs(z) <= tol.zero_entry_tol * scale:
        return 0j
    return z / abs(z)


def phase_vector(v, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise phases of ``v`` together with the support of the result.

    Returns ``(phases, support)`` where ``phases[j]`` is 0 for entries below
    the relative zero threshold and ``v[j]/|v[j]|`` otherwise, and ``support``
    is the sorted index array of the nonzero phases.
    """
    v = as_vector(v)
    mags = np.abs(v)
    scale = mags.max()
    out = np.zeros(v.shape, dtype=complex)
    if scale == 0.0:
        return out, np.array([], dtype=np.int64)
    idx = np.flatnonzero(mags > tol.zero_entry_tol * scale).astype(np.int64)
    out[idx] = v[idx] / mags[idx]
    return out, idx


def support(v, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Sorted indices of the entries of ``v`` above the relative zero threshold."""
    return phase_vector(v, tol)[1]


def near_threshold_indices(v, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Indices whose modulus falls within a factor 10 of the zero cutoff.

    These are the entries whose zero/nonzero classification is fragile; rank
    verdicts report them in their diagnostics.
    """
    v = as_vector(v)
    mags = np.abs(v)
    scale = mags.max()
    if scale == 0.0:
        return np.array([], dtype=np.int64)
    thr = tol.zero_entry_tol * scale
    return np.flatnonzero((mags > 0.1 * thr) & (mags < 10.0 * thr)).astype(np.int64)


def block_lift(A) -> np.ndarray:
    """Real block lifting ``[[Re A, Im A], [-Im A, Re A]]`` of a complex matrix.

    Multiplicative: ``block_lift(A @ B) = block_lift(A) @ block_lift(B)``, and
    its rank is exactly twice the complex rank of ``A``.
    """
    A = as_matrix(A)
    return np.block([[A.real, A.imag], [-A.imag, A.real]])


def stack_lift(A) -> np.ndarray:
    """Stacked real lifting ``[Re A; -Im A]``.

    For a vector ``y`` this is the real coordinate vector ``[Re y; -Im y]``
    satisfying ``block_lift(A) @ stack_lift(y) = stack_lift(A @ y)``.
    One-dimensional input yields a one-dimensional output.
    """
    arr = np.asarray(A, dtype=complex)
    if arr.ndim == 1:
        return np.concatenate([arr.real, -arr.imag])
    arr = as_matrix(arr)
    return np.vstack([arr.real, -arr.imag])


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> int:
    """Rank of ``M`` via SVD with the package-wide relative cutoff.

    The cutoff is ``relative_rank_tol * max(shape) * max(sigma_max, scale)``.
    ``scale`` lets callers whose matrix may be zero up to roundoff supply the
    magnitude of the data it was assembled from; without it a matrix of pure
    roundoff noise would count as rank one, since the cutoff is relative to
    its own largest singular value.  The zero matrix has rank 0.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    cutoff = tol.relative_rank_tol * max(M.shape) * max(s[0], scale)
    return int(np.count_nonzero(s > cutoff))


def nullspace(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the right nullspace of ``M`` as columns.

    The basis has exactly ``cols - numerical_rank(M)`` columns; for a
    complex ``M`` the basis is complex.
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("nullspace expects a 2-d matrix")
    n = M.shape[1]
    if M.shape[0] == 0 or M.size == 0 or not np.any(M):
        return np.eye(n, dtype=M.dtype if M.ndim == 2 else float)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    cutoff = tol.relative_rank_tol * max(M.shape) * s[0]
    rank = int(np.count_nonzero(s > cutoff))
    return vh[rank:].conj().T


def complex_rank(A, tol: Tolerance = DEFAULT_TOL) -> int:
    """Complex rank of ``A``, computed on its real block lifting.

    The lifting duplicates every singular value, so half the lifted rank is
    the complex rank; working on the lifting keeps every rank decision in the
    package on real matrices.
    """
    return numerical_rank(block_lift(A), tol) // 2


# ---------------------------------------------------------------------------
# Matrix / vector file format shared by all modules and the CLI:
# {"rows": m, "cols": d, "entries": [[re, im], ...]} in row-major order.
# Vectors use cols = 1.  Floats round-trip exactly (shortest-repr decimals).
# ---------------------------------------------------------------------------


def _to_payload(A: np.ndarray) -> dict:
    entries = [[float(z.real), float(z.imag)] for z in A.reshape(-1)]
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "entries": entries}


def _from_payload(payload: dict) -> np.ndarray:
    try:
        rows, cols = int(payload["rows"]), int(payload["cols"])
        entries = payload["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix file must carry rows, cols and entries") from exc
    if len(entries) != rows * cols:
        raise ValueError(
            f"matrix file declares {rows}x{cols} but carries {len(entries)} entries"
        )
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


def save_matrix(A, path) -> None:
    """Write a complex matrix to ``path`` in the shared JSON format."""
    with open(path, "w") as fh:
        json.dump(_to_payload(as_matrix(A)), fh)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    """Read a complex matrix from the shared JSON format."""
    with open(path) as fh:
        return as_matrix(_from_payload(json.load(fh)))


def save_vector(v, path) -> None:
    """Write a complex vector (a one-column matrix) to ``path``."""
    v = as_vector(v)
    with open(path, "w") as fh:
        json.dump(_to_payload(v[:, None]), fh)
        fh.write("\n")


def load_vector(path) -> np.ndarray:
    """Read a complex vector from ``path``; the file must have cols = 1."""
    with open(path) as fh:
        payload = json.load(fh)
    A = _from_payload(payload)
    if A.shape[1] != 1:
        raise ValueError(f"expected a vector file (cols = 1), got cols = {A.shape[1]}")
    return A[:, 0]
