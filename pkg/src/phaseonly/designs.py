"""Explicit measurement designs, random ensembles, and kernel reductions.

All constructors return plain complex arrays (or a
:class:`~phaseonly.discriminant.MeasurementEnsemble` for affine designs).
Randomness always flows through numpy's PCG64 generator seeded explicitly, so
every sampled object is reproducible bit for bit from its seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .discriminant import MeasurementEnsemble
from .errors import AnchorNotInSupport, RankDeficientBlock
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_vector, complex_rank

__all__ = [
    "DesignSpec",
    "DESIGN_KINDS",
    "design_pairwise",
    "design_adaptive",
    "design_generic_stack",
    "design_fourier",
    "design_fourier_symmetric",
    "design_affine_3d",
    "design_affine_anchor",
    "random_gaussian",
    "build_design",
    "reduce_kernel_linear",
    "reduce_kernel_affine",
]

DESIGN_KINDS = (
    "Pairwise",
    "Adaptive",
    "GenericStack",
    "Fourier",
    "FourierSymmetric",
    "Affine3d",
    "AffineAnchor",
    "Gaussian",
)


@dataclass
class DesignSpec:
    """Serializable description of a measurement design.

    ``m`` applies to the sized kinds (GenericStack, AffineAnchor, Gaussian),
    ``frequencies`` to the Fourier kinds, ``seed`` to Gaussian, and
    ``signs``/``anchor`` to the Adaptive kind (the observed coordinate phases
    and the anchor index).  ``affine`` asks Gaussian for an offset as well.
    """

    kind: str
    d: int
    m: int | None = None
    frequencies: list[float] | None = None
    seed: int | None = None
    signs: list[list[float]] | None = None
    anchor: int | None = None
    affine: bool = False

    def __post_init__(self):
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if self.frequencies is not None and not np.all(np.isfinite(self.frequencies)):
            raise ValueError("frequencies must be finite")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        for key in ("m", "frequencies", "seed", "signs", "anchor"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.affine:
            out["affine"] = True
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "DesignSpec":
        allowed = {"kind", "d", "m", "frequencies", "seed", "signs", "anchor", "affine"}
        unknown = set(payload) - allowed
        if unknown:
            raise ValueError(f"unknown design spec fields: {sorted(unknown)}")
        return cls(**payload)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DesignSpec":
        return cls.from_dict(json.loads(text))


def design_pairwise(d: int) -> np.ndarray:
    """d^2 rows recovering every signal: coordinates plus all rotated pairs.

    The d coordinate rows are followed, for every ordered pair k < l, by the
    rows e_k + e_l and e_k + i e_l.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    rows = [np.eye(d, dtype=complex)[k] for k in range(d)]
    for k in range(d):
        for l in range(k + 1, d):
            r1 = np.zeros(d, dtype=complex)
            r1[k], r1[l] = 1.0, 1.0
            r2 = np.zeros(d, dtype=complex)
            r2[k], r2[l] = 1.0, 1.0j
            rows.append(r1)
            rows.append(r2)
    return np.array(rows)


def design_adaptive(observed_signs, anchor: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Extra rows that, with the d coordinate rows, pin a fixed signal.

    ``observed_signs`` are the coordinate phases of the target (zeros allowed)
    and ``anchor`` indexes a nonzero coordinate.  For each other supported
    coordinate l one row ``e_anchor + c_l e_l`` is emitted with unit ``c_l``
    avoiding the two degenerate alignments: ``c_l = i s`` for the phase ratio
    ``s = sign(x_anchor)/sign(x_l)`` whenever that avoids ``+-s``, else
    ``c_l = exp(i pi/4) s``.  Returns a (support_size - 1) x d matrix.
    """
    signs = as_vector(getattr(observed_signs, "values", observed_signs))
    d = signs.size
    supp = np.flatnonzero(np.abs(signs) > 0.5)
    if anchor not in supp:
        raise AnchorNotInSupport(f"anchor {anchor} has zero observed phase")
    rows = []
    for l in supp:
        if l == anchor:
            continue
        s = signs[anchor] / signs[l]
        c = 1j * s
        if min(abs(c - s), abs(c + s)) <= 1e-12:
            c = np.exp(1j * np.pi / 4) * s
        row = np.zeros(d, dtype=complex)
        row[anchor] += 1.0
        row[l] += c
        rows.append(row)
    return np.array(rows, dtype=complex).reshape(len(rows), d)


def design_generic_stack(d: int, m: int) -> np.ndarray:
    """Anchored stack: e_1, then e_1 + e_k and e_1 + i e_k, padded with e_1 rows.

    Needs m >= 2d - 1; the first 2d - 1 rows already make the first basis
    vector recoverable from purely nonzero phases.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if m < 2 * d - 1:
        raise ValueError(f"need at least {2 * d - 1} rows for dimension {d}, got {m}")
    rows = [np.eye(d, dtype=complex)[0]]
    for k in range(1, d):
        row = np.zeros(d, dtype=complex)
        row[0], row[k] = 1.0, 1.0
        rows.append(row)
    for k in range(1, d):
        row = np.zeros(d, dtype=complex)
        row[0], row[k] = 1.0, 1.0j
        rows.append(row)
    for _ in range(m - (2 * d - 1)):
        rows.append(np.eye(d, dtype=complex)[0])
    return np.array(rows)


def design_fourier(frequencies, d: int) -> np.ndarray:
    """Plain Fourier rows: row j is ``[exp(-i w_j), ..., exp(-i d w_j)]``."""
    w = np.asarray(frequencies, dtype=float).reshape(-1)
    if w.size == 0:
        raise ValueError("need at least one frequency")
    k = np.arange(1, d + 1)
    return np.exp(-1j * np.outer(w, k))


def design_fourier_symmetric(frequencies, d: int) -> np.ndarray:
    """Symmetric Fourier rows over indices -(d-1)..(d-1), length 2d - 1.

    Row j carries ``exp(-i k w_j)`` for k from -(d-1) to d-1, so a
    conjugate-symmetric signal produces purely real measurements.
    """
    w = np.asarray(frequencies, dtype=float).reshape(-1)
    if w.size == 0:
        raise ValueError("need at least one frequency")
    if d < 1:
        raise ValueError("dimension must be positive")
    k = np.arange(-(d - 1), d)
    return np.exp(-1j * np.outer(w, k))


def design_affine_3d(d: int) -> MeasurementEnsemble:
    """Three coordinate probes per entry: phases of x_k, x_k + 1 and x_k + i.

    3d measurements recovering every signal exactly, zero entries included.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    eye = np.eye(d, dtype=complex)
    A = np.vstack([eye, eye, eye])
    b = np.concatenate(
        [np.zeros(d, complex), np.ones(d, complex), 1j * np.ones(d, complex)]
    )
    return MeasurementEnsemble(A, b)


def design_affine_anchor(d: int, m: int) -> MeasurementEnsemble:
    """Anchored affine design: [I | 1], [iI | 1] and all-ones padding rows."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if m < 2 * d:
        raise ValueError(f"need at least {2 * d} rows for dimension {d}, got {m}")
    eye = np.eye(d, dtype=complex)
    A = np.vstack([eye, 1j * eye, np.zeros((m - 2 * d, d), dtype=complex)])
    b = np.ones(m, dtype=complex)
    return MeasurementEnsemble(A, b)


def random_gaussian(m: int, d: int, seed: int, affine: bool = False):
    """Complex Gaussian matrix (and offset) from a seeded PCG64 stream.

    Entries have independent standard normal real and imaginary parts; the
    same seed yields a bit-identical draw on every platform.
    """
    if m < 1 or d < 1:
        raise ValueError("dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    A = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
    if not affine:
        return A
    b = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return MeasurementEnsemble(A, b)


def build_design(spec: DesignSpec):
    """Materialize a :class:`DesignSpec` into a matrix or affine ensemble."""
    kind = spec.kind
    if kind == "Pairwise":
        return design_pairwise(spec.d)
    if kind == "GenericStack":
        if spec.m is None:
            raise ValueError("GenericStack needs m")
        return design_generic_stack(spec.d, spec.m)
    if kind == "Fourier":
        if spec.frequencies is None:
            raise ValueError("Fourier needs frequencies")
        return design_fourier(spec.frequencies, spec.d)
    if kind == "FourierSymmetric":
        if spec.frequencies is None:
            raise ValueError("FourierSymmetric needs frequencies")
        return design_fourier_symmetric(spec.frequencies, spec.d)
    if kind == "Affine3d":
        return design_affine_3d(spec.d)
    if kind == "AffineAnchor":
        if spec.m is None:
            raise ValueError("AffineAnchor needs m")
        return design_affine_anchor(spec.d, spec.m)
    if kind == "Gaussian":
        if spec.m is None or spec.seed is None:
            raise ValueError("Gaussian needs m and seed")
        return random_gaussian(spec.m, spec.d, spec.seed, affine=spec.affine)
    if kind == "Adaptive":
        if spec.signs is None or spec.anchor is None:
            raise ValueError("Adaptive needs signs and anchor")
        signs = np.array([complex(re, im) for re, im in spec.signs])
        extra = design_adaptive(signs, spec.anchor)
        return np.vstack([np.eye(spec.d, dtype=complex), extra])
    raise ValueError(f"unknown design kind {kind!r}")


def _pivot_columns(block, size, tol) -> tuple[np.ndarray, np.ndarray]:
    """Leading/trailing column split making the leading block invertible."""
    _, _, piv = scipy.linalg.qr(block, mode="economic", pivoting=True)
    lead = np.sort(piv[:size])
    trail = np.setdiff1d(np.arange(block.shape[1]), lead)
    return lead, trail


def reduce_kernel_linear(A, S, tol: Tolerance = DEFAULT_TOL):
    """Eliminate the rows ``S`` for signals annihilated by them.

    Returns ``(reduced, column_perm)``: the reduced matrix of shape
    ``(m - |S|) x (d - |S|)`` governing recoverability of such signals, and
    the column permutation whose leading ``|S|`` entries were eliminated.
    For any ``x`` with ``A[S] @ x == 0``, the retained rows satisfy
    ``A[S^c] @ x == reduced @ x[column_perm[|S|:]]``.
    """
    A = as_matrix(A)
    m, d = A.shape
    S = np.unique(np.asarray(S, dtype=np.int64).reshape(-1))
    if S.size < 1 or S.size >= d:
        raise ValueError("row subset size must satisfy 1 <= |S| < d")
    if S.size and (S.min() < 0 or S.max() >= m):
        raise ValueError("row indices out of range")
    A_S = A[S]
    if complex_rank(A_S, tol) < S.size:
        raise RankDeficientBlock("selected rows do not have full row rank")
    lead, trail = _pivot_columns(A_S, S.size, tol)
    comp = np.setdiff1d(np.arange(m), S)
    T = A_S[:, lead]
    reduced = A[comp][:, trail] - A[comp][:, lead] @ np.linalg.solve(T, A_S[:, trail])
    return reduced, np.concatenate([lead, trail])


def reduce_kernel_affine(ens: MeasurementEnsemble, S, tol: Tolerance = DEFAULT_TOL):
    """Affine analog of :func:`reduce_kernel_linear`.

    Eliminates the rows ``S`` for signals with ``A[S] @ x + b[S] == 0`` and
    returns ``(reduced_ensemble, column_perm)`` with
    ``A[S^c] @ x + b[S^c] == reduced @ x[column_perm[|S|:]] + reduced_offset``.
    """
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset")
    A, b = ens.matrix, ens.offset
    m, d = A.shape
    S = np.unique(np.asarray(S, dtype=np.int64).reshape(-1))
    if S.size < 1 or S.size >= d:
        raise ValueError("row subset size must satisfy 1 <= |S| < d")
    if S.size and (S.min() < 0 or S.max() >= m):
        raise ValueError("row indices out of range")
    A_S = A[S]
    if complex_rank(A_S, tol) < S.size:
        raise RankDeficientBlock("selected rows do not have full row rank")
    lead, trail = _pivot_columns(A_S, S.size, tol)
    comp = np.setdiff1d(np.arange(m), S)
    T = A_S[:, lead]
    reduced = A[comp][:, trail] - A[comp][:, lead] @ np.linalg.solve(T, A_S[:, trail])
    b_reduced = b[comp] - A[comp][:, lead] @ np.linalg.solve(T, b[S])
    return MeasurementEnsemble(reduced, b_reduced), np.concatenate([lead, trail])
