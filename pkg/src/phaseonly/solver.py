"""Signal reconstruction from phase observations and canonicalization.

The linear model reconstructs up to a positive scale by extracting the
one-dimensional nullspace of a lifted real system; the affine model solves an
inhomogeneous lifted system and returns the signal exactly.  Every success
path ends with a mandatory phase verification, so a returned reconstruction
is a certified witness rather than a rank-tolerance judgement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .discriminant import MeasurementEnsemble, check_offset_outside_range
from .errors import (
    DegeneratePhases,
    Infeasible,
    NonUnique,
    RankDeficientMatrix,
)
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
)

__all__ = [
    "PhaseObservation",
    "ReconstructionResult",
    "CanonicalTransform",
    "canonicalize_linear",
    "canonicalize_affine",
    "solve_linear",
    "solve_affine",
    "recover_ratio",
]

PHASE_RESIDUAL_TOL = 1e-8
UNIT_MODULUS_SLACK = 1e-12


@dataclass(frozen=True)
class PhaseObservation:
    """An observed phase vector: entries are exactly zero or unit modulus.

    Nonzero entries are renormalized to exact unit modulus on construction;
    ``support`` lists their indices.
    """

    values: np.ndarray
    support: np.ndarray | None = None

    def __post_init__(self):
        v = as_vector(self.values).copy()
        mags = np.abs(v)
        unit = np.abs(mags - 1.0) <= UNIT_MODULUS_SLACK
        zero = mags == 0.0
        if not np.all(unit | zero):
            bad = np.flatnonzero(~(unit | zero))
            raise ValueError(
                f"observation entries must be 0 or unit modulus; offending "
                f"indices {bad.tolist()}"
            )
        v[unit] = v[unit] / mags[unit]
        supp = np.flatnonzero(~zero).astype(np.int64)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "support", supp)

    @classmethod
    def from_vector(cls, raw, tol: Tolerance = DEFAULT_TOL) -> "PhaseObservation":
        """Observe an arbitrary measurement vector: take entrywise phases."""
        phases, _ = phase_vector(raw, tol)
        return cls(values=phases)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ReconstructionResult:
    """A reconstructed signal with its ambiguity class and certification.

    ``ambiguity`` is "PositiveScaling" for the linear model (the returned
    signal is the unit-norm representative of the positive ray) and "Exact"
    for the affine model.  ``residual`` is the largest phase mismatch between
    the re-measured signal and the observation; success requires it below
    1e-8.  ``nullity`` is the dimension of the homogeneous solution space the
    solver saw.
    """

    signal: np.ndarray
    ambiguity: str
    normalization: str
    residual: float
    nullity: int

    def to_dict(self) -> dict:
        return {
            "signal": [[float(z.real), float(z.imag)] for z in self.signal],
            "ambiguity": self.ambiguity,
            "normalization": self.normalization,
            "residual": self.residual,
            "nullity": self.nullity,
        }


@dataclass(frozen=True)
class CanonicalTransform:
    """Record of an affine canonicalization.

    The canonical ensemble measures the transformed signal
    ``x_c = P @ x + shift`` identically to how the permuted original measures
    ``x``; ``from_canonical`` inverts the map.
    """

    row_perm: np.ndarray
    P: np.ndarray
    shift: np.ndarray

    def to_canonical(self, x) -> np.ndarray:
        return self.P @ as_vector(x) + self.shift

    def from_canonical(self, xc) -> np.ndarray:
        return np.linalg.solve(self.P, as_vector(xc) - self.shift)


def _pivot_rows(A, tol) -> np.ndarray:
    """Greedy selection of d well-conditioned rows via pivoted QR on A^T."""
    m, d = A.shape
    if np.allclose(A[:d, :d], np.eye(d), rtol=0.0, atol=1e-14):
        return np.arange(d)
    _, _, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    return np.sort(piv[:d])


def canonicalize_linear(A, tol: Tolerance = DEFAULT_TOL):
    """Permute rows and change coordinates so the top block is exactly I.

    Returns ``(A_canonical, row_perm, P)``: ``A_canonical = A[row_perm] P^-1``
    with the top block overwritten by the exact identity, and ``P`` the
    selected top block.  The canonical matrix measures ``P @ x`` exactly as
    the permuted original measures ``x``.
    """
    A = as_matrix(A)
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("cannot canonicalize a column-rank-deficient matrix")
    lead = _pivot_rows(A, tol)
    rest = np.setdiff1d(np.arange(m), lead)
    row_perm = np.concatenate([lead, rest])
    P = A[lead].copy()
    A_perm = A[row_perm]
    A_can = np.linalg.solve(P.T, A_perm.T).T
    A_can[:d] = np.eye(d)
    return A_can, row_perm, P


def canonicalize_affine(ens: MeasurementEnsemble, tol: Tolerance = DEFAULT_TOL):
    """Bring an affine ensemble to the form [[I, 0], [A1, b1]].

    Returns ``(canonical_ensemble, transform)`` where the transform records
    the row permutation, the selected top block ``P`` and the offset
    ``shift`` of the signal map ``x -> P @ x + shift``.
    """
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset")
    A, b = ens.matrix, ens.offset
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("cannot canonicalize a column-rank-deficient matrix")
    lead = _pivot_rows(A, tol)
    rest = np.setdiff1d(np.arange(m), lead)
    row_perm = np.concatenate([lead, rest])
    P = A[lead].copy()
    A_perm, b_perm = A[row_perm], b[row_perm]
    A_can = np.linalg.solve(P.T, A_perm.T).T
    A_can[:d] = np.eye(d)
    shift = b_perm[:d].copy()
    b_can = b_perm - A_can @ shift
    b_can[:d] = 0.0
    transform = CanonicalTransform(row_perm=row_perm, P=P, shift=shift)
    return MeasurementEnsemble(A_can, b_can), transform


def _observation(obs, m, tol) -> PhaseObservation:
    if isinstance(obs, PhaseObservation):
        ob = obs
    else:
        ob = PhaseObservation.from_vector(obs, tol)
    if len(ob) != m:
        raise ValueError(f"observation length {len(ob)} does not match {m} rows")
    return ob


def _restricted_phase_columns(obs: PhaseObservation, m: int) -> np.ndarray:
    """Complex m x s matrix whose columns carry the observed phases."""
    s = obs.support.size
    U = np.zeros((m, s), dtype=complex)
    U[obs.support, np.arange(s)] = obs.values[obs.support]
    return U


def _verify_phases(measured, obs: PhaseObservation, tol) -> float:
    """Max phase mismatch between a measured vector and the observation."""
    phases, supp = phase_vector(measured, tol)
    if not np.array_equal(supp, obs.support):
        raise Infeasible("reconstructed signal produces a different zero pattern")
    residual = float(np.max(np.abs(phases - obs.values))) if len(obs) else 0.0
    if residual > PHASE_RESIDUAL_TOL:
        raise Infeasible(
            f"phase verification failed: residual {residual:.3e} exceeds "
            f"{PHASE_RESIDUAL_TOL:.0e}"
        )
    return residual


def solve_linear(A, obs, tol: Tolerance = DEFAULT_TOL) -> ReconstructionResult:
    """Reconstruct a signal, up to positive scale, from the phases of A x.

    Assembles the homogeneous lifted system whose unknowns are the real
    coordinates of the signal and the measurement magnitudes on the observed
    support, and requires its nullspace to be one dimensional.  The returned
    signal has unit norm; the magnitude block of the extracted solution must
    be strictly positive and the reconstruction must reproduce the observed
    phases exactly (within 1e-8).
    """
    A = as_matrix(A)
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("solve requires a full-column-rank matrix")
    obs = _observation(obs, m, tol)
    s = obs.support.size
    if s == 0:
        # an all-zero observation pins the signal to zero exactly
        return ReconstructionResult(
            signal=np.zeros(d, dtype=complex),
            ambiguity="PositiveScaling",
            normalization="None",
            residual=0.0,
            nullity=0,
        )
    U = _restricted_phase_columns(obs, m)
    M = np.hstack([block_lift(A), -stack_lift(U)])
    basis = nullspace(M, tol)
    nullity = basis.shape[1]
    if nullity == 0:
        raise Infeasible("observation is not realizable: the lifted system has no ray")
    if nullity >= 2:
        raise NonUnique(
            f"observation admits a {nullity}-dimensional solution family",
            nullity=nullity,
        )
    v = basis[:, 0]
    lam = v[2 * d :]
    peak = int(np.argmax(np.abs(lam)))
    if lam[peak] == 0.0:
        raise Infeasible("magnitude block of the solution vanished")
    v = v * np.sign(lam[peak])
    lam = v[2 * d :]
    if np.min(lam) <= 0.0:
        raise Infeasible("magnitude block has mixed signs or zero entries")
    y = v[:d] - 1j * v[d : 2 * d]
    ny = np.linalg.norm(y)
    if ny == 0.0:
        raise Infeasible("solution has a zero signal block")
    y = y / ny
    residual = _verify_phases(A @ y, obs, tol)
    return ReconstructionResult(
        signal=y,
        ambiguity="PositiveScaling",
        normalization="UnitNorm",
        residual=residual,
        nullity=1,
    )


def solve_affine(ens: MeasurementEnsemble, obs, tol: Tolerance = DEFAULT_TOL) -> ReconstructionResult:
    """Reconstruct a signal exactly from the phases of A x + b.

    Solves the inhomogeneous lifted system by a minimum-norm least-squares
    solve; uniqueness requires the coefficient matrix to have a trivial
    nullspace, the magnitude block must be strictly positive, and the result
    must reproduce the observed phases.
    """
    if not ens.is_affine:
        raise ValueError("ensemble carries no offset; use solve_linear")
    A, b = ens.matrix, ens.offset
    m, d = A.shape
    if complex_rank(A, tol) < d:
        raise RankDeficientMatrix("solve requires a full-column-rank matrix")
    check_offset_outside_range(A, b, tol)
    obs = _observation(obs, m, tol)
    U = _restricted_phase_columns(obs, m)
    M = np.hstack([block_lift(A), -stack_lift(U)])
    rhs = -stack_lift(b)
    z, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    scale = max(1.0, float(np.linalg.norm(rhs)))
    if np.linalg.norm(M @ z - rhs) > PHASE_RESIDUAL_TOL * scale:
        raise Infeasible("observation is not realizable: lifted system inconsistent")
    nullity = M.shape[1] - numerical_rank(M, tol)
    if nullity >= 1:
        raise NonUnique(
            f"observation admits a {nullity}-dimensional solution family",
            nullity=nullity,
        )
    lam = z[2 * d :]
    if lam.size and np.min(lam) <= 0.0:
        raise Infeasible("magnitude block has nonpositive entries")
    y = z[:d] - 1j * z[d : 2 * d]
    residual = _verify_phases(A @ y + b, obs, tol)
    return ReconstructionResult(
        signal=y,
        ambiguity="Exact",
        normalization="None",
        residual=residual,
        nullity=0,
    )


def recover_ratio(phase_k: complex, phase_l: complex, phase_sum: complex) -> float:
    """Magnitude ratio |x_k| / |x_l| from three unit phases.

    ``phase_sum`` is the phase of the sum of the two entries.  Writing the
    positivity of the rotated sum and taking imaginary parts gives a linear
    equation in the ratio; the leading coefficient vanishes exactly when the
    two entry phases coincide up to sign, in which case the caller must
    measure the sum with the second entry rotated by i instead.
    """
    for name, p in (("phase_k", phase_k), ("phase_l", phase_l), ("phase_sum", phase_sum)):
        if abs(abs(complex(p)) - 1.0) > 1e-9:
            raise ValueError(f"{name} must have unit modulus")
    a = (complex(phase_k) / complex(phase_sum)).imag
    b = (complex(phase_l) / complex(phase_sum)).imag
    if abs(a) <= 1e-12:
        raise DegeneratePhases(
            "entry phases coincide up to sign; use the rotated pairing"
        )
    ratio = -b / a
    if not np.isfinite(ratio) or ratio <= 0.0:
        raise ValueError("phases are inconsistent with a positive magnitude ratio")
    return float(ratio)
