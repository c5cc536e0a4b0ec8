import numpy as np
import pytest

from phaseonly import (
    MeasurementEnsemble,
    PhaseObservation,
    canonicalize_affine,
    canonicalize_linear,
    design_affine_3d,
    design_affine_anchor,
    design_generic_stack,
    random_gaussian,
    recover_ratio,
    solve_affine,
    solve_linear,
    solution_space_dim,
    verdict_affine_lift,
    verdict_linear,
)
from phaseonly.errors import (
    DegeneratePhases,
    Infeasible,
    NonUnique,
    OffsetInRange,
    RankDeficientMatrix,
)


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def random_complex(r, shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


# ---------------------------------------------------------------------------
# observations
# ---------------------------------------------------------------------------


def test_observation_renormalizes():
    obs = PhaseObservation(np.array([1.0 + 1e-13j, 0.0]))
    assert abs(abs(obs.values[0]) - 1.0) < 1e-15
    assert obs.support.tolist() == [0]


def test_observation_rejects_mid_magnitudes():
    with pytest.raises(ValueError):
        PhaseObservation(np.array([0.5 + 0j]))


def test_observation_from_vector():
    obs = PhaseObservation.from_vector(np.array([3.0 + 4.0j, 0.0, -2.0]))
    assert obs.values[0] == pytest.approx(0.6 + 0.8j)
    assert obs.values[1] == 0
    assert obs.support.tolist() == [0, 2]


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------


def test_canonicalize_identity_passthrough():
    A = np.vstack([np.eye(2), random_complex(rng(1), (3, 2))])
    A_can, perm, P = canonicalize_linear(A)
    assert np.array_equal(perm, np.arange(5))
    assert np.array_equal(P, np.eye(2))
    assert np.array_equal(A_can, A)


def test_canonicalize_reorders_and_normalizes():
    A = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], dtype=complex)
    A_can, perm, P = canonicalize_linear(A)
    assert np.array_equal(A_can[:2], np.eye(2))
    assert sorted(perm.tolist()) == [0, 1, 2]
    # measurements agree: A_can (P x) == A[perm] x
    x = random_complex(rng(2), 2)
    assert np.allclose(A_can @ (P @ x), A[perm] @ x, atol=1e-12)


def test_canonicalize_rank_deficient():
    A = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    with pytest.raises(RankDeficientMatrix):
        canonicalize_linear(A)


def test_canonicalize_measurement_equivalence_random():
    r = rng(3)
    for _ in range(20):
        d = int(r.integers(1, 6))
        m = int(r.integers(d, 2 * d + 3))
        A = random_complex(r, (m, d))
        A_can, perm, P = canonicalize_linear(A)
        x = random_complex(r, d)
        assert np.allclose(A_can @ (P @ x), A[perm] @ x, atol=1e-9)
        assert np.array_equal(A_can[:d], np.eye(d))


def test_canonicalize_affine_examples():
    ens = design_affine_anchor(2, 4)
    can, tr = canonicalize_affine(ens)
    assert np.array_equal(can.matrix[:2], np.eye(2))
    assert np.array_equal(can.offset[:2], np.zeros(2))
    x = random_complex(rng(4), 2)
    xc = tr.to_canonical(x)
    assert np.allclose(
        can.matrix @ xc + can.offset,
        ens.matrix[tr.row_perm] @ x + ens.offset[tr.row_perm],
        atol=1e-12,
    )
    assert np.allclose(tr.from_canonical(xc), x, atol=1e-12)


def test_canonicalize_affine_already_canonical():
    ens = MeasurementEnsemble(
        np.vstack([np.eye(2), random_complex(rng(5), (2, 2))]),
        np.array([0.0, 0.0, 1.0, 1j]),
    )
    can, tr = canonicalize_affine(ens)
    assert np.array_equal(tr.row_perm, np.arange(4))
    assert np.array_equal(can.matrix, ens.matrix)
    assert np.array_equal(can.offset, ens.offset)


# ---------------------------------------------------------------------------
# linear solve
# ---------------------------------------------------------------------------


def test_solve_linear_anchored_stack():
    B0 = design_generic_stack(2, 3)
    res = solve_linear(B0, PhaseObservation(np.ones(3, dtype=complex)))
    assert np.allclose(res.signal, [1.0, 0.0], atol=1e-10)
    assert res.ambiguity == "PositiveScaling"
    assert res.normalization == "UnitNorm"
    assert res.residual <= 1e-8
    assert res.nullity == 1


def test_solve_linear_nonunique():
    with pytest.raises(NonUnique) as exc:
        solve_linear(np.eye(2, dtype=complex), PhaseObservation(np.ones(2, dtype=complex)))
    assert exc.value.nullity == 2


def test_solve_linear_gaussian_roundtrip():
    # above the threshold every verdict-recoverable draw round-trips
    r = rng(700)
    for _ in range(120):
        d = int(r.integers(2, 7))
        m = int(r.integers(2 * d - 1, 3 * d + 1))
        A = random_complex(r, (m, d))
        x = random_complex(r, d)
        assert verdict_linear(A, x).recoverable
        obs = PhaseObservation.from_vector(A @ x)
        res = solve_linear(A, obs)
        assert np.linalg.norm(res.signal - x / np.linalg.norm(x)) <= 1e-8


def test_solve_linear_zero_observation():
    A = random_gaussian(5, 3, seed=1)
    res = solve_linear(A, PhaseObservation(np.zeros(5, dtype=complex)))
    assert np.array_equal(res.signal, np.zeros(3))
    assert res.residual == 0.0


def test_solve_linear_infeasible_observation():
    # flip one phase of a valid observation to a value no signal can produce
    B0 = design_generic_stack(2, 3)
    values = np.ones(3, dtype=complex)
    values[2] = -1.0  # (1,0),(1,1) positive forces row 3 positive too
    with pytest.raises((Infeasible, NonUnique)):
        solve_linear(B0, PhaseObservation(values))


def test_solve_linear_nonunique_matches_dim():
    r = rng(9)
    for _ in range(30):
        d = int(r.integers(2, 5))
        m = int(r.integers(d, 3 * d))
        A = random_complex(r, (m, d))
        x = random_complex(r, d)
        dim = solution_space_dim(A, x)
        obs = PhaseObservation.from_vector(A @ x)
        if dim >= 2:
            with pytest.raises(NonUnique):
                solve_linear(A, obs)
        else:
            solve_linear(A, obs)


def test_solve_linear_with_zero_measurements():
    # observations containing exact zeros still round-trip when recoverable
    r = rng(10)
    hits = 0
    for _ in range(40):
        d = int(r.integers(2, 4))
        m = 2 * d + 1
        A = random_complex(r, (m, d))
        x = random_complex(r, d)
        g = A[0]
        x = x - g.conj() * (g @ x) / (g @ g.conj())  # plant a zero measurement
        if not np.any(x):
            continue
        if not verdict_linear(A, x).recoverable:
            continue
        hits += 1
        obs = PhaseObservation.from_vector(A @ x)
        assert obs.support.size < m
        res = solve_linear(A, obs)
        assert np.linalg.norm(res.signal - x / np.linalg.norm(x)) <= 1e-8
    assert hits >= 5


# ---------------------------------------------------------------------------
# affine solve
# ---------------------------------------------------------------------------


def test_solve_affine_three_probe_design():
    ens = design_affine_3d(2)
    x = np.array([1.0 + 1j, 0.0])
    obs = PhaseObservation.from_vector(ens.matrix @ x + ens.offset)
    res = solve_affine(ens, obs)
    assert np.max(np.abs(res.signal - x)) <= 1e-8
    assert res.ambiguity == "Exact"

    res0 = solve_affine(ens, PhaseObservation.from_vector(ens.offset))
    assert np.max(np.abs(res0.signal)) <= 1e-8


def test_solve_affine_below_threshold_nonunique():
    ens = random_gaussian(5, 3, seed=3, affine=True)  # m = 2d - 1
    x = random_complex(rng(11), 3)
    obs = PhaseObservation.from_vector(ens.matrix @ x + ens.offset)
    with pytest.raises(NonUnique):
        solve_affine(ens, obs)


def test_solve_affine_gaussian_roundtrip():
    r = rng(800)
    for _ in range(120):
        d = int(r.integers(2, 7))
        m = int(r.integers(2 * d, 3 * d + 1))
        ens = random_gaussian(m, d, seed=int(r.integers(2**32)), affine=True)
        x = random_complex(r, d)
        assert verdict_affine_lift(ens, x).recoverable
        obs = PhaseObservation.from_vector(ens.matrix @ x + ens.offset)
        res = solve_affine(ens, obs)
        assert np.max(np.abs(res.signal - x)) <= 1e-8


def test_solve_affine_rejects_offset_in_range():
    A = random_gaussian(6, 2, seed=4)
    ens = MeasurementEnsemble(A, A @ np.array([1.0, 1.0]))
    with pytest.raises(OffsetInRange):
        solve_affine(ens, PhaseObservation(np.zeros(6, dtype=complex)))


# ---------------------------------------------------------------------------
# magnitude ratio from three phases
# ---------------------------------------------------------------------------


def test_recover_ratio_basic():
    assert recover_ratio(1.0, 1j, np.exp(1j * np.pi / 4)) == pytest.approx(1.0)


def test_recover_ratio_degenerate():
    # opposite real phases: the sum phase carries no magnitude information
    with pytest.raises(DegeneratePhases):
        recover_ratio(1.0, -1.0, -1.0)


def test_recover_ratio_random_pairs():
    r = rng(12)
    for _ in range(50):
        zk, zl = random_complex(r, 2)
        pk, pl = zk / abs(zk), zl / abs(zl)
        if min(abs(pk - pl), abs(pk + pl)) < 1e-3:
            continue
        ps = (zk + zl) / abs(zk + zl)
        assert recover_ratio(pk, pl, ps) == pytest.approx(abs(zk) / abs(zl), rel=1e-8)


def test_recover_ratio_validates_modulus():
    with pytest.raises(ValueError):
        recover_ratio(0.5, 1.0, 1.0)
