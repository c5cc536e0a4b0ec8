from fractions import Fraction

import numpy as np
import pytest

from phaseonly import (
    consistency_sweep,
    counterexample_search,
    counterexample_search_affine,
    design_generic_stack,
    exact_rank,
    lift_discriminant,
    ma_matrix,
    numerical_rank,
    phase_vector,
    random_gaussian,
    rationalize,
    vanishing_row_signal,
)
from phaseonly.discriminant import phase_blocks
from phaseonly.errors import NotCanonical, ZeroSignal


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def random_complex(r, shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


def test_witness_identity_matrix():
    w = counterexample_search(np.eye(2, dtype=complex), np.array([1.0, 1.0]))
    assert w is not None
    assert w.same_phases and not w.proportional
    assert w.valid


def test_witness_none_for_recoverable():
    B0 = design_generic_stack(2, 3)
    assert counterexample_search(B0, np.array([1.0, 0.0])) is None


def test_witness_found_below_threshold():
    # m = 2d - 2: a valid witness must exist for every random draw
    r = rng(1)
    for seed in range(50):
        A = random_gaussian(4, 3, seed=50_000 + seed)
        x = random_complex(r, 3)
        w = counterexample_search(A, x)
        assert w is not None and w.valid


def test_witness_zero_signal_rejected():
    with pytest.raises(ZeroSignal):
        counterexample_search(design_generic_stack(2, 3), np.zeros(2))


def test_witness_validity_is_phase_checked():
    # the witness reproduces the observation through an actual measurement
    r = rng(2)
    A = random_gaussian(4, 3, seed=3)
    x = random_complex(r, 3)
    w = counterexample_search(A, x)
    assert w is not None
    p1, s1 = phase_vector(A @ w.y)
    p2, s2 = phase_vector(A @ x)
    assert np.array_equal(s1, s2)
    assert np.max(np.abs(p1 - p2)) <= 1e-8


def test_affine_witness_both_sides():
    x = random_complex(rng(4), 3)
    below = random_gaussian(5, 3, seed=5, affine=True)
    w = counterexample_search_affine(below, x)
    assert w is not None and w.valid
    above = random_gaussian(6, 3, seed=6, affine=True)
    assert counterexample_search_affine(above, x) is None


# ---------------------------------------------------------------------------
# exact rank
# ---------------------------------------------------------------------------


def test_exact_rank_small_cases():
    assert exact_rank([[Fraction(0), Fraction(0)], [Fraction(0), Fraction(0)]]) == 0
    assert exact_rank(ma_matrix([1, 2, 3])) == 2
    assert exact_rank(np.zeros((3, 4))) == 0
    assert exact_rank(np.eye(4)) == 4


def test_exact_rank_complex_pairs():
    # i as a (0, 1) pair: [[i, 1], [1, -i]] has rank 1
    M = [[(0, 1), (1, 0)], [(1, 0), (0, -1)]]
    assert exact_rank(M) == 1


def test_exact_rank_matches_numerical_on_design():
    B0 = design_generic_stack(2, 3)
    D = lift_discriminant(B0, np.array([1.0, 0.0]))
    assert exact_rank(D) == 6 == numerical_rank(D)


def test_exact_rank_large_integers_no_overflow():
    big = 10**40
    M = [[Fraction(big), Fraction(1)], [Fraction(1), Fraction(0)]]
    assert exact_rank(M) == 2
    M = [[Fraction(big), Fraction(big)], [Fraction(big), Fraction(big)]]
    assert exact_rank(M) == 1


def test_rationalize_is_exact():
    vals = np.array([[0.5, -0.25], [3.0, 1e-3]])
    pairs = rationalize(vals)
    assert pairs[0][0][0] == Fraction(1, 2)
    assert pairs[0][1][0] == Fraction(-1, 4)
    assert float(pairs[1][1][0]) == 1e-3


def test_exact_rank_referee_random_rational():
    r = rng(5)
    choices = np.array([0, 1, -1, 1j, -1j, 1 + 1j], dtype=complex)
    for _ in range(30):
        d = int(r.integers(2, 5))
        m = int(r.integers(d, 3 * d))
        A = r.choice(choices, size=(m, d))
        x = r.choice(choices, size=d)
        if not np.any(x):
            continue
        D = lift_discriminant(A, x)
        assert exact_rank(D) == numerical_rank(D)


# ---------------------------------------------------------------------------
# consistency sweep
# ---------------------------------------------------------------------------


def test_consistency_sweep_small():
    rep = consistency_sweep(60, [2, 3], seed=99)
    assert rep.consistent, rep.failures
    assert rep.linear_checked == 60
    assert rep.affine_checked == 60
    assert rep.rational_checked == 15
    assert "\"consistent\": true" in rep.to_json()


def test_consistency_sweep_covers_zero_measurements():
    # every third trial plants an exact zero measurement; rerun a few directly
    rep = consistency_sweep(12, [3], seed=7)
    assert rep.consistent, rep.failures


# ---------------------------------------------------------------------------
# vanishing-row construction
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 4])
def test_vanishing_row_signal(d):
    r = rng(100 + d)
    A = np.vstack([np.eye(d), random_complex(r, (d - 1, d))])
    x0 = vanishing_row_signal(A, seed=d)
    E0, owners, supp = phase_blocks(A, x0)
    assert supp.size == d  # no zero coordinates
    assert owners[0] == d  # first block row belongs to the first free row
    assert np.max(np.abs(E0[0])) <= 1e-10


def test_vanishing_row_requires_canonical():
    with pytest.raises(NotCanonical):
        vanishing_row_signal(design_generic_stack(2, 3))
