import math
from fractions import Fraction

import numpy as np
import pytest

from amenalab import (DiagonalOperator, build_T, conjugate_by_upper_unipotent,
                      exact_sqrt, make_spectrum, minimal_intertwiner,
                      similarity_growth_sweep)


def test_conjugation_by_zero_is_identity():
    s = make_spectrum("geometric", 3)
    T = build_T(s)
    out = conjugate_by_upper_unipotent(T, DiagonalOperator.zeros(3))
    assert (out - T).is_zero()


def test_conjugation_single_point_hand_value():
    s = make_spectrum("explicit", values=[Fraction(1, 4)])
    T = build_T(s)
    out = conjugate_by_upper_unipotent(T, DiagonalOperator((Fraction(-2),)))
    assert out.b12.diag == (Fraction(0),)
    assert out.b22.diag == (Fraction(1, 4),)
    assert out.b11.is_zero() and out.b21.is_zero()


def test_conjugation_matches_dense_oracle():
    rng = np.random.default_rng(12)
    s = make_spectrum("geometric", 4)
    T = build_T(s).to_float()
    B = DiagonalOperator(tuple(rng.standard_normal(4)))
    out = conjugate_by_upper_unipotent(T, B)
    m = 4
    S = np.eye(2 * m)
    S_inv = np.eye(2 * m)
    for i in range(m):
        S[i, m + i] = B.diag[i]
        S_inv[i, m + i] = -B.diag[i]
    expected = S @ T.to_dense() @ S_inv
    assert np.max(np.abs(out.to_dense() - expected)) < 1e-12
    # upper-right block is the square-root block plus B N, entrywise
    for lam, b, x12 in zip(s.floats(), B.diag, out.b12.diag):
        assert x12 == pytest.approx(math.sqrt(lam) + b * lam, abs=1e-12)


def test_conjugation_keeps_lower_blocks():
    s = make_spectrum("geometric", 5)
    T = build_T(s)
    out = conjugate_by_upper_unipotent(T, DiagonalOperator.ones(5))
    assert out.b21.is_zero()
    assert (out.b22 - T.b22).is_zero()


def test_minimal_intertwiner_frozen_values():
    s = make_spectrum("explicit", values=[Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
    solve = minimal_intertwiner(s)
    assert solve.norm == pytest.approx(math.sqrt(8), abs=1e-12)
    assert solve.residual == 0.0
    unit = minimal_intertwiner(make_spectrum("explicit", values=[Fraction(1)]))
    assert unit.norm == 1.0
    large = minimal_intertwiner(make_spectrum("geometric", 20))
    assert large.norm == pytest.approx(1024.0, abs=1e-9)


def test_minimal_intertwiner_least_squares_oracle():
    s = make_spectrum("geometric", 5)
    n_dense = np.diag(s.floats())
    root = np.diag(np.sqrt(s.floats()))
    # solve B N = N^(1/2) as a full linear system over all of B
    system = np.kron(n_dense.T, np.eye(5))
    solution, *_ = np.linalg.lstsq(system, root.ravel(), rcond=None)
    oracle_norm = np.linalg.norm(solution.reshape(5, 5), 2)
    assert minimal_intertwiner(s).norm == pytest.approx(oracle_norm, abs=1e-10)


def test_minimal_intertwiner_unbounded_at_zero():
    with pytest.raises(ValueError, match="intertwiner unbounded at index 2"):
        minimal_intertwiner(DiagonalOperator((Fraction(1, 2), Fraction(0))))


def test_growth_sweep_geometric():
    report = similarity_growth_sweep(lambda m: make_spectrum("geometric", m), [4, 8, 16])
    assert report.rows == ((4, 4.0), (8, 16.0), (16, 256.0))
    assert report.bounded  # strictly increasing
    assert report.threshold_met  # vacuous without a threshold


def test_growth_sweep_harmonic():
    report = similarity_growth_sweep(lambda m: make_spectrum("harmonic", m), [4, 16])
    assert report.rows == ((4, 2.0), (16, 4.0))
    assert report.bounded


def test_growth_sweep_singleton_and_threshold():
    report = similarity_growth_sweep(lambda m: make_spectrum("geometric", m), [6])
    assert report.bounded and report.rows == ((6, 8.0),)
    passing = similarity_growth_sweep(lambda m: make_spectrum("geometric", m), [4, 8],
                                      threshold=10.0)
    assert passing.threshold_met
    failing = similarity_growth_sweep(lambda m: make_spectrum("geometric", m), [4, 8],
                                      threshold=100.0)
    assert not failing.threshold_met


def test_growth_sweep_validation():
    with pytest.raises(ValueError, match="truncations"):
        similarity_growth_sweep(lambda m: make_spectrum("geometric", m), [8, 4])


def test_conjugation_zeroing_with_negative_inverse_root():
    s = make_spectrum("geometric", 6)
    B = DiagonalOperator(tuple(-1 / exact_sqrt(v) for v in s.values))
    out = conjugate_by_upper_unipotent(build_T(s), B)
    assert out.b12.is_zero()
    assert (out.b22 - s.diagonal()).is_zero()
