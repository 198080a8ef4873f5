import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amenalab import (BlockOperator, DiagonalOperator, Polynomial, apply_poly_to_block,
                      block_power, build_T, build_shifted_T, functional_calculus,
                      make_spectrum, operator_norm)
from oracle_utils import dense_exact, matpow_exact, spectral_norm_oracle

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def test_make_spectrum_geometric():
    s = make_spectrum("geometric", 3, ratio=Fraction(1, 2))
    assert s.values == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


def test_make_spectrum_harmonic():
    s = make_spectrum("harmonic", 3)
    assert s.values == (Fraction(1), Fraction(1, 2), Fraction(1, 3))


def test_make_spectrum_explicit_rejects_non_decreasing():
    with pytest.raises(ValueError, match="not strictly decreasing at index 2"):
        make_spectrum("explicit", values=[Fraction(3, 10), Fraction(4, 10)])


def test_make_spectrum_rejects_non_positive():
    with pytest.raises(ValueError, match="not positive at index 2"):
        make_spectrum("explicit", values=[Fraction(1, 2), Fraction(0)])


def test_make_spectrum_bad_ratio_and_count():
    with pytest.raises(ValueError, match="ratio"):
        make_spectrum("geometric", 4, ratio=Fraction(3, 2))
    with pytest.raises(ValueError, match="count"):
        make_spectrum("harmonic", 0)


def test_build_T_single_point():
    s = make_spectrum("explicit", values=[Fraction(1, 4)])
    T = build_T(s)
    assert T.b12.diag == (Fraction(1, 2),)
    assert T.b22.diag == (Fraction(1, 4),)
    assert T.b11.is_zero() and T.b21.is_zero()


def test_build_T_norm_against_svd_oracle():
    # frozen: sqrt(1/2 + 1/4) for the two-point geometric spectrum
    s = make_spectrum("geometric", 2)
    T = build_T(s)
    norm = operator_norm(T.to_float())
    assert norm == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
    assert norm == pytest.approx(spectral_norm_oracle(T.to_dense()), abs=1e-10)


def test_build_T_norm_unit_spectrum():
    s = make_spectrum("explicit", values=[Fraction(1)])
    assert operator_norm(build_T(s).to_float()) == pytest.approx(math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("count", [1, 3, 7])
def test_T_norm_closed_form_decreasing_spectra(count):
    s = make_spectrum("geometric", count)
    lam1 = float(s.lam(1))
    assert operator_norm(build_T(s).to_float()) == pytest.approx(
        math.sqrt(lam1 + lam1 ** 2), abs=1e-12)


def test_block_power_of_T_is_power_of_spectrum():
    s = make_spectrum("geometric", 2)
    squared = block_power(build_T(s), 2)
    # upper-right block carries lambda^(3/2), lower-right lambda^2
    for lam, x12, x22 in zip(s.values, squared.b12.diag, squared.b22.diag):
        assert x22 == lam * lam
        assert (x12 ** 2 - lam ** 3) == 0
    assert squared.b11.is_zero()


def test_block_power_confluent_case():
    d = DiagonalOperator((Fraction(1, 3), Fraction(2)))
    X = BlockOperator(d, d, DiagonalOperator.zeros(2), d)
    squared = block_power(X, 2)
    assert squared.b11.diag == tuple(v * v for v in d.diag)
    assert squared.b12.diag == tuple(2 * v * v for v in d.diag)
    assert squared.b22.diag == tuple(v * v for v in d.diag)


def test_block_power_rejects_zeroth_power_and_lower_left():
    s = make_spectrum("geometric", 2)
    T = build_T(s)
    with pytest.raises(ValueError, match="non-unital"):
        block_power(T, 0)
    bad = BlockOperator(T.b11, T.b12, DiagonalOperator.ones(2), T.b22)
    with pytest.raises(ValueError, match="lower-left"):
        block_power(bad, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(rationals, rationals, rationals), min_size=1, max_size=3),
       st.integers(min_value=1, max_value=5))
def test_block_power_matches_naive_product(entries, k):
    m = len(entries)
    X = BlockOperator(DiagonalOperator(tuple(e[0] for e in entries)),
                      DiagonalOperator(tuple(e[1] for e in entries)),
                      DiagonalOperator.zeros(m),
                      DiagonalOperator(tuple(e[2] for e in entries)))
    assert dense_exact(block_power(X, k)) == matpow_exact(dense_exact(X), k)


def test_block_power_large_truncation_matches_repeated_multiplication():
    rng = random.Random(3)
    m = 32
    X = BlockOperator(
        DiagonalOperator(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(m))),
        DiagonalOperator(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(m))),
        DiagonalOperator.zeros(m),
        DiagonalOperator(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(m))))
    repeated = X
    for _ in range(15):
        repeated = repeated @ X
    assert (block_power(X, 16) - repeated).is_zero()


def test_apply_poly_matches_naive_dense_sum():
    rng = random.Random(11)
    s = make_spectrum("geometric", 3)
    X = build_shifted_T(s, 2).to_float()
    p = Polynomial((0, Fraction(1, 2), Fraction(-2), Fraction(1, 3)))
    dense = np.array(X.to_dense())
    expected = sum(float(c) * np.linalg.matrix_power(dense, k)
                   for k, c in enumerate(p.coefficients) if k >= 1)
    got = apply_poly_to_block(p.coefficients, X).to_dense()
    assert np.max(np.abs(got - expected)) < 1e-12


def test_apply_poly_rejects_constant_term():
    s = make_spectrum("geometric", 2)
    with pytest.raises(ValueError, match="constant term"):
        apply_poly_to_block((Fraction(1), Fraction(1)), build_T(s))


def test_functional_calculus_entrywise():
    N = DiagonalOperator((Fraction(1, 2), Fraction(1, 4)))
    assert functional_calculus(N, lambda z: z).diag == N.diag
    p = Polynomial((0, 6, -8))
    assert functional_calculus(N, p).diag == (Fraction(1), Fraction(1))


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=4),
       st.lists(rationals, min_size=1, max_size=4),
       st.lists(rationals, min_size=2, max_size=3))
def test_functional_calculus_multiplicative(pc, qc, diag):
    N = DiagonalOperator(tuple(diag))
    p, q = Polynomial(tuple(pc)), Polynomial(tuple(qc))
    product = functional_calculus(N, p * q)
    composed = functional_calculus(N, p) @ functional_calculus(N, q)
    assert product.diag == composed.diag


def test_operator_norm_examples():
    one = DiagonalOperator.ones(1)
    X = BlockOperator.column_block(one, one)
    assert operator_norm(X) == pytest.approx(math.sqrt(2), abs=1e-14)
    diag_only = BlockOperator(DiagonalOperator((3, 1, 2)), DiagonalOperator.zeros(3),
                              DiagonalOperator.zeros(3), DiagonalOperator.zeros(3))
    assert operator_norm(diag_only) == pytest.approx(3.0, abs=1e-12)


def test_operator_norm_closed_form_vs_svd_random():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(1, 9))
        top = DiagonalOperator(tuple(rng.standard_normal(m)))
        bottom = DiagonalOperator(tuple(rng.standard_normal(m)))
        X = BlockOperator.column_block(top, bottom)
        assert abs(operator_norm(X) - spectral_norm_oracle(X.to_dense())) < 1e-10


def test_shifted_generator_blocks():
    s = make_spectrum("geometric", 2)
    X = build_shifted_T(s, 1)
    assert X.b11.diag == (Fraction(1, 2), Fraction(1, 2))
    assert X.b22.diag == (Fraction(0), Fraction(1, 4))
    assert X.b21.is_zero()
    total = (X + build_T(s))
    assert total.b12.is_zero()  # shift plus generator restores the scalar block
