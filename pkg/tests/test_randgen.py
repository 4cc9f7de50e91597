import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramseylab.errors import OddDimension, ParameterError
from ramseylab.randgen import (
    SWEEP_COLUMNS,
    TrialSpec,
    base_matrix,
    bounds,
    flip_mask,
    kl_divergence,
    perturb,
    run_trial,
    sweep,
    sweep_csv,
    sweep_probability,
)


def test_base_matrix_shape():
    Y = base_matrix(6)
    assert Y.rows() == [(1, 1, 1, 0, 0, 0)] * 6


@pytest.mark.parametrize("n", [0, 3, 7])
def test_odd_or_tiny_dimension(n):
    with pytest.raises(OddDimension):
        base_matrix(n)
    with pytest.raises(OddDimension):
        TrialSpec(n, 2, Fraction(1, 4), 0, 0)


def test_probability_out_of_range():
    with pytest.raises(ParameterError):
        TrialSpec(8, 2, Fraction(5, 4), 0, 0)
    with pytest.raises(ParameterError):
        flip_mask((2, 2), Fraction(-1, 4), 0, 0)


def test_flip_mask_matches_a_direct_stream():
    # entry e uses the e-th raw draw; flip iff draw * den < num * 2**64
    p = Fraction(3, 7)
    mask = flip_mask((5, 6), p, 42, 9)
    raw = np.random.Philox(key=[42, 9]).random_raw(30)
    expected = np.array([int(u) * p.denominator < p.numerator * 2**64 for u in raw]).reshape(5, 6)
    assert np.array_equal(mask, expected)


def test_trial_streams_are_independent_of_order():
    a = [flip_mask((8, 8), Fraction(1, 3), 5, t) for t in range(4)]
    b = [flip_mask((8, 8), Fraction(1, 3), 5, t) for t in reversed(range(4))][::-1]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])


def test_extreme_probabilities():
    Y = base_matrix(8)
    assert perturb(Y, 0, 1, 1) == Y
    assert perturb(Y, 1, 1, 1) == Y.complement()


def test_p_zero_keeps_base_matrix_which_is_not_two_config():
    res = run_trial(TrialSpec(8, 2, Fraction(0), 1, 0))
    assert not res.config_ok
    assert res.convex_failed  # the base matrix has spread exactly 1
    assert res.bound == 1


def test_flip_rate_is_close_to_p():
    mask = flip_mask((200, 200), Fraction(1, 5), 2024, 0)
    # 40000 draws: 5 standard deviations is about 0.01
    assert abs(mask.mean() - 0.2) < 0.01


def test_sweep_probability_rounding():
    p = sweep_probability(1024, 2, Fraction("0.2356"))
    assert p.denominator <= 10**6
    assert abs(float(p) - 1024 ** (-0.5 + 0.2356)) < 1e-6


def test_sweep_rejects_eps_outside_range():
    with pytest.raises(ParameterError):
        sweep([8], 2, Fraction(1, 2), 1, 0)
    with pytest.raises(ParameterError):
        sweep([8], 2, 0, 1, 0)


def test_empty_sweep_is_header_only():
    assert sweep_csv(sweep([], 2, Fraction(1, 5), 3, 0)) == ",".join(SWEEP_COLUMNS) + "\n"


def test_sweep_is_deterministic_and_parses():
    a = sweep_csv(sweep([16, 32], 2, Fraction(1, 5), 4, 11))
    b = sweep_csv(sweep([16, 32], 2, Fraction(1, 5), 4, 11))
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert [int(r["n"]) for r in rows] == [16, 32]
    for r in rows:
        assert int(r["both"]) <= min(int(r["config_ok"]), int(r["convex_failed"])) <= int(r["trials"]) == 4


def test_kl_known_value():
    expected = 0.25 * math.log(2) + 0.75 * math.log(0.75 / 0.875)
    assert kl_divergence(0.25, 0.125) == pytest.approx(expected, rel=1e-12)
    assert kl_divergence(0.25, 0.125) == pytest.approx(0.0577, abs=5e-5)


def test_bounds_union_term():
    rep = bounds(1024, Fraction(4, 25), Fraction(1, 4))
    assert rep.config_union_bound == pytest.approx(2 * 1024 * 1023 * math.exp(-(0.16**2) * 1024))
    assert rep.config_union_bound == pytest.approx(8.8e-6, rel=0.05)
    assert rep.flip_tail_bound is not None and rep.flip_tail_bound < 1e-6


def test_bounds_tail_absent_below_mean():
    assert bounds(100, 0.3, 0.2).flip_tail_bound is None


@pytest.mark.parametrize("args", [(0, 0.1, 0.2), (10, 0, 0.2), (10, 0.1, 1)])
def test_bounds_parameter_errors(args):
    with pytest.raises(ParameterError):
        bounds(*args)


@given(st.floats(0, 1), st.floats(0.01, 0.99))
def test_kl_is_nonnegative_and_zero_at_equality(x, y):
    assert kl_divergence(x, y) >= -1e-12
    assert kl_divergence(y, y) == pytest.approx(0, abs=1e-12)


@given(st.integers(1, 8).map(lambda h: 2 * h), st.fractions(0, 1, max_denominator=50), st.integers(0, 2**32))
def test_perturbation_counts_match_mask(n, p, seed):
    Y = base_matrix(n)
    X = perturb(Y, p, seed, 0)
    mask = flip_mask(Y.shape, p, seed, 0)
    assert np.array_equal(X.to_array() ^ Y.to_array(), mask.astype(np.uint8))
