import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import float_min_spread, spread_of
from ramseylab.convexlp import (
    DiracWeight,
    ProbabilityVector,
    SpreadResult,
    convex_ramsey_decide,
    dumps_result,
    halving_lower_bound,
    min_spread,
    natural_split,
    spread,
    spread_oracle_small,
)
from ramseylab.errors import InvalidInput, SizeLimitExceeded
from ramseylab.matrices import EXAMPLE_6X6_ROWS, BinaryMatrix

EX6 = BinaryMatrix.from_rows(EXAMPLE_6X6_ROWS)


def distinct_rows(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.sets(st.tuples(*[st.integers(0, 1)] * c), min_size=1, max_size=min(max_rows, 2**c)).map(sorted)
    )


def test_example_optimum_is_two_thirds():
    res = convex_ramsey_decide(EX6)
    assert res.optimum == Fraction(2, 3)
    assert not res.satisfies
    assert spread(EX6, res.witness) == Fraction(2, 3)


def test_example_dual_certificate():
    # putting +1/3 on columns 1..3 and -1/3 on 4..6 shows every row scores >= 2/3
    arr = EX6.to_array()
    scores = [Fraction(int(r[:3].sum()) - int(r[3:].sum()), 3) for r in arr]
    assert min(scores) == Fraction(2, 3)


def test_constant_row_gives_zero():
    M = BinaryMatrix.from_rows([(1, 0, 1), (1, 1, 1)])
    res = convex_ramsey_decide(M)
    assert res.optimum == 0 and res.satisfies
    assert res.witness.weights == (0, 1)


def test_identity_matrix():
    # uniform weights give a constant vector
    res = min_spread(BinaryMatrix.from_array(np.eye(4, dtype=int)))
    assert res.optimum == 0


def test_duplicate_rows_map_back_to_original_indices():
    M = BinaryMatrix.from_rows(list(EXAMPLE_6X6_ROWS) + [EXAMPLE_6X6_ROWS[3]])
    res = convex_ramsey_decide(M)
    assert res.optimum == Fraction(2, 3)
    assert len(res.witness) == 7
    assert spread(M, res.witness) == Fraction(2, 3)


def test_engines_agree_on_a_mid_size_matrix():
    rng = np.random.default_rng(7)
    M = BinaryMatrix.from_array(rng.integers(0, 2, size=(14, 30)))
    a = min_spread(M, engine="simplex")
    b = min_spread(M, engine="certified")
    assert a.optimum == b.optimum
    assert abs(float(a.optimum) - float_min_spread(M.rows())) < 1e-6


@pytest.mark.slow
def test_certified_engine_on_a_large_matrix():
    rng = np.random.default_rng(11)
    M = BinaryMatrix.from_array(rng.integers(0, 2, size=(120, 120)))
    res = min_spread(M, engine="certified")
    assert spread(M, res.witness) == res.optimum
    assert abs(float(res.optimum) - float_min_spread(M.rows())) < 1e-6


def test_oracle_rejects_large_input():
    with pytest.raises(SizeLimitExceeded):
        spread_oracle_small(BinaryMatrix.from_array(np.zeros((7, 2), dtype=int)))


def test_unknown_engine():
    with pytest.raises(InvalidInput):
        min_spread(EX6, engine="magic")


def test_probability_vector_validation():
    with pytest.raises(InvalidInput):
        ProbabilityVector((Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(InvalidInput):
        ProbabilityVector((Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(InvalidInput):
        DiracWeight(1, 1)


def test_dirac_weights_realize_the_spread():
    P = ProbabilityVector((Fraction(1, 2), Fraction(1, 2), 0, 0, 0, 0))
    from ramseylab.convexlp import row_combination

    v = row_combination(EX6, P)
    best = max(DiracWeight(i, j).apply(v) for i in range(6) for j in range(6) if i != j)
    assert best == spread(EX6, P)


def test_result_json_round_trip():
    res = convex_ramsey_decide(EX6)
    data = json.loads(dumps_result(res))
    assert data["optimum"] == "2/3"
    assert SpreadResult.from_json(data) == res


def test_halving_certificate_on_example():
    cert = halving_lower_bound(EX6, *natural_split(6))
    assert cert.bound == Fraction(2, 3)


def test_halving_decides_large_inputs():
    rng = np.random.default_rng(3)
    n = 300
    arr = np.zeros((n, n), dtype=int)
    arr[:, : n // 2] = 1
    arr ^= rng.random((n, n)) < 0.05
    M = BinaryMatrix.from_array(arr)
    res = convex_ramsey_decide(M, split=natural_split(n))
    assert res.source == "halving" and not res.satisfies
    assert res.lower_bound > Fraction(1, 2)


@pytest.mark.parametrize("cols", [((), (0,)), ((0,), (0, 1)), ((0,), (9,))])
def test_halving_rejects_bad_splits(cols):
    with pytest.raises(InvalidInput):
        halving_lower_bound(EX6, *cols)


@given(distinct_rows())
def test_simplex_matches_vertex_enumeration(rows):
    M = BinaryMatrix.from_rows(rows)
    res = min_spread(M)
    assert res.optimum == spread_oracle_small(M)
    assert spread_of(rows, res.witness.weights) == res.optimum
    assert res.satisfies == (res.optimum <= Fraction(1, 2))


@given(distinct_rows(max_rows=8, max_cols=8), st.randoms(use_true_random=False))
def test_optimum_is_below_any_sampled_spread(rows, rnd):
    M = BinaryMatrix.from_rows(rows)
    opt = min_spread(M).optimum
    for _ in range(5):
        w = [Fraction(rnd.randint(0, 5)) for _ in rows]
        if sum(w) == 0:
            continue
        P = [x / sum(w) for x in w]
        assert spread_of(rows, P) >= opt


@given(distinct_rows(max_rows=10, max_cols=8), st.data())
def test_halving_bound_is_sound(rows, data):
    M = BinaryMatrix.from_rows(rows)
    if M.n_cols < 2:
        return
    cut = data.draw(st.integers(1, M.n_cols - 1))
    cert = halving_lower_bound(M, range(cut), range(cut, M.n_cols))
    assert cert.bound <= min_spread(M).optimum


def test_oracle_equivalence_many_instances():
    rnd = random.Random(5)
    for _ in range(200):
        r, c = rnd.randint(1, 5), rnd.randint(1, 5)
        rows = sorted({tuple(rnd.randint(0, 1) for _ in range(c)) for _ in range(r)})
        M = BinaryMatrix.from_rows(rows)
        assert min_spread(M).optimum == spread_oracle_small(M)
