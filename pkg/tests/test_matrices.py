import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import naive_k_config
from ramseylab.errors import InvalidInput
from ramseylab.matrices import (
    EXAMPLE_6X6_ROWS,
    BinaryMatrix,
    Pattern,
    dedupe_rows,
    format_matrix,
    k_config_check,
    parse_matrix,
    read_matrix,
    write_matrix,
)


def matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def expected_witness(missing):
    """First missing pattern: value descending, then columns ascending."""

    def key(item):
        cols, vals = item
        return (-int("".join(map(str, vals)), 2), cols)

    return min(missing, key=key)


EX6 = BinaryMatrix.from_rows(EXAMPLE_6X6_ROWS)


def test_example_holds_at_k1():
    assert k_config_check(EX6, 1).holds


def test_example_fails_at_k2_with_columns_4_5():
    rep = k_config_check(EX6, 2)
    assert not rep.holds
    assert rep.missing.one_based() == (4, 5)
    assert rep.missing.values == (1, 1)


def test_all_patterns_of_length_three():
    rows = [tuple((i >> b) & 1 for b in range(3)) for i in range(8)]
    assert k_config_check(BinaryMatrix.from_rows(rows), 3).holds


@pytest.mark.parametrize("k", [0, 7])
def test_k_out_of_range(k):
    with pytest.raises(InvalidInput):
        k_config_check(EX6, k)


def test_dedupe_examples():
    M, counts = dedupe_rows(EX6)
    assert M == EX6 and counts == (1,) * 6
    M, counts = dedupe_rows(BinaryMatrix.from_rows([(0, 1), (0, 1)]))
    assert M.rows() == [(0, 1)] and counts == (2,)
    M, counts = dedupe_rows(BinaryMatrix.from_rows([(1, 1), (0, 0), (1, 1)]))
    assert M.rows() == [(1, 1), (0, 0)] and counts == (2, 1)


def test_column_bits_match_rows():
    for j in range(EX6.n_cols):
        col = EX6.column(j)
        assert [(col >> i) & 1 for i in range(EX6.n_rows)] == [r[j] for r in EXAMPLE_6X6_ROWS]


def test_more_than_64_rows_round_trip():
    rng = np.random.default_rng(1)
    arr = rng.integers(0, 2, size=(130, 7))
    M = BinaryMatrix.from_array(arr)
    assert np.array_equal(M.to_array(), arr)
    assert M.complement().to_array().tolist() == (1 - arr).tolist()


def test_text_format_round_trip(tmp_path):
    path = tmp_path / "m.txt"
    write_matrix(EX6, path)
    assert read_matrix(path) == EX6
    assert parse_matrix(format_matrix(EX6)) == EX6


@pytest.mark.parametrize(
    "text",
    ["", "2 2\n01\n", "2 2\n01\n2x\n", "1 2\n011\n", "a b\n01\n"],
)
def test_parser_rejects_bad_text(text):
    with pytest.raises(InvalidInput):
        parse_matrix(text)


def test_entries_must_be_bits():
    with pytest.raises(InvalidInput):
        BinaryMatrix.from_array([[0, 2]])


def test_pattern_validation():
    with pytest.raises(InvalidInput):
        Pattern((2, 1), (0, 0))
    with pytest.raises(InvalidInput):
        Pattern((1,), (0, 1))


@given(matrices(), st.integers(1, 6))
def test_agrees_with_triple_loop(rows, k):
    k = min(k, len(rows[0]))
    rep = k_config_check(BinaryMatrix.from_rows(rows), k)
    holds, missing = naive_k_config(rows, k)
    assert rep.holds == holds
    if not holds:
        assert (rep.missing.columns, rep.missing.values) == expected_witness(missing)


@given(matrices(max_rows=10, max_cols=8), st.integers(1, 8))
def test_condition_is_downward_closed(rows, k):
    M = BinaryMatrix.from_rows(rows)
    k = min(k, M.n_cols)
    if k_config_check(M, k).holds:
        assert all(k_config_check(M, j).holds for j in range(1, k + 1))


@given(matrices(), st.integers(1, 6), st.data())
def test_duplicates_do_not_matter(rows, k, data):
    k = min(k, len(rows[0]))
    i = data.draw(st.integers(0, len(rows) - 1))
    M = BinaryMatrix.from_rows(rows + [rows[i]])
    D, counts = dedupe_rows(M)
    assert sum(counts) == M.n_rows
    assert len(set(D.rows())) == D.n_rows
    assert k_config_check(M, k) == k_config_check(D, k)
