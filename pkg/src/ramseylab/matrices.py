"""0/1 matrices stored as column bitsets, and the k-configuration check.

Rows are colorings, columns are point positions.  Column ``j`` is kept as a
little-endian array of 64-bit words whose bit ``i`` is the entry in row ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput

# The 6x6 matrix that satisfies 1-configuration but not the convex Ramsey
# condition.
EXAMPLE_6X6_ROWS = (
    (1, 1, 1, 1, 0, 0),
    (1, 1, 1, 0, 1, 0),
    (1, 1, 1, 0, 0, 1),
    (0, 1, 1, 0, 0, 0),
    (1, 0, 1, 0, 0, 0),
    (1, 1, 0, 0, 0, 0),
)


def _pack_columns(arr: np.ndarray) -> np.ndarray:
    n_rows, n_cols = arr.shape
    n_words = (n_rows + 63) // 64
    packed = np.packbits(arr.T.astype(bool), axis=1, bitorder="little")
    padded = np.zeros((n_cols, n_words * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64)


class BinaryMatrix:
    """Immutable 0/1 matrix with column-major bit storage."""

    __slots__ = ("_n_rows", "_n_cols", "_words", "_valid")

    def __init__(self, n_rows: int, n_cols: int, words: np.ndarray):
        if n_rows < 1 or n_cols < 1:
            raise InvalidInput(f"matrix must be at least 1x1, got {n_rows}x{n_cols}")
        n_words = (n_rows + 63) // 64
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.shape != (n_cols, n_words):
            raise InvalidInput(f"word array has shape {words.shape}, expected {(n_cols, n_words)}")
        valid = np.full(n_words, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        tail = n_rows % 64
        if tail:
            valid[-1] = np.uint64((1 << tail) - 1)
        words = words & valid
        words.setflags(write=False)
        valid.setflags(write=False)
        self._n_rows = n_rows
        self._n_cols = n_cols
        self._words = words
        self._valid = valid

    @classmethod
    def from_array(cls, arr) -> "BinaryMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise InvalidInput("expected a 2-d array")
        if a.size and not np.isin(a, (0, 1)).all():
            raise InvalidInput("entries must be 0 or 1")
        return cls(a.shape[0], a.shape[1], _pack_columns(a))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "BinaryMatrix":
        rows = [tuple(r) for r in rows]
        if not rows or not rows[0]:
            raise InvalidInput("matrix must be at least 1x1")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidInput("ragged rows")
        return cls.from_array(np.array(rows, dtype=np.int64))

    @property
    def n_rows(self) -> int:
        return self._n_rows

    @property
    def n_cols(self) -> int:
        return self._n_cols

    @property
    def shape(self) -> tuple[int, int]:
        return self._n_rows, self._n_cols

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def valid_mask(self) -> np.ndarray:
        return self._valid

    def column(self, j: int) -> int:
        """Column ``j`` as a Python int whose bit ``i`` is row ``i``."""
        return int.from_bytes(self._words[j].astype("<u8").tobytes(), "little")

    def to_array(self) -> np.ndarray:
        bytes_ = self._words.astype("<u8").view(np.uint8)
        bits = np.unpackbits(bytes_, axis=1, bitorder="little")[:, : self._n_rows]
        return bits.T.astype(np.uint8)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in r) for r in self.to_array()]

    def complement(self) -> "BinaryMatrix":
        return BinaryMatrix(self._n_rows, self._n_cols, ~self._words)

    def xor(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.shape != self.shape:
            raise InvalidInput("shape mismatch")
        return BinaryMatrix(self._n_rows, self._n_cols, self._words ^ other._words)

    def select_rows(self, indices: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix.from_array(self.to_array()[list(indices)])

    def select_columns(self, indices: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix(self._n_rows, len(indices), self._words[list(indices)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.shape, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self._n_rows}x{self._n_cols})"


@dataclass(frozen=True)
class Pattern:
    """A choice of k increasing columns (0-based) and the bits wanted there."""

    columns: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.values):
            raise InvalidInput("columns and values differ in length")
        if any(b >= a for a, b in zip(self.columns[1:], self.columns)):
            raise InvalidInput("columns must be strictly increasing")

    def one_based(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.columns)


@dataclass(frozen=True)
class ConfigReport:
    holds: bool
    missing: Pattern | None = None


def _witness_key(values: tuple[int, ...], columns: tuple[int, ...]):
    # all-ones pattern first, then column tuples ascending
    value = int("".join(map(str, values)), 2) if values else 0
    return (-value, columns)


def k_config_check(M: BinaryMatrix, k: int) -> ConfigReport:
    """Decide the k-configuration exhibition condition.

    For every k columns and every k-bit pattern some row must realize the
    pattern.  Realized patterns are found by AND-ing column bitsets (and their
    complements); the last column of each tuple is handled as a vector over
    all candidate columns at once.

    When the condition fails, ``missing`` is the first unrealized pattern in
    the order: pattern value descending (all ones first, first column is the
    most significant bit), then column tuple ascending.
    """
    if not 1 <= k <= M.n_cols:
        raise InvalidInput(f"k must satisfy 1 <= k <= n_cols={M.n_cols}, got {k}")
    words = M.words
    valid = M.valid_mask
    best = None

    def consider(values, columns):
        nonlocal best
        key = _witness_key(values, columns)
        if best is None or key < best:
            best = key

    for prefix in combinations(range(M.n_cols - 1), k - 1):
        start = prefix[-1] + 1 if prefix else 0
        if start >= M.n_cols:
            continue
        tail = words[start:]
        for prefix_bits in range(1 << (k - 1)):
            values = tuple((prefix_bits >> (k - 2 - i)) & 1 for i in range(k - 1))
            mask = valid.copy()
            for col, bit in zip(prefix, values):
                mask &= words[col] if bit else ~words[col]
            if not mask.any():
                consider(values + (1,), prefix + (start,))
                continue
            has_one = (tail & mask).any(axis=1)
            has_zero = (~tail & mask).any(axis=1)
            miss1 = np.flatnonzero(~has_one)
            if miss1.size:
                consider(values + (1,), prefix + (start + int(miss1[0]),))
            miss0 = np.flatnonzero(~has_zero)
            if miss0.size:
                consider(values + (0,), prefix + (start + int(miss0[0]),))
    if best is None:
        return ConfigReport(True, None)
    neg_value, columns = best
    value = -neg_value
    bits = tuple((value >> (k - 1 - i)) & 1 for i in range(k))
    return ConfigReport(False, Pattern(columns, bits))


def unique_row_indices(M: BinaryMatrix) -> tuple[list[int], list[int]]:
    """Indices of first occurrences of each distinct row, and their counts."""
    first: dict[bytes, int] = {}
    order: list[int] = []
    counts: list[int] = []
    for i, row in enumerate(M.to_array()):
        key = row.tobytes()
        if key in first:
            counts[first[key]] += 1
        else:
            first[key] = len(order)
            order.append(i)
            counts.append(1)
    return order, counts


def dedupe_rows(M: BinaryMatrix) -> tuple[BinaryMatrix, tuple[int, ...]]:
    """Drop repeated rows, keeping first occurrences in order."""
    order, counts = unique_row_indices(M)
    if len(order) == M.n_rows:
        return M, tuple(counts)
    return M.select_rows(order), tuple(counts)


def parse_matrix(text: str) -> BinaryMatrix:
    """Parse ``<n_rows> <n_cols>`` followed by rows of 0/1 characters."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise InvalidInput("empty matrix text")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise InvalidInput(f"bad header line {lines[0]!r}")
    n_rows, n_cols = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != n_rows:
        raise InvalidInput(f"expected {n_rows} rows, found {len(body)}")
    rows = []
    for ln in body:
        if len(ln) != n_cols or set(ln) - {"0", "1"}:
            raise InvalidInput(f"bad matrix row {ln!r}")
        rows.append([int(ch) for ch in ln])
    return BinaryMatrix.from_rows(rows)


def format_matrix(M: BinaryMatrix) -> str:
    out = [f"{M.n_rows} {M.n_cols}"]
    out.extend("".join(str(int(x)) for x in row) for row in M.to_array())
    return "\n".join(out) + "\n"


def read_matrix(path) -> BinaryMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(M: BinaryMatrix, path) -> None:
    Path(path).write_text(format_matrix(M))
