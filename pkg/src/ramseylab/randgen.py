"""Random perturbations of the half-ones matrix and Monte-Carlo sweeps.

Randomness comes from numpy's Philox4x64 counter-based generator.  The key is
``(seed, trial_index)`` and the n-th raw 64-bit output of the stream drives
matrix entry ``n = i * n_cols + j``.  An entry flips when
``u * p_den < p_num * 2**64``, an exact integer test.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .convexlp import convex_ramsey_decide, natural_split
from .errors import InvalidInput, OddDimension, ParameterError
from .matrices import BinaryMatrix, k_config_check

P_DENOMINATOR = 10**6
SWEEP_COLUMNS = ("n", "p_num", "p_den", "trials", "config_ok", "convex_failed", "both", "mean_flip_fraction")


@dataclass(frozen=True)
class TrialSpec:
    n: int
    k: int
    p: Fraction
    seed: int
    trial_index: int

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.n < 2 or self.n % 2:
            raise OddDimension(f"n must be even and at least 2, got {self.n}")
        if not 0 <= self.p <= 1:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        if self.k < 1:
            raise InvalidInput("k must be positive")


@dataclass(frozen=True)
class TrialResult:
    config_ok: bool
    convex_failed: bool
    verdict_source: str
    flip_counts: tuple[int, ...]
    elapsed: float
    bound: Fraction | None = None

    @property
    def both(self) -> bool:
        return self.config_ok and self.convex_failed

    def flip_fraction(self) -> float:
        n = len(self.flip_counts)
        return sum(self.flip_counts) / (n * n) if n else 0.0

    def to_json(self) -> dict:
        return {
            "config_ok": self.config_ok,
            "convex_failed": self.convex_failed,
            "verdict_source": self.verdict_source,
            "flip_counts": list(self.flip_counts),
            "bound": None if self.bound is None else f"{self.bound.numerator}/{self.bound.denominator}",
        }


@dataclass(frozen=True)
class BoundsReport:
    config_union_bound: float
    kl: float
    flip_tail_bound: float | None  # None when t <= p, where the tail bound does not apply

    def to_json(self) -> dict:
        return {
            "config_union_bound": self.config_union_bound,
            "kl": self.kl,
            "flip_tail_bound": self.flip_tail_bound,
        }


def base_matrix(n: int) -> BinaryMatrix:
    if n < 2 or n % 2:
        raise OddDimension(f"n must be even and at least 2, got {n}")
    arr = np.zeros((n, n), dtype=np.uint8)
    arr[:, : n // 2] = 1
    return BinaryMatrix.from_array(arr)


def flip_mask(shape: tuple[int, int], p: Fraction, seed: int, trial_index: int) -> np.ndarray:
    """Boolean mask of flipped entries for one ``(seed, trial_index)`` stream."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    n_rows, n_cols = shape
    if p == 0:
        return np.zeros(shape, dtype=bool)
    if p == 1:
        return np.ones(shape, dtype=bool)
    key = [seed & (2**64 - 1), trial_index & (2**64 - 1)]
    raw = np.random.Philox(key=key).random_raw(n_rows * n_cols).astype(np.uint64)
    # u * p_den < p_num * 2**64  <=>  u < ceil(p_num * 2**64 / p_den)
    threshold = -(-(p.numerator << 64) // p.denominator)
    return (raw < np.uint64(threshold)).reshape(shape)


def perturb(Y: BinaryMatrix, p, seed: int, trial_index: int) -> BinaryMatrix:
    mask = flip_mask(Y.shape, Fraction(p), seed, trial_index)
    return BinaryMatrix.from_array(Y.to_array() ^ mask.astype(np.uint8))


def run_trial(spec: TrialSpec) -> TrialResult:
    if spec.k > spec.n:
        raise InvalidInput(f"k={spec.k} exceeds n_cols={spec.n}")
    start = time.perf_counter()
    Y = base_matrix(spec.n)
    mask = flip_mask(Y.shape, spec.p, spec.seed, spec.trial_index)
    X = BinaryMatrix.from_array(Y.to_array() ^ mask.astype(np.uint8))
    config = k_config_check(X, spec.k)
    verdict = convex_ramsey_decide(X, split=natural_split(spec.n))
    return TrialResult(
        config_ok=config.holds,
        convex_failed=not verdict.satisfies,
        verdict_source=verdict.source,
        flip_counts=tuple(int(c) for c in mask.sum(axis=1)),
        elapsed=time.perf_counter() - start,
        bound=verdict.lower_bound if verdict.lower_bound is not None else verdict.optimum,
    )


def sweep_probability(n: int, k: int, eps: Fraction) -> Fraction:
    """``n ** (-1/k + eps)`` rounded to a rational with denominator 10**6."""
    exponent = -1.0 / k + float(eps)
    return Fraction(round(n**exponent * P_DENOMINATOR), P_DENOMINATOR)


@dataclass
class SweepRow:
    n: int
    p: Fraction
    trials: int = 0
    config_ok: int = 0
    convex_failed: int = 0
    both: int = 0
    flip_fraction_sum: float = 0.0
    results: list[TrialResult] = field(default_factory=list, repr=False)

    @property
    def mean_flip_fraction(self) -> float:
        return self.flip_fraction_sum / self.trials if self.trials else 0.0

    def rate(self, name: str) -> float:
        return getattr(self, name) / self.trials if self.trials else 0.0

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "p_num": self.p.numerator,
            "p_den": self.p.denominator,
            "trials": self.trials,
            "config_ok": self.config_ok,
            "convex_failed": self.convex_failed,
            "both": self.both,
            "mean_flip_fraction": f"{self.mean_flip_fraction:.6f}",
        }


def sweep(n_list: Sequence[int], k: int, eps, trials: int, seed: int) -> list[SweepRow]:
    """Run ``trials`` trials per n with ``p = n ** (-1/k + eps)``.

    Trial ``t`` for size ``n`` uses stream key ``(seed, t)``; counts are
    aggregated in trial order, so results do not depend on scheduling.
    """
    eps = Fraction(eps)
    if eps <= 0 or eps >= Fraction(1, k):
        raise ParameterError(f"eps must satisfy 0 < eps < 1/k, got {eps}")
    if trials < 0:
        raise ParameterError("trials must be nonnegative")
    rows = []
    for n in n_list:
        p = sweep_probability(n, k, eps)
        row = SweepRow(n, p)
        for t in range(trials):
            res = run_trial(TrialSpec(n, k, p, seed, t))
            row.trials += 1
            row.config_ok += res.config_ok
            row.convex_failed += res.convex_failed
            row.both += res.both
            row.flip_fraction_sum += res.flip_fraction()
            row.results.append(res)
        rows.append(row)
    return rows


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()


def kl_divergence(x: float, y: float) -> float:
    """Bernoulli relative entropy ``D(x || y)`` in nats."""
    if not (0 < y < 1) or not (0 <= x <= 1):
        raise ParameterError("need 0 <= x <= 1 and 0 < y < 1")

    def term(a, b):
        return 0.0 if a == 0 else a * math.log(a / b)

    return term(x, y) + term(1 - x, 1 - y)


def bounds(n: int, p, t) -> BoundsReport:
    p, t = float(p), float(t)
    if not 0 < p < 1 or not 0 < t < 1:
        raise ParameterError("need 0 < p < 1 and 0 < t < 1")
    if n < 1:
        raise ParameterError("n must be positive")
    union = 2 * n * (n - 1) * math.exp(-p * p * n)
    kl = kl_divergence(t, p)
    tail = n * math.exp(-n * kl) if t > p else None
    return BoundsReport(union, kl, tail)
