"""Exact combinatorial certificates: convex Ramsey matrices and pre-dimension pseudoplanes."""

from .convexlp import SpreadResult, convex_ramsey_decide, halving_lower_bound, min_spread
from .errors import RamseyLabError
from .matrices import BinaryMatrix, Pattern, dedupe_rows, k_config_check

__all__ = [
    "BinaryMatrix",
    "Pattern",
    "RamseyLabError",
    "SpreadResult",
    "convex_ramsey_decide",
    "dedupe_rows",
    "halving_lower_bound",
    "k_config_check",
    "min_spread",
]
