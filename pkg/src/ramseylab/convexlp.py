"""Exact decision of the convex Ramsey condition.

A 0/1 matrix M satisfies the condition when some probability vector P over
its rows makes ``P @ M`` have spread (max minus min) at most 1/2.  Over all
Dirac weights W the largest ``P @ M @ W`` is exactly that spread, so the
question is the linear program

    minimize  u - l   subject to   l <= (P @ M)_j <= u,   P in the simplex.

Its value is reported exactly.  Small programs run through a rational simplex
with Bland's rule.  Larger ones are solved in floating point first; the
optimal primal and dual supports are then re-solved exactly and accepted only
if the exact primal spread equals the exact dual bound, which proves
optimality.  If that certificate cannot be formed the rational simplex runs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

import numpy as np

from .errors import InvalidInput, SizeLimitExceeded
from .matrices import BinaryMatrix, unique_row_indices

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)
EXACT_LP_ROW_LIMIT = 256
SIMPLEX_ONLY_CELLS = 400


@dataclass(frozen=True)
class ProbabilityVector:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if any(x < 0 for x in w):
            raise InvalidInput("negative probability")
        if sum(w) != 1:
            raise InvalidInput("probabilities must sum to 1")

    @classmethod
    def point_mass(cls, size: int, index: int) -> "ProbabilityVector":
        return cls(tuple(Fraction(int(i == index)) for i in range(size)))

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class DiracWeight:
    plus: int
    minus: int

    def __post_init__(self):
        if self.plus == self.minus:
            raise InvalidInput("Dirac weight needs distinct columns")

    def apply(self, vector: Sequence[Fraction]) -> Fraction:
        return vector[self.plus] - vector[self.minus]


@dataclass(frozen=True)
class SpreadResult:
    """Outcome of a spread minimization or a convex Ramsey decision.

    ``optimum`` and ``witness`` are absent only when the verdict came from a
    halving certificate, in which case ``lower_bound`` holds the certified
    bound.
    """

    optimum: Fraction | None
    witness: ProbabilityVector | None
    satisfies: bool
    source: str = "lp"
    lower_bound: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "optimum": fraction_str(self.optimum) if self.optimum is not None else None,
            "satisfies": self.satisfies,
            "witness": [fraction_str(x) for x in self.witness.weights] if self.witness else None,
            "source": self.source,
        }
        if self.lower_bound is not None:
            out["lower_bound"] = fraction_str(self.lower_bound)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SpreadResult":
        opt = data.get("optimum")
        wit = data.get("witness")
        lb = data.get("lower_bound")
        return cls(
            optimum=parse_fraction(opt) if opt is not None else None,
            witness=ProbabilityVector(tuple(parse_fraction(x) for x in wit)) if wit else None,
            satisfies=bool(data["satisfies"]),
            source=data.get("source", "lp"),
            lower_bound=parse_fraction(lb) if lb is not None else None,
        )


@dataclass(frozen=True)
class HalvingCertificate:
    left_cols: tuple[int, ...]
    right_cols: tuple[int, ...]
    bound: Fraction


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def dumps_result(result: SpreadResult) -> str:
    return json.dumps(result.to_json(), sort_keys=True)


def row_combination(M: BinaryMatrix, P: ProbabilityVector | Sequence[Fraction]) -> list[Fraction]:
    """Exact ``P @ M`` using a common denominator."""
    weights = P.weights if isinstance(P, ProbabilityVector) else tuple(Fraction(x) for x in P)
    if len(weights) != M.n_rows:
        raise InvalidInput("probability vector length must equal n_rows")
    den = lcm(*(w.denominator for w in weights)) if weights else 1
    nums = [w.numerator * (den // w.denominator) for w in weights]
    arr = M.to_array()
    support = [i for i, x in enumerate(nums) if x]
    out = []
    for j in range(M.n_cols):
        col = arr[:, j]
        out.append(Fraction(sum(nums[i] for i in support if col[i]), den))
    return out


def spread(M: BinaryMatrix, P) -> Fraction:
    v = row_combination(M, P)
    return max(v) - min(v)


def constant_row(M: BinaryMatrix) -> int | None:
    arr = M.to_array()
    hits = np.flatnonzero((arr == arr[:, :1]).all(axis=1))
    return int(hits[0]) if hits.size else None


# --- rational simplex --------------------------------------------------------


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = T[r]
    piv = row[c]
    if piv != 1:
        inv = 1 / piv
        T[r] = row = [x * inv if x else x for x in row]
    nz = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for j in nz:
                other[j] -= f * row[j]
    basis[r] = c


def _bland(T: list[list[Fraction]], basis: list[int], cost: list[Fraction], allowed: int) -> None:
    """Run Bland's rule on tableau ``T`` (last column is the rhs)."""
    rhs = len(T[0]) - 1
    while True:
        reduced = list(cost[:allowed])
        for r, b in enumerate(basis):
            cb = cost[b]
            if cb:
                row = T[r]
                for j in range(allowed):
                    if row[j]:
                        reduced[j] -= cb * row[j]
        enter = next((j for j in range(allowed) if reduced[j] < 0), None)
        if enter is None:
            return
        best = None
        for r, row in enumerate(T):
            a = row[enter]
            if a > 0:
                key = (row[rhs] / a, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise RuntimeError("unbounded program")  # cannot happen: spread is in [0, 1]
        _pivot(T, basis, best[1], enter)


def _simplex_spread(M: BinaryMatrix) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact two-phase simplex on the spread program.

    Columns: P (n), u, l, upper slacks (m), lower slacks (m), one artificial.
    u and l are kept nonnegative, which loses nothing since P @ M is.
    """
    arr = M.to_array()
    n, m = arr.shape
    n_var = n + 2 + 2 * m
    art = n_var
    width = n_var + 2
    zero, one = Fraction(0), Fraction(1)
    T: list[list[Fraction]] = []
    basis: list[int] = []
    for j in range(m):
        row = [zero] * width
        for i in range(n):
            if arr[i, j]:
                row[i] = one
        row[n] = -one
        row[n + 2 + j] = one
        T.append(row)
        basis.append(n + 2 + j)
    for j in range(m):
        row = [zero] * width
        for i in range(n):
            if arr[i, j]:
                row[i] = -one
        row[n + 1] = one
        row[n + 2 + m + j] = one
        T.append(row)
        basis.append(n + 2 + m + j)
    row = [zero] * width
    for i in range(n):
        row[i] = one
    row[art] = one
    row[-1] = one
    T.append(row)
    basis.append(art)

    phase1 = [zero] * (n_var + 1)
    phase1[art] = one
    _bland(T, basis, phase1, n_var + 1)
    r_art = basis.index(art) if art in basis else None
    if r_art is not None:
        if T[r_art][-1] != 0:
            raise RuntimeError("simplex is empty")  # unreachable
        c = next(j for j in range(n_var) if T[r_art][j])
        _pivot(T, basis, r_art, c)

    phase2 = [zero] * (n_var + 1)
    phase2[n] = one
    phase2[n + 1] = -one
    _bland(T, basis, phase2, n_var)
    x = [zero] * n_var
    for r, b in enumerate(basis):
        if b < n_var:
            x[b] = T[r][-1]
    return x[n] - x[n + 1], tuple(x[:n])


# --- float presolve with exact certificate -----------------------------------


def _float_lp(arr: np.ndarray):
    from scipy.optimize import linprog

    n, m = arr.shape
    c = np.zeros(n + 2)
    c[n], c[n + 1] = 1.0, -1.0
    upper = np.hstack([arr.T, -np.ones((m, 1)), np.zeros((m, 1))])
    lower = np.hstack([-arr.T, np.zeros((m, 1)), np.ones((m, 1))])
    a_eq = np.zeros((1, n + 2))
    a_eq[0, :n] = 1.0
    res = linprog(
        c,
        A_ub=np.vstack([upper, lower]),
        b_ub=np.zeros(2 * m),
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)] * 2,
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return None
    marg = np.abs(res.ineqlin.marginals)
    return res.x[:n], marg[:m], marg[m:]


def _independent_rows(A: np.ndarray, count: int) -> list[int] | None:
    from scipy.linalg import qr

    if A.shape[0] < count:
        return None
    _, R, piv = qr(A.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    if diag.size < count or diag[count - 1] < 1e-9 * max(1.0, diag[0]):
        return None
    return sorted(int(i) for i in piv[:count])


def _exact_solve(A: np.ndarray, b: np.ndarray) -> list[Fraction] | None:
    """Solve the square integer system ``A x = b`` exactly (None if singular)."""
    try:
        import flint
    except ImportError:  # pragma: no cover - flint is a declared dependency
        return _fraction_solve(A, b)
    try:
        x = flint.fmpz_mat(A.astype(int).tolist()).solve(flint.fmpz_mat([[int(v)] for v in b]))
    except ZeroDivisionError:
        return None
    return [Fraction(int(x[i, 0].p), int(x[i, 0].q)) for i in range(A.shape[0])]


def _fraction_solve(A, b) -> list[Fraction] | None:
    n = len(A)
    rows = [[Fraction(int(v)) for v in A[i]] + [Fraction(int(b[i]))] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col]), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


def _certify(arr: np.ndarray, P: np.ndarray, qp: np.ndarray, qm: np.ndarray, tol: float, paired: bool = False):
    """Exact optimum and witness from a float primal/dual pair, or None.

    Active sets are read off each solution by tolerance.  With ``paired``
    they come from the other solution's support instead (complementary
    slackness), which survives a float solve that is slightly off.
    """
    n, m = arr.shape
    PM = P @ arr
    v = arr @ (qp - qm)
    Jp = np.flatnonzero(qp > tol)
    Jm = np.flatnonzero(qm > tol)
    if paired:
        S = np.flatnonzero(v <= v.min() + tol)
        top, bot = Jp, Jm
    else:
        S = np.flatnonzero(P > tol)
        top = np.flatnonzero(PM >= PM.max() - tol)
        bot = np.flatnonzero(PM <= PM.min() + tol)
    if S.size == 0:
        return None
    # unknowns: P_S, u, l
    eqs = [np.concatenate([arr[S, j], [-1, 0]]) for j in top]
    eqs += [np.concatenate([arr[S, j], [0, -1]]) for j in bot]
    eqs.append(np.concatenate([np.ones(S.size), [0, 0]]))
    A = np.array(eqs, dtype=float)
    rhs = np.zeros(len(eqs))
    rhs[-1] = 1
    pick = _independent_rows(A, S.size + 2)
    if pick is None:
        return None
    sol = _exact_solve(A[pick], rhs[pick])
    if sol is None or any(x < 0 for x in sol[: S.size]):
        return None
    weights = [Fraction(0)] * n
    for i, x in zip(S, sol):
        weights[int(i)] = x
    if sum(weights) != 1:
        return None

    if Jp.size == 0 or Jm.size == 0:
        return None
    low = np.flatnonzero(P > tol) if paired else np.flatnonzero(v <= v.min() + tol)
    # unknowns: q+_{Jp}, q-_{Jm}, t
    deqs = [np.concatenate([arr[i, Jp], -arr[i, Jm], [-1]]) for i in low]
    deqs.append(np.concatenate([np.ones(Jp.size), np.zeros(Jm.size), [0]]))
    deqs.append(np.concatenate([np.zeros(Jp.size), np.ones(Jm.size), [0]]))
    D = np.array(deqs, dtype=float)
    drhs = np.zeros(len(deqs))
    drhs[-2:] = 1
    dpick = _independent_rows(D, Jp.size + Jm.size + 1)
    if dpick is None:
        return None
    dsol = _exact_solve(D[dpick], drhs[dpick])
    if dsol is None or any(x < 0 for x in dsol[: Jp.size + Jm.size]):
        return None
    q = [Fraction(0)] * m
    for j, x in zip(Jp, dsol[: Jp.size]):
        q[int(j)] += x
    for j, x in zip(Jm, dsol[Jp.size : Jp.size + Jm.size]):
        q[int(j)] -= x
    if sum(dsol[: Jp.size]) != 1 or sum(dsol[Jp.size : Jp.size + Jm.size]) != 1:
        return None

    upper = spread(BinaryMatrix.from_array(arr), weights)
    den = lcm(*(x.denominator for x in q))
    qn = [x.numerator * (den // x.denominator) for x in q]
    lower = Fraction(min(sum(qn[j] for j in range(m) if arr[i, j]) for i in range(n)), den)
    if upper != lower:
        return None
    return upper, tuple(weights)


def _certified_float(M: BinaryMatrix):
    arr = M.to_array().astype(float)
    sol = _float_lp(arr)
    if sol is None:
        return None
    for paired in (False, True):
        for tol in (1e-9, 1e-7, 1e-11, 1e-5):
            got = _certify(arr, *sol, tol, paired)
            if got is not None:
                return got
    return None


def min_spread(M: BinaryMatrix, engine: str = "auto") -> SpreadResult:
    """Minimum over probability vectors P of the spread of ``P @ M``, exactly.

    ``engine`` is ``"simplex"`` (rational Bland simplex), ``"certified"``
    (float solve plus exact primal/dual certificate, falling back to the
    simplex) or ``"auto"``.
    """
    if engine not in ("auto", "simplex", "certified"):
        raise InvalidInput(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "simplex" if M.n_rows * M.n_cols <= SIMPLEX_ONLY_CELLS else "certified"
    got = None
    source = "lp"
    if engine == "certified":
        got = _certified_float(M)
        if got is None:
            log.warning("exact certificate failed for %s; running rational simplex", M)
    if got is None:
        got = _simplex_spread(M)
    optimum, weights = got
    witness = ProbabilityVector(weights)
    check = spread(M, witness)
    if check != optimum:
        raise AssertionError(f"witness spread {check} differs from optimum {optimum}")
    return SpreadResult(optimum, witness, optimum <= HALF, source)


def halving_lower_bound(M: BinaryMatrix, left_cols, right_cols) -> HalvingCertificate:
    """Lower bound on every achievable spread from one left/right column split.

    For any P the spread is at least the mean of ``P @ M`` over the left
    columns minus its mean over the right columns, and that difference is a
    convex combination of the per-row differences.
    """
    left = tuple(sorted(set(int(c) for c in left_cols)))
    right = tuple(sorted(set(int(c) for c in right_cols)))
    if not left or not right:
        raise InvalidInput("column sets must be nonempty")
    if set(left) & set(right):
        raise InvalidInput("column sets overlap")
    if min(left + right) < 0 or max(left + right) >= M.n_cols:
        raise InvalidInput("column index out of range")
    arr = M.to_array().astype(np.int64)
    lsum = arr[:, list(left)].sum(axis=1)
    rsum = arr[:, list(right)].sum(axis=1)
    # compare lsum/|L| - rsum/|R| as integers over |L||R|
    scaled = lsum * len(right) - rsum * len(left)
    bound = Fraction(int(scaled.min()), len(left) * len(right))
    return HalvingCertificate(left, right, bound)


def natural_split(n_cols: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    half = n_cols // 2
    return tuple(range(half)), tuple(range(half, n_cols))


def convex_ramsey_decide(
    M: BinaryMatrix,
    split: tuple[Sequence[int], Sequence[int]] | None = None,
    exact_limit: int = EXACT_LP_ROW_LIMIT,
    engine: str = "auto",
) -> SpreadResult:
    """Decide the convex Ramsey condition for M.

    Repeated rows are dropped first.  A constant row settles the question at
    once.  Above ``exact_limit`` distinct rows, a halving certificate on
    ``split`` is tried before the linear program.  The witness, when present,
    is indexed by the rows of the original M.
    """
    order, _ = unique_row_indices(M)
    D = M.select_rows(order) if len(order) < M.n_rows else M
    c = constant_row(D)
    if c is not None:
        return SpreadResult(Fraction(0), ProbabilityVector.point_mass(M.n_rows, order[c]), True, "constant-row")
    if split is not None and D.n_rows > exact_limit:
        cert = halving_lower_bound(D, *split)
        if cert.bound > HALF:
            return SpreadResult(None, None, False, "halving", lower_bound=cert.bound)
    res = min_spread(D, engine=engine)
    weights = [Fraction(0)] * M.n_rows
    for r, w in zip(order, res.witness.weights):
        weights[r] = w
    return SpreadResult(res.optimum, ProbabilityVector(tuple(weights)), res.satisfies, "lp")


# --- independent oracle -------------------------------------------------------

ORACLE_MAX = 6


def _gauss(rows: list[list[Fraction]]) -> list[Fraction] | None:
    n = len(rows)
    rows = [r[:] for r in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


def spread_oracle_small(M: BinaryMatrix) -> Fraction:
    """Optimal spread by enumerating every basic solution of the polyhedron.

    Variables are (P, u, l).  A vertex makes the equality sum(P) = 1 and
    n + 1 of the inequalities P_i >= 0, u >= (P @ M)_j, (P @ M)_j >= l tight.
    Candidates are screened in floating point (their determinants are
    integers, so singularity is unambiguous) and the best ones are re-solved
    and re-checked with rationals.  Shares no code with the simplex.
    """
    n, m = M.shape
    if n > ORACLE_MAX or m > ORACLE_MAX:
        raise SizeLimitExceeded(f"oracle handles at most {ORACLE_MAX}x{ORACLE_MAX}, got {n}x{m}")
    arr = M.to_array().astype(np.int64)
    dim = n + 2
    G = []  # each row g means g . z >= 0
    for i in range(n):
        g = np.zeros(dim, dtype=np.int64)
        g[i] = 1
        G.append(g)
    for j in range(m):
        g = np.zeros(dim, dtype=np.int64)
        g[:n] = -arr[:, j]
        g[n] = 1
        G.append(g)
    for j in range(m):
        g = np.zeros(dim, dtype=np.int64)
        g[:n] = arr[:, j]
        g[n + 1] = -1
        G.append(g)
    G = np.array(G)
    eq = np.zeros(dim, dtype=np.int64)
    eq[:n] = 1

    combos = np.array(list(combinations(range(len(G)), n + 1)), dtype=np.int64)
    mats = np.empty((len(combos), dim, dim), dtype=np.float64)
    mats[:, : n + 1, :] = G[combos]
    mats[:, n + 1, :] = eq
    det = np.linalg.det(mats)
    ok = np.abs(det) > 0.5
    mats, combos = mats[ok], combos[ok]
    rhs = np.zeros((len(mats), dim))
    rhs[:, n + 1] = 1.0
    Z = np.linalg.solve(mats, rhs[..., None])[..., 0]
    feas = (Z @ G.T.astype(float) >= -1e-9).all(axis=1)
    Z, combos = Z[feas], combos[feas]
    obj = Z[:, n] - Z[:, n + 1]
    order = np.argsort(obj, kind="stable")

    def exact(idx):
        rows = [[Fraction(int(x)) for x in G[k]] + [Fraction(0)] for k in combos[idx]]
        rows.append([Fraction(int(x)) for x in eq] + [Fraction(1)])
        z = _gauss(rows)
        if z is None:
            return None
        for g in G:
            if sum(int(a) * b for a, b in zip(g, z) if a) < 0:
                return None
        return z[n] - z[n + 1]

    best = None
    cutoff = None
    seen = set()
    for idx in order:
        if cutoff is not None and obj[idx] > cutoff:
            break
        point = tuple(np.round(Z[idx], 7))  # degenerate vertices repeat across bases
        if point in seen:
            continue
        seen.add(point)
        val = exact(idx)
        if val is None:
            continue
        if best is None or val < best:
            best = val
        if cutoff is None:
            cutoff = obj[idx] + 1e-7
    if best is None:
        raise RuntimeError("no feasible vertex found")  # unreachable for nonempty M
    return best
