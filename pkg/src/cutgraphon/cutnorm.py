"""Cut norms of matrices and step kernels, exact and approximate.

Conventions (callers convert between them explicitly):

* matrix cut norm of an n x n array B:
      (1/n^2) * max_{S,T subsets of [n]} | sum_{i in S, j in T} B_ij |
* step-kernel cut norm of a kernel K with step weights (alpha, beta):
      max_{S,T} | sum_{a in S, b in T} alpha_a beta_b K_ab |
  i.e. the weighted integral, no extra normalization.

The exact routines enumerate one index side and solve the other side
greedily: for fixed S, the best T consists of exactly the columns whose
S-restricted (weighted) sum is strictly positive (resp. negative) —
zero-sum columns are never included. The heuristic alternates those two
greedy steps from random starts and returns a replayable certificate, so
its value is always a lower bound on the true cut norm.

Also here: the infinity-to-one norm (same 1/n^2 normalization) and the
sandwich check  cut <= inf1 <= 4 * cut  that links the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from ._rng import stream
from .core import Kernel, l1_norm
from .errors import BudgetError, ValidationError

EXACT_BUDGET = 24  # largest enumerated side for exact cut norms
INF1_EXACT_BUDGET = 12


@dataclass(frozen=True)
class CutNormResult:
    """A cut-norm value plus the certificate that produced it.

    ``witness_s`` / ``witness_t`` are index arrays (subsets) for cut norms
    and +-1 sign vectors for the infinity-to-one norm; None for bounds that
    carry no witness. ``is_upper_bound`` is True when the value is
    guaranteed >= the true norm (exact values and proved upper bounds),
    False for certificate lower bounds.
    """

    value: float
    witness_s: Optional[np.ndarray]
    witness_t: Optional[np.ndarray]
    method: str
    is_upper_bound: bool


def _as_array(B) -> np.ndarray:
    a = getattr(B, "values", B)
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValidationError(f"expected a nonempty 2-d array, got shape {getattr(a, 'shape', None)}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix contains nan/inf")
    return a


def matrix_witness_value(B, S, T) -> float:
    """Replay a subset-pair certificate: |sum B[S, T]| / n^2."""
    a = _as_array(B)
    n = a.shape[0]
    if len(S) == 0 or len(T) == 0:
        return 0.0
    return abs(float(a[np.ix_(np.asarray(S), np.asarray(T))].sum())) / n**2


def kernel_witness_value(K: Kernel, S, T) -> float:
    if len(S) == 0 or len(T) == 0:
        return 0.0
    S = np.asarray(S)
    T = np.asarray(T)
    sub = K.values[np.ix_(S, T)]
    return abs(float(K.row_weights[S] @ sub @ K.col_weights[T]))


# ---------------------------------------------------------------------------
# exact enumeration


def _max_rectangle_sum(M: np.ndarray, budget: int):
    """max_{S,T} |sum M[S,T]| by enumerating the smaller side, greedy other side.

    Returns (raw_value, rows, cols). O(2^min(m,n) * m * n), chunked.
    """
    transposed = M.shape[0] > M.shape[1]
    A = M.T if transposed else M
    m = A.shape[0]
    if m > budget:
        raise BudgetError(f"exact cut norm: enumerated side {m} exceeds budget {budget}")
    bits = np.arange(m)
    best_val = 0.0
    best_subset = 0
    best_sign = 1
    chunk = 1 << 16
    for lo in range(0, 1 << m, chunk):
        idx = np.arange(lo, min(lo + chunk, 1 << m), dtype=np.int64)
        masks = ((idx[:, None] >> bits) & 1).astype(float)
        colsums = masks @ A
        pos = np.where(colsums > 0, colsums, 0.0).sum(axis=1)
        neg = np.where(colsums < 0, -colsums, 0.0).sum(axis=1)
        vals = np.maximum(pos, neg)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_subset = int(idx[j])
            best_sign = 1 if pos[j] >= neg[j] else -1
    rows = np.flatnonzero([(best_subset >> b) & 1 for b in range(m)])
    if transposed:
        # we enumerated columns of M; the greedy side is rows of M
        rowsum = M[:, rows].sum(axis=1)
        other = np.flatnonzero(rowsum > 0) if best_sign > 0 else np.flatnonzero(rowsum < 0)
        return best_val, other, rows
    colsum = M[rows].sum(axis=0)
    other = np.flatnonzero(colsum > 0) if best_sign > 0 else np.flatnonzero(colsum < 0)
    return best_val, rows, other


def matrix_cut_norm_exact(B, budget_n: int = EXACT_BUDGET) -> CutNormResult:
    """Exact matrix cut norm by subset enumeration (feasible up to n ~ 24)."""
    a = _as_array(B)
    n = a.shape[0]
    raw, rows, cols = _max_rectangle_sum(a, budget_n)
    return CutNormResult(raw / n**2, rows, cols, "exact", True)


def step_kernel_cut_norm_exact(K: Kernel, budget: int = EXACT_BUDGET) -> CutNormResult:
    """Exact cut norm of a step kernel (weighted-integral convention)."""
    M = K.row_weights[:, None] * K.values * K.col_weights[None, :]
    raw, rows, cols = _max_rectangle_sum(M, budget)
    return CutNormResult(raw, rows, cols, "exact", True)


# ---------------------------------------------------------------------------
# alternating heuristic


def _heuristic_starts(n_cols: int, restarts: int, seed: int, tag: str):
    """Column-stacked {0,1} starting vectors, one independent stream per restart."""
    cols = []
    for r in range(restarts):
        g = stream(seed, tag, r)
        cols.append(g.integers(0, 2, size=n_cols))
    return np.array(cols, dtype=float).T


def _alternate_max(M: np.ndarray, T0: np.ndarray, max_iters: int):
    """Maximize s^T M t over {0,1} vectors by alternating greedy updates.

    T0 holds starting t-vectors as columns; all restarts are advanced in
    lock-step. Monotone in the objective, so it terminates at a fixed point.
    """
    T = T0
    S = np.zeros((M.shape[0], T.shape[1]))
    for _ in range(max_iters):
        S_new = (M @ T > 0).astype(float)
        T_new = (M.T @ S_new > 0).astype(float)
        if np.array_equal(S_new, S) and np.array_equal(T_new, T):
            break
        S, T = S_new, T_new
    vals = np.einsum("ir,ij,jr->r", S, M, T)
    return vals, S, T


def _max_rectangle_sum_heuristic(M: np.ndarray, restarts: int, seed: int, max_iters: int = 100):
    """Certificate lower bound on max |sum M[S,T]|: alternating ascent on M and -M."""
    k2 = M.shape[1]
    rand = _heuristic_starts(k2, max(restarts - 2, 0), seed, "cut-heur")
    ones = np.ones((k2, 1))
    csign = (M.sum(axis=0) > 0).astype(float)[:, None]
    T0 = np.hstack([ones, csign] + ([rand] if rand.size else []))
    best = (0.0, np.array([], dtype=int), np.array([], dtype=int))
    for sign in (1.0, -1.0):
        vals, S, T = _alternate_max(sign * M, T0, max_iters)
        r = int(np.argmax(vals))
        if vals[r] > best[0]:
            best = (float(vals[r]), np.flatnonzero(S[:, r]), np.flatnonzero(T[:, r]))
    return best


def matrix_cut_norm_heuristic(B, restarts: int = 16, seed: int = 0) -> CutNormResult:
    """Lower-bound the matrix cut norm; the witness subsets replay the value."""
    a = _as_array(B)
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    n = a.shape[0]
    raw, rows, cols = _max_rectangle_sum_heuristic(a, restarts, seed)
    return CutNormResult(raw / n**2, rows, cols, "heuristic", False)


def step_kernel_cut_norm_heuristic(K: Kernel, restarts: int = 16, seed: int = 0) -> CutNormResult:
    M = K.row_weights[:, None] * K.values * K.col_weights[None, :]
    raw, rows, cols = _max_rectangle_sum_heuristic(M, restarts, seed)
    return CutNormResult(raw, rows, cols, "heuristic", False)


# ---------------------------------------------------------------------------
# infinity-to-one norm and the factor-4 sandwich


def inf1_norm(
    B,
    method: str = "auto",
    restarts: int = 32,
    seed: int = 0,
    budget_n: int = INF1_EXACT_BUDGET,
) -> CutNormResult:
    """||B||_{inf->1} / n^2 = max_{f,g in {-1,1}^n} f^T B g / n^2.

    Exact by enumerating g (with g_1 fixed: f^T B g is even in (f,g)) for
    n <= budget, else alternating signs heuristic. Witnesses are the sign
    vectors (f, g).
    """
    a = _as_array(B)
    n = a.shape[0]
    if method not in ("auto", "exact", "heuristic"):
        raise ValidationError(f"unknown inf1 method {method!r}")
    use_exact = method == "exact" or (method == "auto" and n <= budget_n)
    if use_exact:
        if n > budget_n:
            raise BudgetError(f"inf1_norm exact: n={n} exceeds budget {budget_n}")
        idx = np.arange(1 << max(n - 1, 0), dtype=np.int64)
        G = 1.0 - 2.0 * ((idx[:, None] >> np.arange(n - 1)) & 1)
        G = np.hstack([np.ones((G.shape[0], 1)), G]) if n > 1 else np.ones((1, 1))
        rowvals = np.abs(G @ a.T).sum(axis=1)
        j = int(np.argmax(rowvals))
        g = G[j]
        f = np.where(a @ g >= 0, 1.0, -1.0)
        return CutNormResult(float(rowvals[j]) / n**2, f, g, "exact", True)
    best_val, best_f, best_g = -np.inf, None, None
    for r in range(restarts):
        rng = stream(seed, "inf1", r)
        g = 1.0 - 2.0 * rng.integers(0, 2, size=n)
        for _ in range(100):
            f = np.where(a @ g >= 0, 1.0, -1.0)
            g_new = np.where(a.T @ f >= 0, 1.0, -1.0)
            if np.array_equal(g_new, g):
                break
            g = g_new
        val = float(f @ a @ g)
        if val > best_val:
            best_val, best_f, best_g = val, f, g
    return CutNormResult(best_val / n**2, best_f, best_g, "heuristic", False)


@dataclass(frozen=True)
class SandwichResult:
    cut: CutNormResult
    inf1: CutNormResult
    satisfied: bool


def cut_norm_sandwich_check(B, seed: int = 0, restarts: int = 32) -> SandwichResult:
    """Check  cut(B) <= inf1(B) <= 4*cut(B)  (exact routes when feasible).

    With both sides exact the chain is a theorem and `satisfied` should
    always come back True (up to 1e-12 roundoff); with heuristic routes a
    False only signals an undersized certificate, not a counterexample.
    """
    a = _as_array(B)
    n = a.shape[0]
    if n <= EXACT_BUDGET:
        cut = matrix_cut_norm_exact(a)
    else:
        cut = matrix_cut_norm_heuristic(a, restarts=restarts, seed=seed)
    inf1 = inf1_norm(a, seed=seed, restarts=restarts)
    tol = 1e-12 * max(1.0, abs(inf1.value))
    ok = (cut.value <= inf1.value + tol) and (inf1.value <= 4.0 * cut.value + tol)
    return SandwichResult(cut, inf1, bool(ok))


# ---------------------------------------------------------------------------
# analytic bounds for step kernels


def _subset_masks(k: int, qmax: int) -> np.ndarray:
    rows = [np.zeros(k)]
    for size in range(1, min(qmax, k) + 1):
        for comb in combinations(range(k), size):
            m = np.zeros(k)
            m[list(comb)] = 1.0
            rows.append(m)
    return np.array(rows)


def q_subset_upper_bound(K: Kernel, q: int, pair_budget: int = 4_000_000) -> CutNormResult:
    """Upper bound on the kernel cut norm from q-element index subsets.

    For each sign of K, takes the max of K[R2->rows, R1->cols] over subsets
    R1 (rows), R2 (columns) of size at most q — where R1 induces the column
    set with strictly positive R1-weighted sums and symmetrically for R2 —
    plus the additive sampling term
        ( u * sqrt(q2 * sum beta^2) + v * sqrt(q1 * sum alpha^2) ) / sqrt(q)
    with u = sum alpha, v = sum beta. At q = max(q1, q2) the max term reaches
    the exact cut norm, so the bound is exact-plus-additive there.
    """
    if q < 1 or q > max(K.q1, K.q2):
        raise ValidationError(f"q must be in [1, max(q1,q2)], got {q}")
    alpha, beta = K.row_weights, K.col_weights
    u, v = float(alpha.sum()), float(beta.sum())
    M1 = _subset_masks(K.q1, q)
    M2 = _subset_masks(K.q2, q)
    if M1.shape[0] * M2.shape[0] > pair_budget:
        raise BudgetError(
            f"q_subset_upper_bound: {M1.shape[0]} x {M2.shape[0]} subset pairs exceed budget"
        )
    additive = (u * np.sqrt(K.q2 * (beta**2).sum()) + v * np.sqrt(K.q1 * (alpha**2).sum())) / np.sqrt(q)
    best_main = 0.0
    best_wit = (np.array([], dtype=int), np.array([], dtype=int))
    for sign in (1.0, -1.0):
        Q = sign * K.values
        Qw = alpha[:, None] * Q * beta[None, :]
        # column sets induced by row subsets R1, row sets induced by col subsets R2
        L = ((M1 * alpha) @ Q > 0).astype(float)          # (N1, q2)
        R = ((M2 * beta) @ Q.T > 0).astype(float)         # (N2, q1)
        V = R @ Qw @ L.T                                   # V[j, i] = Q[R_j, L_i]
        j, i = np.unravel_index(int(np.argmax(V)), V.shape)
        if V[j, i] > best_main:
            best_main = float(V[j, i])
            best_wit = (np.flatnonzero(R[j]), np.flatnonzero(L[i]))
    return CutNormResult(best_main + float(additive), best_wit[0], best_wit[1], "qsubset_upper", True)


def khintchine_lower_bound(K: Kernel) -> CutNormResult:
    """Cut norm >= (integral of |K|) / (4 * sqrt(2 * q2)) for a q1 x q2 step kernel."""
    val = l1_norm(K) / (4.0 * np.sqrt(2.0 * K.q2))
    return CutNormResult(float(val), None, None, "khintchine_lower", False)
