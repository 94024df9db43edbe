"""Core value types and norms.

Two families of objects live here:

* matrices on n vertices — edge-probability matrices and adjacency
  matrices, with matrix norms normalized so they agree with the kernel
  picture: ``l1_norm(B) = sum|B_ij| / n^2`` and ``l2_norm(B) = ||B||_F / n``;
* step kernels on [0,1] — symmetric step graphons (values in [0,1]) and
  general rectangular step kernels (values in [-1,1]), whose norms are the
  weighted integrals sum(w_a w_b |K_ab|) and sqrt(sum(w_a w_b K_ab^2)).

Callers converting between the two pictures do so explicitly (a matrix is
the step kernel of its empirical graphon, with equal weights 1/n).

All types are immutable: constructors copy and freeze their arrays, so
instances can be shared freely across threads/processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

# weight vectors must sum to 1 within this to be accepted verbatim ...
WEIGHT_SUM_TOL = 1e-12
# ... and are silently renormalized when off by at most this much
WEIGHT_RENORM_TOL = 1e-9

_SYM_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} contains nan/inf")


def _check_symmetric(a: np.ndarray, what: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {a.shape}")
    if a.shape[0] and np.max(np.abs(a - a.T)) > _SYM_TOL:
        raise ValidationError(f"{what} is not symmetric (tol {_SYM_TOL})")


def _normalize_weights(w, what: str) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"{what} must be a nonempty 1-d vector")
    _check_finite(w, what)
    if np.any(w <= 0):
        raise ValidationError(f"{what} must be strictly positive")
    gap = abs(float(w.sum()) - 1.0)
    if gap <= WEIGHT_SUM_TOL:
        return w
    if gap <= WEIGHT_RENORM_TOL:
        return w / w.sum()
    raise ValidationError(f"{what} sums to {w.sum()!r}, off by {gap:.3e} (> {WEIGHT_RENORM_TOL})")


class ProbMatrix:
    """Symmetric n x n matrix of edge probabilities, zero diagonal."""

    __slots__ = ("values", "n")

    def __init__(self, values):
        a = np.asarray(values, dtype=float)
        _check_finite(a, "ProbMatrix values")
        _check_symmetric(a, "ProbMatrix")
        if a.size and (a.min() < -1e-12 or a.max() > 1 + 1e-12):
            raise ValidationError(
                f"ProbMatrix entries must lie in [0,1]; range [{a.min()}, {a.max()}]"
            )
        if np.max(np.abs(np.diag(a)), initial=0.0) > 1e-12:
            raise ValidationError("ProbMatrix diagonal must be zero")
        a = np.clip(a, 0.0, 1.0)
        np.fill_diagonal(a, 0.0)
        self.values = _frozen(a)
        self.n = a.shape[0]

    def __repr__(self):
        return f"ProbMatrix(n={self.n})"


class AdjacencyMatrix:
    """Simple-graph adjacency matrix: 0/1 entries, symmetric, zero diagonal."""

    __slots__ = ("values", "n")

    def __init__(self, values):
        a = np.asarray(values, dtype=float)
        _check_finite(a, "AdjacencyMatrix values")
        _check_symmetric(a, "AdjacencyMatrix")
        if not np.all((a == 0.0) | (a == 1.0)):
            raise ValidationError("AdjacencyMatrix entries must be exactly 0 or 1")
        if a.size and np.any(np.diag(a) != 0.0):
            raise ValidationError("AdjacencyMatrix diagonal must be zero")
        self.values = _frozen(a)
        self.n = a.shape[0]

    @property
    def edge_count(self) -> int:
        return int(round(self.values.sum())) // 2

    def __repr__(self):
        return f"AdjacencyMatrix(n={self.n}, edges={self.edge_count})"


class StepGraphon:
    """Symmetric step function on [0,1]^2 with k steps.

    ``values`` is the k x k symmetric block-value matrix, ``weights`` the
    step lengths (positive, summing to 1 — see WEIGHT_SUM_TOL /
    WEIGHT_RENORM_TOL for the accept/renormalize/reject rule). Values must
    lie in [0,1] unless ``unbounded=True``, which lifts only the upper
    bound (for models of the form rho*W with rho > 1 before clipping);
    negative values are never allowed.
    """

    __slots__ = ("values", "weights", "k", "unbounded")

    def __init__(self, values, weights, unbounded: bool = False):
        q = np.asarray(values, dtype=float)
        _check_finite(q, "StepGraphon values")
        _check_symmetric(q, "StepGraphon values")
        w = _normalize_weights(weights, "StepGraphon weights")
        if w.shape[0] != q.shape[0]:
            raise ValidationError(
                f"weights length {w.shape[0]} != values size {q.shape[0]}"
            )
        if q.size and q.min() < 0:
            raise ValidationError("StepGraphon values must be nonnegative")
        if not unbounded and q.size and q.max() > 1 + 1e-12:
            raise ValidationError(
                f"StepGraphon values exceed 1 (max {q.max()}); pass unbounded=True if intended"
            )
        self.values = _frozen(q)
        self.weights = _frozen(w)
        self.k = q.shape[0]
        self.unbounded = bool(unbounded)

    def boundaries(self) -> np.ndarray:
        """Cumulative step boundaries F(0)=0 < F(1) < ... < F(k)=1."""
        b = np.concatenate(([0.0], np.cumsum(self.weights)))
        b[-1] = 1.0
        return b

    def __repr__(self):
        return f"StepGraphon(k={self.k})"


class Kernel:
    """Rectangular step kernel: q1 x q2 values with per-side weights.

    Values lie in [-1,1]; weights are positive but need not sum to one
    (restrictions of a kernel to sub-rectangles are again Kernels).
    Internal constructions (regularity residuals) may exceed the value
    range and pass ``check_range=False``.
    """

    __slots__ = ("values", "row_weights", "col_weights", "q1", "q2")

    def __init__(self, values, row_weights, col_weights, check_range: bool = True):
        v = np.asarray(values, dtype=float)
        if v.ndim != 2 or v.size == 0:
            raise ValidationError(f"Kernel values must be a nonempty 2-d array, got {v.shape}")
        _check_finite(v, "Kernel values")
        rw = np.asarray(row_weights, dtype=float)
        cw = np.asarray(col_weights, dtype=float)
        for w, name, m in ((rw, "row_weights", v.shape[0]), (cw, "col_weights", v.shape[1])):
            if w.ndim != 1 or w.shape[0] != m:
                raise ValidationError(f"Kernel {name} must have length {m}")
            _check_finite(w, name)
            if np.any(w <= 0):
                raise ValidationError(f"Kernel {name} must be strictly positive")
        if check_range and np.max(np.abs(v)) > 1 + 1e-12:
            raise ValidationError(
                f"Kernel values exceed [-1,1] (max |v| = {np.max(np.abs(v))})"
            )
        self.values = _frozen(v)
        self.row_weights = _frozen(rw)
        self.col_weights = _frozen(cw)
        self.q1, self.q2 = v.shape

    def __repr__(self):
        return f"Kernel(q1={self.q1}, q2={self.q2})"


@dataclass(frozen=True)
class LatentSample:
    """i.i.d. Uniform[0,1) latent positions plus the seed that produced them."""

    positions: np.ndarray
    seed: int

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if p.ndim != 1:
            raise ValidationError("latent positions must be a 1-d vector")
        if p.size and (p.min() < 0.0 or p.max() >= 1.0):
            raise ValidationError("latent positions must lie in [0,1)")
        object.__setattr__(self, "positions", _frozen(p))

    @property
    def n(self) -> int:
        return self.positions.shape[0]


# ---------------------------------------------------------------------------
# norms


def _as_matrix(obj) -> np.ndarray | None:
    if isinstance(obj, (ProbMatrix, AdjacencyMatrix)):
        return obj.values
    if isinstance(obj, np.ndarray):
        return obj
    return None


def _kernel_parts(obj):
    if isinstance(obj, StepGraphon):
        return obj.values, obj.weights, obj.weights
    if isinstance(obj, Kernel):
        return obj.values, obj.row_weights, obj.col_weights
    return None


def l1_norm(obj) -> float:
    """Normalized entrywise L1 norm.

    Matrices (or raw square arrays): sum|B_ij| / n^2. Step objects: the
    integral sum_a,b w_a w_b |K_ab|.
    """
    a = _as_matrix(obj)
    if a is not None:
        n = a.shape[0]
        return float(np.abs(a).sum() / n**2)
    parts = _kernel_parts(obj)
    if parts is None:
        raise ValidationError(f"l1_norm: unsupported type {type(obj)!r}")
    v, rw, cw = parts
    return float(rw @ np.abs(v) @ cw)


def l2_norm(obj) -> float:
    """Normalized L2 norm: ||B||_F / n for matrices, weighted-integral form otherwise."""
    a = _as_matrix(obj)
    if a is not None:
        n = a.shape[0]
        return float(np.sqrt((a**2).sum()) / n)
    parts = _kernel_parts(obj)
    if parts is None:
        raise ValidationError(f"l2_norm: unsupported type {type(obj)!r}")
    v, rw, cw = parts
    return float(np.sqrt(rw @ v**2 @ cw))


# ---------------------------------------------------------------------------
# empirical graphon and blow-up


def empirical_graphon(mat) -> StepGraphon:
    """The n-step graphon of a matrix: equal weights 1/n, block values B_ij."""
    a = _as_matrix(mat)
    if a is None:
        raise ValidationError(f"empirical_graphon expects a matrix, got {type(mat)!r}")
    n = a.shape[0]
    if n == 0:
        raise ValidationError("empirical_graphon: empty matrix")
    return StepGraphon(a, np.full(n, 1.0 / n), unbounded=bool(a.max(initial=0.0) > 1))


def blowup_counts(weights: np.ndarray, m: int) -> np.ndarray:
    """Largest-remainder apportionment of m equal slots to the given weights.

    Deterministic: remainders are ranked largest-first with ties broken by
    lower index. Always sums to m; a step may receive 0 slots if its weight
    is far below 1/m.
    """
    w = np.asarray(weights, dtype=float)
    raw = w * m
    base = np.floor(raw + 1e-12).astype(int)
    short = m - int(base.sum())
    if short < 0:
        # the 1e-12 nudge rounded some near-integers up; take slots back from
        # the entries with the smallest remainders
        order = np.lexsort((np.arange(len(w)), raw - base))
        take = [i for i in order if base[i] > 0][: -short]
        base[np.asarray(take, dtype=int)] -= 1
    elif short > 0:
        frac = raw - base
        order = np.lexsort((np.arange(len(w)), -frac))
        base[order[:short]] += 1
    return base


def blowup(W: StepGraphon, m: int) -> StepGraphon:
    """Refine W to m equal-length steps (largest-remainder rounding).

    Exact whenever every m*weight is an integer; otherwise the closest
    equal-partition approximation. Requires m >= k.
    """
    if m < W.k:
        raise ValidationError(f"blowup target m={m} below step count k={W.k}")
    counts = blowup_counts(W.weights, m)
    idx = np.repeat(np.arange(W.k), counts)
    q = W.values[np.ix_(idx, idx)]
    return StepGraphon(q, np.full(m, 1.0 / m), unbounded=W.unbounded)


# ---------------------------------------------------------------------------
# plain-text serialization (bit-exact round trips via shortest-repr floats)


def _fmt_row(row: Sequence[float]) -> str:
    return " ".join(repr(float(x)) for x in row)


def format_stepgraphon(W: StepGraphon) -> str:
    lines = [f"stepgraphon {W.k}", _fmt_row(W.weights)]
    lines += [_fmt_row(r) for r in W.values]
    return "\n".join(lines) + "\n"


def parse_stepgraphon(text: str) -> StepGraphon:
    toks = text.split()
    if len(toks) < 2 or toks[0] != "stepgraphon":
        raise ValidationError("expected 'stepgraphon k' header")
    try:
        k = int(toks[1])
    except ValueError:
        raise ValidationError(f"bad step count {toks[1]!r}") from None
    need = 2 + k + k * k
    if k <= 0 or len(toks) != need:
        raise ValidationError(f"stepgraphon record needs {need} tokens, got {len(toks)}")
    try:
        nums = [float(t) for t in toks[2:]]
    except ValueError as e:
        raise ValidationError(f"bad float in stepgraphon record: {e}") from None
    w = np.array(nums[:k])
    q = np.array(nums[k:]).reshape(k, k)
    return StepGraphon(q, w, unbounded=bool(q.max() > 1))


def format_matrix(mat) -> str:
    a = _as_matrix(mat)
    if a is None:
        raise ValidationError(f"format_matrix expects a matrix, got {type(mat)!r}")
    lines = [f"matrix {a.shape[0]}"]
    lines += [_fmt_row(r) for r in a]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    """Parse a 'matrix n' record to a raw array (wrap it yourself as needed)."""
    toks = text.split()
    if len(toks) < 2 or toks[0] != "matrix":
        raise ValidationError("expected 'matrix n' header")
    try:
        n = int(toks[1])
    except ValueError:
        raise ValidationError(f"bad size {toks[1]!r}") from None
    if n <= 0 or len(toks) != 2 + n * n:
        raise ValidationError(f"matrix record needs {2 + n * n} tokens, got {len(toks)}")
    try:
        nums = [float(t) for t in toks[2:]]
    except ValueError as e:
        raise ValidationError(f"bad float in matrix record: {e}") from None
    return np.array(nums).reshape(n, n)


def save_stepgraphon(W: StepGraphon, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_stepgraphon(W))


def load_stepgraphon(path) -> StepGraphon:
    with open(path) as fh:
        return parse_stepgraphon(fh.read())


def save_matrix(mat, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(mat))


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix(fh.read())
