"""Weak regularity decompositions of step graphons.

Greedy energy-increment construction: repeatedly take an exact cut-norm
witness (S, T) of the current residual, subtract the residual's mean on
S x T from that rectangle, and stop once the residual's cut norm falls to
1/sqrt(k0) with k0 = floor(log2(q0)).  Each subtraction lowers the
weighted L2 energy by cut^2 / (lam(S) lam(T)) >= cut^2, which caps the
number of rounds at k0 because the energy starts at most 1.

Because the residual stays a step function on the graphon's own steps,
witnesses are unions of whole steps and the exact cut enumerator applies
at every round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import Kernel, StepGraphon
from .cutnorm import step_kernel_cut_norm_exact
from .errors import ValidationError


@dataclass(frozen=True)
class RegularityTerm:
    """One greedy round: subtract `coefficient` on rows x cols."""

    coefficient: float
    rows: np.ndarray
    cols: np.ndarray
    residual_cut: float      # exact cut norm before this subtraction
    energy_before: float
    energy_after: float

    def __post_init__(self):
        self.rows.setflags(write=False)
        self.cols.setflags(write=False)


@dataclass(frozen=True)
class RegularityDecomposition:
    q0: int
    max_terms: int           # k0 = floor(log2 q0)
    target: float            # 1 / sqrt(k0)
    terms: Tuple[RegularityTerm, ...]
    approx: Kernel           # accumulated step correction (may be asymmetric)
    residual: Kernel
    final_cut: float         # exact cut norm of the final residual
    stopped_early: bool


def _energy(R: np.ndarray, w: np.ndarray) -> float:
    return float(np.einsum("a,b,ab->", w, w, R**2))


def weak_regularity_approx(W: StepGraphon, q0: int) -> Tuple[Kernel, RegularityDecomposition]:
    """Greedy cut-norm decomposition with at most floor(log2 q0) terms.

    Returns (approx, decomposition); approx + residual reproduces W's
    values exactly, and the final residual's cut norm is at most
    1/sqrt(k0) whenever W's values lie in [0, 1].
    """
    if q0 < 2:
        raise ValidationError("q0 must be >= 2 so at least one round is allowed")
    k0 = int(np.floor(np.log2(q0)))
    target = 1.0 / np.sqrt(k0)
    w = W.weights
    R = W.values.astype(float).copy()
    terms = []
    stopped = False
    for _ in range(k0):
        res = step_kernel_cut_norm_exact(Kernel(R, w, w, check_range=False))
        if res.value <= target:
            stopped = True
            break
        S, T = res.witness_s, res.witness_t
        lamS = w[S].sum()
        lamT = w[T].sum()
        raw = float(np.einsum("a,b,ab->", w[S], w[T], R[np.ix_(S, T)]))
        a = raw / (lamS * lamT)
        e0 = _energy(R, w)
        R[np.ix_(S, T)] -= a
        e1 = _energy(R, w)
        terms.append(RegularityTerm(a, S, T, res.value, e0, e1))
    final = step_kernel_cut_norm_exact(Kernel(R, w, w, check_range=False))
    approx_vals = W.values - R
    approx = Kernel(approx_vals, w, w, check_range=False)
    decomp = RegularityDecomposition(
        q0, k0, float(target), tuple(terms), approx,
        Kernel(R, w, w, check_range=False), float(final.value), stopped,
    )
    return approx, decomp


def reconstruct_from_terms(decomp: RegularityDecomposition, k: int) -> np.ndarray:
    """Rebuild the approximation's step values from the recorded terms."""
    out = np.zeros((k, k))
    for t in decomp.terms:
        out[np.ix_(t.rows, t.cols)] += t.coefficient
    return out


def symmetrize_kernel(K: Kernel) -> Kernel:
    """Average a square kernel with its transpose.

    For a symmetric input graphon the rectangle terms need not be
    symmetric; averaging the approximant (equivalently the residual) with
    its transpose restores symmetry without increasing the residual cut
    norm, since transposing swaps the witness sides.
    """
    if K.values.shape[0] != K.values.shape[1]:
        raise ValidationError("symmetrize_kernel needs a square kernel")
    return Kernel((K.values + K.values.T) / 2.0, K.row_weights, K.col_weights,
                  check_range=False)
