#!/usr/bin/env python3
"""
Greedy weak-regularity decomposition: peel cut-norm-maximal rectangles
off a step graphon until the residual drops below 1/sqrt(k0).
"""

import numpy as np

from cutgraphon import StepGraphon, step_kernel_cut_norm_exact, weak_regularity_approx
from cutgraphon.regularity import reconstruct_from_terms


def main():
    rng = np.random.default_rng(31)
    # two communities with noisy internal structure
    base = np.kron(np.array([[0.85, 0.15], [0.15, 0.55]]), np.ones((4, 4)))
    noise = rng.uniform(-0.1, 0.1, (8, 8))
    V = np.clip(base + (noise + noise.T) / 2, 0, 1)
    W = StepGraphon(V, np.full(8, 1 / 8))

    for q0 in (4, 16):
        approx, decomp = weak_regularity_approx(W, q0)
        print("=" * 64)
        print(f"q0 = {q0}:  up to k0 = {decomp.max_terms} terms, "
              f"target residual {decomp.target:.4f}")
        print("=" * 64)
        for i, t in enumerate(decomp.terms):
            print(f" term {i}: coefficient {t.coefficient:+.4f} on "
                  f"{len(t.rows)}x{len(t.cols)} rectangle; residual cut before "
                  f"{t.residual_cut:.4f}; energy {t.energy_before:.4f} -> "
                  f"{t.energy_after:.4f}")
        print(f" final residual cut norm: {decomp.final_cut:.4f} "
              f"(target {decomp.target:.4f}, stopped early: {decomp.stopped_early})")
        # the certificate behind the stopping rule
        recheck = step_kernel_cut_norm_exact(decomp.residual).value
        recon = reconstruct_from_terms(decomp, 8)
        print(f" residual cut re-verified: {recheck:.4f}; "
              f"approx+residual == W: "
              f"{np.allclose(approx.values + decomp.residual.values, V)}; "
              f"terms rebuild approx: {np.allclose(recon, approx.values)}")
        print()

    print("Each peeled rectangle removes at least (residual cut)^2 of energy,")
    print("and total energy is bounded, so few terms ever get peeled -- the")
    print("whole point of weak regularity: 2^(k0) classes suffice for cut-norm")
    print("accuracy 1/sqrt(k0), independent of the graphon's size.")


if __name__ == "__main__":
    main()
