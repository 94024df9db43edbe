#!/usr/bin/env python3
"""
Rearrangement distance between step graphons: blow-ups and relabelings
cost nothing, genuine structural differences do.
"""

import numpy as np

from cutgraphon import (
    StepGraphon,
    blowup,
    delta_exact_tiny,
    delta_upper,
    homomorphism_density,
)
from cutgraphon.distance import EDGE, TRIANGLE


def main():
    rng = np.random.default_rng(23)
    V = rng.uniform(0, 1, (3, 3))
    W = StepGraphon((V + V.T) / 2, np.array([0.5, 0.25, 0.25]))

    print("base graphon: 3 steps, weights (1/2, 1/4, 1/4)")
    print()

    print("1. Invariance under blow-up and relabeling")
    print("-" * 60)
    B = blowup(W, 8)
    perm = rng.permutation(8)
    scrambled = StepGraphon(B.values[np.ix_(perm, perm)], B.weights[perm])
    est = delta_upper(W, scrambled, "cut")
    print(f"delta_cut(W, scrambled 8-step blow-up) = {est.upper:.2e}  (method: {est.method})")
    print("the search recovers the hidden relabeling exactly.")
    print()

    print("2. Distinct models have positive distance")
    print("-" * 60)
    assort = StepGraphon(np.array([[0.8, 0.2], [0.2, 0.8]]), np.full(2, 0.5))
    disassort = StepGraphon(np.array([[0.2, 0.8], [0.8, 0.2]]), np.full(2, 0.5))
    flat = StepGraphon(np.full((1, 1), 0.5), np.ones(1))
    for name, other in (("disassortative twin", disassort), ("constant 1/2", flat)):
        up = delta_upper(assort, other, "cut").upper
        ex = delta_exact_tiny(assort, other, "cut").upper
        print(f"assortative vs {name:<20} search {up:.6f}   exact {ex:.6f}")
    print()
    print("(no relabeling helps here: the checkerboard is invariant under the")
    print(" class swap, so the search upper bound already equals the exact")
    print(" distance from full enumeration)")
    print()

    print("3. Motif densities are distance-continuous invariants")
    print("-" * 60)
    for name, motif in (("edge", EDGE), ("triangle", TRIANGLE)):
        ta = homomorphism_density(motif, assort)
        tf = homomorphism_density(motif, flat)
        print(f"t({name:<8}, assortative) = {ta:.4f}   t({name}, constant) = {tf:.4f}")
    print()
    print("matching edge densities but differing triangle densities certify a")
    print("cut-distance lower bound via the counting inequality.")


if __name__ == "__main__":
    main()
