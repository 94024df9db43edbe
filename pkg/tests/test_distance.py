"""Tests for rearrangement distances and homomorphism densities."""

import itertools

import numpy as np
import pytest

from cutgraphon.core import StepGraphon, blowup
from cutgraphon.distance import (
    CHERRY,
    DEFAULT_MOTIFS,
    EDGE,
    SQUARE,
    TRIANGLE,
    Motif,
    common_refinement_m,
    delta_cut_lower,
    delta_exact_tiny,
    delta_upper,
    homomorphism_density,
    permuted_difference_norm,
)
from cutgraphon.cutnorm import inf1_norm
from cutgraphon.errors import BudgetError, ValidationError


# ---------------------------------------------------------------------------
# oracles


def brute_hom_density(motif, W):
    """Direct sum over all k^q vertex maps."""
    k = W.k
    total = 0.0
    for psi in itertools.product(range(k), repeat=motif.num_vertices):
        term = 1.0
        for v in psi:
            term *= W.weights[v]
        for i, j in motif.edges:
            term *= W.values[psi[i], psi[j]]
        total += term
    return total


def oracle_cut_of(D):
    """Exact max rectangle sum by enumerating subsets on both sides."""
    m = D.shape[0]
    best = 0.0
    for smask in range(1 << m):
        S = [i for i in range(m) if smask >> i & 1]
        if not S:
            continue
        col = D[S].sum(axis=0)
        for tmask in range(1 << m):
            T = [j for j in range(m) if tmask >> j & 1]
            best = max(best, abs(col[T].sum()) if T else 0.0)
    return best / m**2


def oracle_delta(W1, W2, metric, m):
    """Enumerate every permutation of an m-step refinement."""
    D1 = np.repeat(np.repeat(W1.values, _counts(W1, m), 0), _counts(W1, m), 1)
    D2 = np.repeat(np.repeat(W2.values, _counts(W2, m), 0), _counts(W2, m), 1)
    best = np.inf
    for p in itertools.permutations(range(m)):
        p = list(p)
        D = D1 - D2[np.ix_(p, p)]
        if metric == "cut":
            val = oracle_cut_of(D)
        elif metric == "l1":
            val = np.abs(D).mean()
        else:
            val = np.sqrt((D**2).mean())
        best = min(best, val)
    return best


def _counts(W, m):
    c = np.rint(W.weights * m).astype(int)
    assert c.sum() == m
    return c


def random_refinable(rng, m=6):
    """Random step graphon whose weights are multiples of 1/m."""
    k = int(rng.integers(1, 4))
    V = rng.uniform(0, 1, (k, k))
    V = (V + V.T) / 2
    cuts = sorted(rng.choice(np.arange(1, m), size=k - 1, replace=False)) if k > 1 else []
    counts = np.diff([0] + list(cuts) + [m])
    return StepGraphon(V, counts / m)


# ---------------------------------------------------------------------------
# motifs


class TestMotif:
    def test_constants_shape(self):
        assert EDGE.edge_count == 1
        assert CHERRY.edge_count == 2
        assert TRIANGLE.edge_count == 3
        assert SQUARE.edge_count == 4 and SQUARE.num_vertices == 4

    def test_rejects_loops_and_duplicates(self):
        with pytest.raises(ValidationError):
            Motif(2, ((0, 0),))
        with pytest.raises(ValidationError):
            Motif(3, ((0, 1), (1, 0)))
        with pytest.raises(ValidationError):
            Motif(2, ((0, 5),))

    def test_density_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            k = int(rng.integers(1, 4))
            V = rng.uniform(0, 1, (k, k))
            V = (V + V.T) / 2
            w = rng.uniform(0.2, 1.0, k)
            W = StepGraphon(V, w / w.sum())
            for f in DEFAULT_MOTIFS:
                assert homomorphism_density(f, W) == pytest.approx(
                    brute_hom_density(f, W), abs=1e-12
                )

    def test_constant_graphon_powers(self):
        W = StepGraphon(np.array([[0.7]]), np.array([1.0]))
        for f in DEFAULT_MOTIFS:
            assert homomorphism_density(f, W) == pytest.approx(0.7**f.edge_count, abs=1e-12)

    def test_vertex_budget(self):
        big = Motif(7, tuple((i, i + 1) for i in range(6)))
        W = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        with pytest.raises(BudgetError):
            homomorphism_density(big, W)


# ---------------------------------------------------------------------------
# refinement


class TestRefinement:
    def test_quarters(self):
        A = StepGraphon(np.array([[0.2, 0.8], [0.8, 0.3]]), np.array([0.25, 0.75]))
        B = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        assert common_refinement_m(A, B) == (4, True)

    def test_mixed_denominators(self):
        A = StepGraphon(np.full((2, 2), 0.5), np.array([0.3, 0.7]))
        B = StepGraphon(np.full((3, 3), 0.5), np.array([0.2, 0.2, 0.6]))
        m, exact = common_refinement_m(A, B)
        assert exact and m == 10

    def test_cap_fallback(self):
        r = 1 / np.sqrt(2)
        A = StepGraphon(np.full((2, 2), 0.5), np.array([r, 1 - r]))
        B = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        m, exact = common_refinement_m(A, B)
        assert m == 64 and not exact


# ---------------------------------------------------------------------------
# distances


class TestDistances:
    def test_constants_every_metric(self):
        A = StepGraphon(np.array([[0.2]]), np.array([1.0]))
        B = StepGraphon(np.array([[0.7]]), np.array([1.0]))
        for metric in ("cut", "l1", "l2"):
            assert delta_exact_tiny(A, B, metric=metric).upper == pytest.approx(0.5, abs=1e-12)
            assert delta_upper(A, B, metric=metric).upper == pytest.approx(0.5, abs=1e-12)

    def test_two_block_example(self):
        # constant 1/2 vs +-0.1 two-block: aligned difference is the
        # checkerboard scaled by 0.1, so the cut value is eps/4 while the
        # l1/l2 and infinity-to-one functionals all sit at eps.
        half = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        two = StepGraphon(np.array([[0.6, 0.4], [0.4, 0.6]]), np.array([0.5, 0.5]))
        assert delta_exact_tiny(half, two, metric="cut").upper == pytest.approx(0.025, abs=1e-9)
        assert delta_exact_tiny(half, two, metric="l1").upper == pytest.approx(0.1, abs=1e-9)
        assert delta_exact_tiny(half, two, metric="l2").upper == pytest.approx(0.1, abs=1e-9)
        D = blowup(half, 2).values - blowup(two, 2).values
        assert inf1_norm(D).value == pytest.approx(0.1, abs=1e-12)

    def test_identical_graphons_zero(self):
        rng = np.random.default_rng(3)
        W = random_refinable(rng)
        for metric in ("cut", "l1", "l2"):
            assert delta_upper(W, W, metric=metric).upper <= 1e-12

    def test_search_matches_enumeration(self):
        rng = np.random.default_rng(5)
        for trial in range(12):
            A = random_refinable(rng)
            B = random_refinable(rng)
            for metric in ("cut", "l1", "l2"):
                ex = delta_exact_tiny(A, B, metric=metric)
                up = delta_upper(A, B, metric=metric, restarts=16, seed=trial)
                assert up.upper >= ex.upper - 1e-12
                assert up.upper == pytest.approx(ex.upper, abs=1e-6)

    def test_exact_tiny_matches_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(4):
            A = random_refinable(rng, m=4)
            B = random_refinable(rng, m=4)
            for metric in ("cut", "l1", "l2"):
                got = delta_exact_tiny(A, B, metric=metric).upper
                assert got == pytest.approx(oracle_delta(A, B, metric, 4), abs=1e-12)

    def test_witness_replay(self):
        rng = np.random.default_rng(13)
        A = random_refinable(rng)
        B = random_refinable(rng)
        est = delta_upper(A, B, metric="l1", seed=2)
        rep = permuted_difference_norm(A, B, est.permutation, est.m, "l1")
        assert rep == pytest.approx(est.upper, abs=1e-12)

    def test_block_relabel_invariance(self):
        rng = np.random.default_rng(17)
        V = rng.uniform(0, 1, (3, 3))
        V = (V + V.T) / 2
        w = np.array([1 / 6, 2 / 6, 3 / 6])
        A = StepGraphon(V, w)
        p = [2, 0, 1]
        B = StepGraphon(V[np.ix_(p, p)], w[p])
        for metric in ("cut", "l1", "l2"):
            assert delta_exact_tiny(A, B, metric=metric).upper <= 1e-12

    def test_exact_tiny_rejects_unrefinable(self):
        r = 1 / np.sqrt(2)
        A = StepGraphon(np.full((2, 2), 0.5), np.array([r, 1 - r]))
        B = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        with pytest.raises(ValidationError):
            delta_exact_tiny(A, B)
        with pytest.raises(ValidationError):
            delta_exact_tiny(B, B, m_cap=9)


# ---------------------------------------------------------------------------
# counting lower bound


class TestCountingLowerBound:
    def test_identical_gives_zero(self):
        W = StepGraphon(np.array([[0.3, 0.9], [0.9, 0.1]]), np.array([0.5, 0.5]))
        assert delta_cut_lower(W, W).value == 0.0

    def test_two_block_positive(self):
        half = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        two = StepGraphon(np.array([[0.6, 0.4], [0.4, 0.6]]), np.array([0.5, 0.5]))
        lb = delta_cut_lower(half, two)
        assert lb.value > 0
        assert lb.motif is not None

    def test_lower_below_exact(self):
        rng = np.random.default_rng(23)
        for _ in range(8):
            A = random_refinable(rng)
            B = random_refinable(rng)
            lb = delta_cut_lower(A, B)
            ex = delta_exact_tiny(A, B, metric="cut")
            assert lb.value <= ex.upper + 1e-12

    def test_rejects_edgeless_motif(self):
        W = StepGraphon(np.array([[0.5]]), np.array([1.0]))
        lone = Motif(1, ())
        with pytest.raises(ValidationError):
            delta_cut_lower(W, W, motifs=(lone,))
