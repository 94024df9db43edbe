#!/usr/bin/env python3
"""
Monte Carlo risk of graph estimators across a parameter grid, with a
log-log slope fit against the predicted convergence rate.
"""

from cutgraphon import (
    ExperimentConfig,
    fit_rate_slope,
    rate_formula,
    run_risk_experiment,
)


def main():
    cfg = ExperimentConfig(
        ns=(32, 64, 128, 256),
        ks=(4,),
        rhos=(1.0,),
        estimators=("adjacency", "svt"),
        metrics=("cut", "frobenius"),
        reps=15,
        seed=3,
    )
    print(f"grid: n in {cfg.ns}, k={cfg.ks[0]}, rho={cfg.rhos[0]}, "
          f"{cfg.reps} reps per cell")
    report = run_risk_experiment(cfg)
    assert not report.failures

    print()
    print(f"{'n':>4} {'estimator':<10} {'metric':<10} {'mean risk':>10} "
          f"{'stderr':>9} {'theory':>9}")
    print("-" * 58)
    for row in report.rows:
        print(f"{row.n:>4} {row.estimator:<10} {row.metric:<10} "
              f"{row.mean_risk:>10.4f} {row.stderr:>9.4f} {row.theory:>9.4f}")

    print()
    for est, met in (("adjacency", "cut"), ("svt", "frobenius")):
        slope, r2 = fit_rate_slope(report, "n", estimator=est, metric=met)
        print(f"{est}/{met}: fitted n-slope {slope:+.3f} (r^2 {r2:.3f})")

    print()
    print("The cut risk of the raw adjacency matrix falls cleanly like")
    print("1/sqrt(n) -- concentration alone, no smoothing.  The spectral")
    print("estimator improves with n too, but in steps: eigenvalues cross the")
    print("threshold at discrete sizes, so its fitted slope is rougher at")
    print("small grids.  Theory column shows the unit-constant rate formula;")
    print("e.g. the Frobenius regime at n=100, k=4, rho=1 evaluates to")
    print(f"{rate_formula('Frobenius', 100, 4, 1.0):.5f}.")
    print()
    print("The same experiment is scriptable end to end:")
    print("  cutgraphon risk --config grid.cfg --out results/")
    print("  cutgraphon slope --input results/risk.csv --varying n")


if __name__ == "__main__":
    main()
