"""A small Monte Carlo campaign: variance scaling, the n*phi band and the Talagrand sum.

Run:  python3 demos/04_campaign.py [samples]
The full-size version of this run is `percheeger experiment --plan demos/plans/grid_d2_p07.txt`.
"""
import sys

from percheeger import ExperimentPlan
from percheeger.experiments import run_samples, run_variance_experiment, talagrand_diagnostic, trend_table
from percheeger.io import default_constants

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 200
plan = ExperimentPlan(2, (5, 6, 7), 0.7, samples, 7, default_constants(), "exact", True)
records = run_samples(plan)
stats = run_variance_experiment(plan, records)
tal = talagrand_diagnostic(plan, records)

print(" n   mean phi   n*mean   n^d Var (95% CI)          P(H_n)   n^d*Talagrand")
for n, s in stats.items():
    lo, hi = s.scaled_var_ci
    print(f"{n:2d}   {s.mean_phi:.4f}    {s.n_mean:.3f}    {s.scaled_var:.4f} ({lo:.4f}, {hi:.4f})"
          f"   {s.event_frequencies['h_all']:.3f}    {tal[n]['scaled']:.4f}")
t = trend_table(stats)
print(f"max/min of n^d Var: {t['scaled_var_ratio']:.2f}   of n*mean: {t['n_mean_ratio']:.2f}")
print("observed band of n*phi:", tuple(round(x, 3) for x in t["band_observed"]))
