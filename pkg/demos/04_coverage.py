"""
Checking the guarantees by simulation
=====================================

The bounds promise that all selection guarantees hold together with
probability at least 1 - delta. This script estimates the failure
frequency on a synthetic world and compares it with delta.
"""

# %%
from codecselect import BoundMethod, GsConfig, Objective, SyntheticWorld, Uniform, coverage_trial
from codecselect.synth import binomial_tolerance

world = SyntheticWorld.from_grid([[Uniform(0, 1), Uniform(0, 1)] for _ in range(3)])
objective = Objective.uniform(world.criterion_ids)

# %%
# The bounded methods are conservative and essentially never fail here.
# The variance-based Gaussian-Chernoff bound misses the rectangle now and
# then, but its failure rate is still well inside the allowance.
for method in (BoundMethod.FINITE_SAMPLE_EMD, BoundMethod.HOEFFDING_UNION,
               BoundMethod.GAUSSIAN_CHERNOFF_UNION, BoundMethod.ASYMPTOTIC_EMD):
    stats = coverage_trial(world, 400, GsConfig(0.2, method, objective), trials=500, seed=0)
    print(f"{method.cli_name:>18}: failure fraction {stats.failure_fraction:.3f} "
          f"(allowed {binomial_tolerance(0.2, 500):.3f}) per clause {stats.failures}")
