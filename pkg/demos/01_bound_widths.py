"""
Comparing the four confidence bounds
====================================

How wide is each per-criterion confidence interval for a given sample
size? This script prints a small table and then evaluates the closed-form
predicate that says when the plain Hoeffding union bound beats the
finite-sample EMD bound, whatever the sample size.
"""

# %%
# Widths over a range of sample sizes
# -----------------------------------
# Thirteen codecs and two criteria at confidence 1 - delta = 0.99. The
# EMD terms are set to zero and the per-codec standard deviation to 0.1,
# which matches a well-behaved family of low-variance metrics.
import numpy as np

from codecselect import BoundMethod, compare_bounds, hoeffding_dominates

methods = list(BoundMethod)
print(f"{'m':>7}" + "".join(f"{m.cli_name:>20}" for m in methods))
for m in (250, 1000, 4000, 16000, 64000):
    widths = compare_bounds(m, n_codecs=13, n_criteria=2, delta=0.01, sigma_hat=0.1)["widths"]
    print(f"{m:>7}" + "".join(f"{widths[k]:>20.4f}" for k in methods))

# %%
# Every width shrinks like 1/sqrt(m), so the ratios between rows stay fixed.
# The variance-aware bounds get an extra factor of about sigma_hat.
w = np.array([compare_bounds(m, 13, 2, 0.01, 0.1)["widths"][BoundMethod.HOEFFDING_UNION]
              for m in (1000, 4000)])
print("Hoeffding width ratio for 4x the samples:", w[0] / w[1])

# %%
# When does Hoeffding dominate?
# -----------------------------
# The predicate does not depend on m: it only compares ln|H| against a
# multiple of ln(2/delta).
for n_codecs in (13, 10**3, 10**6, 10**9):
    print(n_codecs, hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, n_codecs, 0.01))
