"""
Progressive sampling with pruning
=================================

Instead of spending the whole budget at once, progressive sampling draws
doubling batches, intersects the confidence intervals it has seen so far
and drops codecs that can no longer be optimal. This script follows one
run iteration by iteration.
"""

# %%
import numpy as np

from codecselect import Beta, BoundMethod, Objective, PspConfig, SyntheticWorld, psp, sample_matrix

targets = [0.30] + list(np.linspace(0.38, 0.70, 12))
quality = np.linspace(0.2, 0.7, 13)
world = SyntheticWorld.from_grid(
    [[Beta.from_moments(float(p), 0.1), Beta.from_moments(float((3 * v - p) / 2), 0.1)]
     for v, p in zip(targets, quality)],
    codec_ids=[f"v{k}" for k in range(13)],
    criterion_ids=["peaq", "cr"],
)
objective = Objective({"peaq": 1 / 3, "cr": 2 / 3})
matrix = sample_matrix(world, 16000, seed=0)

# %%
cfg = PspConfig(s0=25, epsilon=0.001, delta=0.01, method=BoundMethod.ASYMPTOTIC_EMD, objective=objective)
report = psp(matrix, cfg)
for entry in report.trace:
    width = float(np.mean(entry.hi - entry.lo))
    print(f"iteration {entry.iteration}: batch={entry.batch_size:>5} active={len(entry.active_codecs):>2} "
          f"mean width={width:.4f} pruned={list(entry.pruned)}")
print("terminated:", report.terminated_reason, "selected:", list(report.liberal_set),
      "samples used:", report.params["samples_used"])

# %%
# With the finite-sample EMD bound the same budget is not enough to isolate
# a single codec.
slow = psp(matrix, PspConfig(25, 0.001, 0.01, BoundMethod.FINITE_SAMPLE_EMD, objective))
print("finite-emd:", slow.terminated_reason, "survivors:", slow.params["survivors"])
