"""Progressive sampling with pruning.

Fresh, disjoint batches of doubling size are drawn from the sample in
order.  Each batch yields a rectangle for the codecs still in play, which
is intersected with the running one; codecs that are provably infeasible
or provably worse than a provably feasible codec are dropped.  All
batches share one union-bound budget of ``n`` slots, fixed up front from
the schedule length and the initial family size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import BoundMethod, build_rectangle, check_delta
from .core import (
    ConfidenceRectangle,
    ConstraintSpace,
    CriterionMatrix,
    Objective,
    PspTraceEntry,
    SelectionReport,
)
from .errors import InsufficientSamplesError, ParameterError
from .gs import _ids, select

REASONS = ("singleton", "epsilon_optimal", "no_feasible_codec", "samples_exhausted")


@dataclass(frozen=True)
class PspConfig:
    s0: int
    epsilon: float
    delta: float
    method: BoundMethod
    objective: Objective
    constraints: ConstraintSpace = field(default_factory=ConstraintSpace)
    # None: start from [0, 1] when the method or the data is bounded
    bounded_support: Optional[bool] = None

    def __post_init__(self):
        if int(self.s0) != self.s0 or self.s0 < 2:
            raise ParameterError(f"s0 must be an integer >= 2, got {self.s0!r}")
        if not (0.0 < self.epsilon < 1.0):
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        check_delta(self.delta)
        object.__setattr__(self, "method", BoundMethod.parse(self.method))


def batch_schedule(total_samples: int, s0: int) -> tuple[int, list]:
    """Number of rounds and batch sizes ``s0, 2 s0, ..., 2**(n-1) s0``."""
    if s0 < 2:
        raise ParameterError(f"s0 must be >= 2, got {s0}")
    if total_samples < s0:
        raise InsufficientSamplesError(f"need at least s0={s0} samples, got {total_samples}")
    # integer form of floor(log2(total/s0 + 1))
    n = ((total_samples + s0) // s0).bit_length() - 1
    return n, [s0 << i for i in range(n)]


def psp(matrix: CriterionMatrix, cfg: PspConfig) -> SelectionReport:
    n, sizes = batch_schedule(matrix.m, cfg.s0)
    method = cfg.method
    codecs = matrix.codec_ids
    n_h, n_c = matrix.n_codecs, matrix.n_criteria
    bounded = cfg.bounded_support
    if bounded is None:
        bounded = method.requires_bounded or matrix.is_bounded()

    lo = np.full((n_h, n_c), 0.0 if bounded else -math.inf)
    hi = np.full((n_h, n_c), 1.0 if bounded else math.inf)
    estimates = np.full((n_h, n_c), np.nan)
    eps_last = np.full(n_c, np.nan)
    active = np.ones(n_h, dtype=bool)
    trace, violations = [], []
    offset = 0
    reason = "samples_exhausted"
    sel = None
    samples_used = 0

    for i, size in enumerate(sizes, start=1):
        rows = np.flatnonzero(active)
        batch = matrix.take(codecs=[codecs[k] for k in rows], samples=slice(offset, offset + size))
        offset += size
        samples_used += size
        fresh = build_rectangle(batch, method, cfg.delta, budget_slots=n, n_codecs=n_h)
        eps_last = fresh.epsilon
        estimates[rows] = batch.means()

        new_lo = np.maximum(lo[rows], fresh.lo)
        new_hi = np.minimum(hi[rows], fresh.hi)
        empty = new_lo > new_hi
        if empty.any():
            for a, j in np.argwhere(empty):
                violations.append(
                    {
                        "iteration": i,
                        "codec_id": codecs[rows[a]],
                        "criterion_id": matrix.criterion_ids[j],
                        "previous": (float(lo[rows[a], j]), float(hi[rows[a], j])),
                        "batch": (float(fresh.lo[a, j]), float(fresh.hi[a, j])),
                    }
                )
            new_lo[empty] = fresh.lo[empty]
            new_hi[empty] = fresh.hi[empty]
        lo[rows], hi[rows] = new_lo, new_hi

        current = ConfidenceRectangle(
            [codecs[k] for k in rows], matrix.criterion_ids, lo[rows], hi[rows], cfg.delta, method
        )
        sel = select(current, cfg.objective, cfg.constraints)

        keep = sel.feasible_liberal.copy()
        if sel.conservative.any():
            keep &= sel.obj_lo <= sel.obj_hi[sel.conservative].min()
        survivors = rows[keep]

        eps_reached = bool(
            sel.conservative.any()
            and sel.liberal.any()
            and sel.obj_hi[sel.conservative].min() <= sel.obj_lo[sel.liberal].min() + cfg.epsilon
        )
        flags = {
            "singleton": len(survivors) == 1,
            "epsilon_optimal": eps_reached,
            "no_feasible_codec": len(survivors) == 0,
            "samples_exhausted": i == n,
        }
        trace.append(
            PspTraceEntry(
                iteration=i,
                batch_size=size,
                active_codecs=tuple(codecs[k] for k in rows),
                lo=lo.copy(),
                hi=hi.copy(),
                estimates=estimates.copy(),
                liberal_set=_ids(current.codec_ids, sel.liberal),
                conservative_set=_ids(current.codec_ids, sel.conservative),
                pruned=tuple(codecs[k] for k in rows[~keep]),
                flags=flags,
                violations=[v for v in violations if v["iteration"] == i],
            )
        )
        active[:] = False
        active[survivors] = True

        if len(rows) == 1:
            # nothing left to compare against
            reason = "singleton"
            break
        fired = [r for r in ("epsilon_optimal", "singleton", "no_feasible_codec") if flags[r]]
        if fired:
            reason = fired[0]
            break

    last = trace[-1]
    current_ids = last.active_codecs
    obj_w = cfg.objective.vector(matrix.criterion_ids)
    nz = obj_w != 0
    obj_lo = lo[:, nz] @ obj_w[nz]
    obj_hi = hi[:, nz] @ obj_w[nz]
    lower = float(min(obj_lo[codecs.index(h)] for h in last.liberal_set)) if last.liberal_set else None
    upper = (
        float(min(obj_hi[codecs.index(h)] for h in last.conservative_set))
        if last.conservative_set
        else None
    )
    rect = ConfidenceRectangle(codecs, matrix.criterion_ids, lo, hi, cfg.delta, method, epsilon=eps_last)
    certified = not violations and reason != "samples_exhausted"
    return SelectionReport(
        liberal_set=last.liberal_set,
        conservative_set=last.conservative_set,
        estimates={
            (h, c): float(estimates[a, j])
            for a, h in enumerate(codecs)
            for j, c in enumerate(matrix.criterion_ids)
        },
        rectangle=rect,
        objective_interval={h: (float(obj_lo[a]), float(obj_hi[a])) for a, h in enumerate(codecs)},
        sandwich=(lower, upper),
        terminated_reason=reason,
        certified=certified,
        trace=trace,
        violations=violations,
        params={
            "algorithm": "psp",
            "method": method.value,
            "delta": cfg.delta,
            "epsilon": cfg.epsilon,
            "s0": cfg.s0,
            "n_iterations_max": n,
            "iterations": len(trace),
            "budget_slots": n,
            "n_codecs": n_h,
            "n_criteria": n_c,
            "m": matrix.m,
            "samples_used": samples_used,
            "bounded_support": bool(bounded),
            "final_active": list(current_ids),
            "survivors": [h for h, a in zip(codecs, active) if a],
            "objective": dict(cfg.objective.weights),
            "constraints": [str(hs) for hs in cfg.constraints.halfspaces],
        },
    )
