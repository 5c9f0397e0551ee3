"""One-shot selection over the full sample (global sampling)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundMethod, build_rectangle, check_delta
from .core import (
    ConfidenceRectangle,
    ConstraintSpace,
    CriterionMatrix,
    Feasibility,
    Objective,
    SelectionReport,
    feasibility,
    objective_bounds,
)


@dataclass(frozen=True)
class GsConfig:
    delta: float
    method: BoundMethod
    objective: Objective
    constraints: ConstraintSpace = field(default_factory=ConstraintSpace)

    def __post_init__(self):
        check_delta(self.delta)
        object.__setattr__(self, "method", BoundMethod.parse(self.method))


@dataclass(frozen=True)
class Selection:
    """Candidate sets derived from one rectangle."""

    feasible_liberal: np.ndarray
    feasible_conservative: np.ndarray
    liberal: np.ndarray
    conservative: np.ndarray
    obj_lo: np.ndarray
    obj_hi: np.ndarray
    tags: list

    @property
    def sandwich(self) -> tuple:
        lower = float(self.obj_lo[self.liberal].min()) if self.liberal.any() else None
        upper = float(self.obj_hi[self.conservative].min()) if self.conservative.any() else None
        return lower, upper


def _threshold(candidates: np.ndarray, obj_lo: np.ndarray, obj_hi: np.ndarray) -> np.ndarray:
    if not candidates.any():
        return candidates.copy()
    best_upper = obj_hi[candidates].min()
    # ties at the threshold stay in
    return candidates & (obj_lo <= best_upper)


def select(rect: ConfidenceRectangle, objective: Objective, constraints: ConstraintSpace) -> Selection:
    """Liberal and conservative candidate sets for a rectangle."""
    tags = feasibility(rect, constraints)
    maybe = np.array([t is not Feasibility.CERTAINLY_INFEASIBLE for t in tags])
    surely = np.array([t is Feasibility.CERTAINLY_FEASIBLE for t in tags])
    obj_lo, obj_hi = objective_bounds(rect, objective)
    return Selection(
        feasible_liberal=maybe,
        feasible_conservative=surely,
        liberal=_threshold(maybe, obj_lo, obj_hi),
        conservative=_threshold(surely, obj_lo, obj_hi),
        obj_lo=obj_lo,
        obj_hi=obj_hi,
        tags=tags,
    )


def _ids(codec_ids, mask) -> tuple:
    return tuple(h for h, keep in zip(codec_ids, mask) if keep)


def global_sampling(matrix: CriterionMatrix, cfg: GsConfig, budget_slots: int = 1) -> SelectionReport:
    rect = build_rectangle(matrix, cfg.method, cfg.delta, budget_slots=budget_slots)
    sel = select(rect, cfg.objective, cfg.constraints)
    means = matrix.means()
    estimates = {
        (h, c): float(means[i, j])
        for i, h in enumerate(matrix.codec_ids)
        for j, c in enumerate(matrix.criterion_ids)
    }
    return SelectionReport(
        liberal_set=_ids(matrix.codec_ids, sel.liberal),
        conservative_set=_ids(matrix.codec_ids, sel.conservative),
        estimates=estimates,
        rectangle=rect,
        objective_interval={
            h: (float(sel.obj_lo[i]), float(sel.obj_hi[i])) for i, h in enumerate(matrix.codec_ids)
        },
        sandwich=sel.sandwich,
        terminated_reason="not_applicable",
        certified=True,
        params={
            "algorithm": "global_sampling",
            "method": cfg.method.value,
            "delta": cfg.delta,
            "budget_slots": budget_slots,
            "n_codecs": matrix.n_codecs,
            "n_criteria": matrix.n_criteria,
            "m": matrix.m,
            "samples_used": matrix.m,
            "objective": dict(cfg.objective.weights),
            "constraints": [str(hs) for hs in cfg.constraints.halfspaces],
            "feasible_liberal": list(_ids(matrix.codec_ids, sel.feasible_liberal)),
            "feasible_conservative": list(_ids(matrix.codec_ids, sel.feasible_conservative)),
        },
    )
