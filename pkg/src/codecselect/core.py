"""Domain types for codec selection.

A codec family is evaluated offline on a sample of inputs; every (codec,
criterion, sample) triple becomes one cell of a :class:`CriterionMatrix`.
Selection then works purely on that matrix, an :class:`Objective` (a
nonnegative weighting of criterion means, smaller is better) and a
:class:`ConstraintSpace` (half-spaces over the vector of criterion means).
"""

from __future__ import annotations

import enum
import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError

Interval = tuple[float, float]


def _check_ids(name: str, ids: Sequence[Hashable]) -> tuple:
    ids = tuple(ids)
    if not ids:
        raise ConfigurationError(f"{name} must be nonempty")
    if len(set(ids)) != len(ids):
        seen, dups = set(), []
        for i in ids:
            if i in seen:
                dups.append(i)
            seen.add(i)
        raise ConfigurationError(f"duplicate {name}: {dups[:10]}")
    return ids


@dataclass(frozen=True, eq=False)
class CriterionMatrix:
    """Dense table of criterion values indexed ``(codec, criterion, sample)``.

    The sample axis is ordered; the alternating signs of the maximum
    discrepancy statistic are assigned by position along it.
    """

    codec_ids: tuple
    criterion_ids: tuple
    sample_ids: tuple
    values: np.ndarray

    def __post_init__(self):
        codecs = _check_ids("codec_ids", self.codec_ids)
        criteria = _check_ids("criterion_ids", self.criterion_ids)
        samples = _check_ids("sample_ids", self.sample_ids)
        values = np.array(self.values, dtype=float, copy=True)
        expected = (len(codecs), len(criteria), len(samples))
        if values.shape != expected:
            raise ConfigurationError(f"values has shape {values.shape}, expected {expected}")
        if not np.all(np.isfinite(values)):
            h, c, i = np.argwhere(~np.isfinite(values))[0]
            raise DomainError(
                f"non-finite value at codec={codecs[h]!r}, criterion={criteria[c]!r}, "
                f"sample={samples[i]!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "codec_ids", codecs)
        object.__setattr__(self, "criterion_ids", criteria)
        object.__setattr__(self, "sample_ids", samples)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, values, codec_ids=None, criterion_ids=None, sample_ids=None):
        """Build a matrix with default integer-style identifiers."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 3:
            raise ConfigurationError("values must be a 3-index array (codec, criterion, sample)")
        n_h, n_c, m = values.shape
        return cls(
            codec_ids=codec_ids if codec_ids is not None else [f"h{k}" for k in range(n_h)],
            criterion_ids=criterion_ids if criterion_ids is not None else [f"c{k}" for k in range(n_c)],
            sample_ids=sample_ids if sample_ids is not None else [str(k) for k in range(m)],
            values=values,
        )

    @property
    def m(self) -> int:
        return len(self.sample_ids)

    @property
    def n_codecs(self) -> int:
        return len(self.codec_ids)

    @property
    def n_criteria(self) -> int:
        return len(self.criterion_ids)

    def codec_index(self, h) -> int:
        try:
            return self.codec_ids.index(h)
        except ValueError:
            raise ConfigurationError(f"unknown codec {h!r}") from None

    def criterion_index(self, c) -> int:
        try:
            return self.criterion_ids.index(c)
        except ValueError:
            raise ConfigurationError(f"unknown criterion {c!r}") from None

    def is_bounded(self) -> bool:
        """True when every cell lies in [0, 1]."""
        return bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))

    def first_unbounded_cell(self) -> Optional[tuple]:
        bad = np.argwhere((self.values < 0.0) | (self.values > 1.0))
        if len(bad) == 0:
            return None
        h, c, i = bad[0]
        return self.codec_ids[h], self.criterion_ids[c], self.sample_ids[i], float(self.values[h, c, i])

    def take(self, codecs=None, samples=None) -> "CriterionMatrix":
        """Sub-matrix over the given codec ids (in matrix order) and sample slice."""
        if codecs is None:
            h_idx = list(range(self.n_codecs))
        else:
            wanted = set(codecs)
            h_idx = [k for k, h in enumerate(self.codec_ids) if h in wanted]
            if len(h_idx) != len(wanted):
                missing = wanted - set(self.codec_ids)
                raise ConfigurationError(f"unknown codecs {sorted(map(str, missing))}")
        s = samples if samples is not None else slice(None)
        sample_ids = self.sample_ids[s] if isinstance(s, slice) else tuple(self.sample_ids[k] for k in s)
        vals = self.values[h_idx][:, :, s]
        return CriterionMatrix(
            tuple(self.codec_ids[k] for k in h_idx), self.criterion_ids, sample_ids, vals
        )

    def shuffled(self, seed: int) -> "CriterionMatrix":
        """Apply a seeded permutation to the sample axis."""
        perm = np.random.default_rng(seed).permutation(self.m)
        return CriterionMatrix(
            self.codec_ids,
            self.criterion_ids,
            tuple(self.sample_ids[k] for k in perm),
            self.values[:, :, perm],
        )

    def with_squared(self, c, name=None) -> "CriterionMatrix":
        """Append the derived criterion ``c**2`` (used for variance intervals)."""
        k = self.criterion_index(c)
        name = name if name is not None else f"{c}^2"
        vals = np.concatenate([self.values, self.values[:, k : k + 1, :] ** 2], axis=1)
        return CriterionMatrix(self.codec_ids, self.criterion_ids + (name,), self.sample_ids, vals)

    def means(self) -> np.ndarray:
        return self.values.mean(axis=2)

    def __eq__(self, other):
        if not isinstance(other, CriterionMatrix):
            return NotImplemented
        return (
            self.codec_ids == other.codec_ids
            and self.criterion_ids == other.criterion_ids
            and self.sample_ids == other.sample_ids
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class Objective:
    """Nonnegative linear objective ``V(e) = sum_c w_c e_c``; smaller is better."""

    weights: Mapping

    def __post_init__(self):
        weights = dict(self.weights)
        if not weights:
            raise ConfigurationError("objective needs at least one weight")
        for c, w in weights.items():
            if not math.isfinite(w) or w < 0:
                raise ConfigurationError(f"objective weight for {c!r} must be finite and >= 0, got {w}")
        if not any(w > 0 for w in weights.values()):
            raise ConfigurationError("objective needs at least one positive weight")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, criterion_ids) -> "Objective":
        criterion_ids = list(criterion_ids)
        return cls({c: 1.0 / len(criterion_ids) for c in criterion_ids})

    def vector(self, criterion_ids) -> np.ndarray:
        unknown = set(self.weights) - set(criterion_ids)
        if unknown:
            raise ConfigurationError(f"objective references unknown criteria {sorted(map(str, unknown))}")
        return np.array([float(self.weights.get(c, 0.0)) for c in criterion_ids])

    def value(self, e: Mapping) -> float:
        return float(sum(w * e[c] for c, w in self.weights.items() if w != 0))

    def scaled(self, factor: float) -> "Objective":
        return Objective({c: w * factor for c, w in self.weights.items()})


# Objectives from the audio experiments, keyed on conventional criterion names.
PRESET_OBJECTIVES = {
    "rmse": Objective({"rmse": 1.0}),
    "peaq": Objective({"peaq": 1.0}),
    "compression_ratio": Objective({"compression_ratio": 1.0}),
    "peaq_cr": Objective({"peaq": 1.0 / 3.0, "compression_ratio": 2.0 / 3.0}),
}


@dataclass(frozen=True)
class HalfSpace:
    """``sum_c coeffs[c] * e_c <= bound``."""

    coeffs: Mapping
    bound: float

    def __post_init__(self):
        coeffs = {c: float(a) for c, a in dict(self.coeffs).items()}
        if not all(math.isfinite(a) for a in coeffs.values()) or not math.isfinite(self.bound):
            raise ConfigurationError("half-space coefficients and bound must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bound", float(self.bound))

    def contains(self, e: Mapping) -> bool:
        return sum(a * e[c] for c, a in self.coeffs.items() if a != 0) <= self.bound

    def __str__(self):
        lhs = "+".join(f"{a!r}*{c}" for c, a in self.coeffs.items()) or "0"
        return f"{lhs}<={self.bound!r}"


@dataclass(frozen=True)
class ConstraintSpace:
    """Conjunction of half-spaces; empty means unconstrained."""

    halfspaces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))

    @property
    def criteria(self) -> set:
        return {c for hs in self.halfspaces for c in hs.coeffs}

    def contains(self, e: Mapping) -> bool:
        return all(hs.contains(e) for hs in self.halfspaces)

    def __bool__(self):
        return bool(self.halfspaces)


class Feasibility(enum.Enum):
    CERTAINLY_FEASIBLE = "certainly_feasible"
    POSSIBLY_FEASIBLE = "possibly_feasible"
    CERTAINLY_INFEASIBLE = "certainly_infeasible"


@dataclass(frozen=True, eq=False)
class ConfidenceRectangle:
    """Per (codec, criterion) intervals ``[lo, hi]`` stored as dense arrays."""

    codec_ids: tuple
    criterion_ids: tuple
    lo: np.ndarray
    hi: np.ndarray
    delta: float
    method: object
    epsilon: Optional[np.ndarray] = None

    def __post_init__(self):
        lo = np.array(self.lo, dtype=float)
        hi = np.array(self.hi, dtype=float)
        shape = (len(self.codec_ids), len(self.criterion_ids))
        if lo.shape != shape or hi.shape != shape:
            raise ConfigurationError(f"interval arrays must have shape {shape}")
        if np.any(lo > hi):
            raise DomainError("rectangle has an interval with lo > hi")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "codec_ids", tuple(self.codec_ids))
        object.__setattr__(self, "criterion_ids", tuple(self.criterion_ids))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.epsilon is not None:
            eps = np.array(self.epsilon, dtype=float)
            eps.setflags(write=False)
            object.__setattr__(self, "epsilon", eps)

    def __getitem__(self, key) -> Interval:
        h, c = key
        try:
            i, j = self.codec_ids.index(h), self.criterion_ids.index(c)
        except ValueError:
            raise ConfigurationError(f"no interval for codec={h!r}, criterion={c!r}") from None
        return float(self.lo[i, j]), float(self.hi[i, j])

    @property
    def intervals(self) -> dict:
        return {
            (h, c): (float(self.lo[i, j]), float(self.hi[i, j]))
            for i, h in enumerate(self.codec_ids)
            for j, c in enumerate(self.criterion_ids)
        }

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, means: np.ndarray) -> np.ndarray:
        """Boolean (codec, criterion) mask of which true means lie inside."""
        return (self.lo <= means) & (means <= self.hi)


@dataclass
class PspTraceEntry:
    iteration: int
    batch_size: int
    active_codecs: tuple
    lo: np.ndarray
    hi: np.ndarray
    estimates: np.ndarray
    liberal_set: tuple
    conservative_set: tuple
    pruned: tuple
    flags: dict
    violations: list = field(default_factory=list)


@dataclass
class SelectionReport:
    liberal_set: tuple
    conservative_set: tuple
    estimates: dict
    rectangle: ConfidenceRectangle
    objective_interval: dict
    sandwich: tuple
    terminated_reason: str
    certified: bool = True
    trace: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def no_feasible_codec(self) -> bool:
        return not self.liberal_set


def _weighted_corner(weights: np.ndarray, corner: np.ndarray) -> np.ndarray:
    # zero weights are skipped so that infinite endpoints never produce nan
    nz = weights != 0
    return corner[..., nz] @ weights[nz]


def objective_bounds(rect: ConfidenceRectangle, obj: Objective) -> tuple[np.ndarray, np.ndarray]:
    """Objective interval for every codec of ``rect`` as two arrays."""
    w = obj.vector(rect.criterion_ids)
    return _weighted_corner(w, rect.lo), _weighted_corner(w, rect.hi)


def objective_interval(rect: ConfidenceRectangle, obj: Objective, h) -> Interval:
    """Range of ``V`` over codec ``h``'s rectangle.

    With nonnegative weights the infimum and supremum sit at the lower and
    upper corners.
    """
    if h not in rect.codec_ids:
        raise ConfigurationError(f"no intervals for codec {h!r}")
    lo, hi = objective_bounds(rect, obj)
    k = rect.codec_ids.index(h)
    return float(lo[k]), float(hi[k])


def _halfspace_extremes(rect: ConfidenceRectangle, hs: HalfSpace) -> tuple[np.ndarray, np.ndarray]:
    best = np.zeros(len(rect.codec_ids))
    worst = np.zeros(len(rect.codec_ids))
    for c, a in hs.coeffs.items():
        if a == 0:
            continue
        if c not in rect.criterion_ids:
            raise ConfigurationError(f"constraint references unknown criterion {c!r}")
        j = rect.criterion_ids.index(c)
        low, high = a * rect.lo[:, j], a * rect.hi[:, j]
        best += np.minimum(low, high)
        worst += np.maximum(low, high)
    return best, worst


def feasibility(rect: ConfidenceRectangle, W: ConstraintSpace) -> list:
    """:func:`rectangle_vs_constraints` for every codec at once."""
    n = len(rect.codec_ids)
    infeasible = np.zeros(n, dtype=bool)
    feasible = np.ones(n, dtype=bool)
    for hs in W.halfspaces:
        best, worst = _halfspace_extremes(rect, hs)
        infeasible |= best > hs.bound
        feasible &= worst <= hs.bound
    out = []
    for k in range(n):
        if infeasible[k]:
            out.append(Feasibility.CERTAINLY_INFEASIBLE)
        elif feasible[k]:
            out.append(Feasibility.CERTAINLY_FEASIBLE)
        else:
            out.append(Feasibility.POSSIBLY_FEASIBLE)
    return out


def rectangle_vs_constraints(rect: ConfidenceRectangle, h, W: ConstraintSpace) -> Feasibility:
    if h not in rect.codec_ids:
        raise ConfigurationError(f"no intervals for codec {h!r}")
    return feasibility(rect, W)[rect.codec_ids.index(h)]
