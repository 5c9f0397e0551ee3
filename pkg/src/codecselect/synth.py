"""Synthetic worlds with known means, and Monte-Carlo checks of the guarantees.

A world assigns a distribution to every (codec, criterion) pair.  True
means and variances come from closed forms, so selection results can be
scored against exact ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import stats

from .core import ConstraintSpace, CriterionMatrix, Objective
from .errors import ConfigurationError, DomainError, InsufficientSamplesError, ParameterError
from .gs import GsConfig, global_sampling
from .psp import PspConfig, psp


# -- distributions ----------------------------------------------------------


@dataclass(frozen=True)
class Point:
    value: float
    bounded = property(lambda self: 0.0 <= self.value <= 1.0)

    def mean(self):
        return float(self.value)

    def variance(self):
        return 0.0

    def sample(self, rng, size):
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.a <= self.b:
            raise ConfigurationError(f"uniform needs a <= b, got ({self.a}, {self.b})")

    bounded = property(lambda self: 0.0 <= self.a and self.b <= 1.0)

    def mean(self):
        return (self.a + self.b) / 2.0

    def variance(self):
        return (self.b - self.a) ** 2 / 12.0

    def sample(self, rng, size):
        return rng.uniform(self.a, self.b, size)


@dataclass(frozen=True)
class Beta:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigurationError("beta parameters must be positive")

    bounded = True

    @classmethod
    def from_moments(cls, mean: float, std: float) -> "Beta":
        """Beta with the given mean and standard deviation."""
        var = std * std
        if not (0 < mean < 1) or not (0 < var < mean * (1 - mean)):
            raise ConfigurationError(f"no beta distribution with mean={mean}, std={std}")
        k = mean * (1 - mean) / var - 1
        return cls(mean * k, (1 - mean) * k)

    def mean(self):
        return self.alpha / (self.alpha + self.beta)

    def variance(self):
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1))

    def sample(self, rng, size):
        return rng.beta(self.alpha, self.beta, size)


@dataclass(frozen=True)
class TruncatedGaussian:
    """Gaussian ``(mu, sigma)`` conditioned on ``[0, 1]``."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("truncated gaussian needs sigma > 0")

    bounded = True

    def _dist(self):
        return stats.truncnorm((0 - self.mu) / self.sigma, (1 - self.mu) / self.sigma, self.mu, self.sigma)

    def mean(self):
        return float(self._dist().mean())

    def variance(self):
        return float(self._dist().var())

    def sample(self, rng, size):
        return np.clip(self._dist().rvs(size=size, random_state=rng), 0.0, 1.0)


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ConfigurationError("gaussian needs sigma >= 0")

    bounded = False

    def mean(self):
        return float(self.mu)

    def variance(self):
        return float(self.sigma) ** 2

    def sample(self, rng, size):
        return rng.normal(self.mu, self.sigma, size)


Distribution = Union[Point, Uniform, Beta, TruncatedGaussian, Gaussian]

DISTRIBUTIONS = {
    "point": Point,
    "uniform": Uniform,
    "beta": Beta,
    "truncated_gaussian": TruncatedGaussian,
    "gaussian": Gaussian,
}


def dist_name(dist) -> str:
    for name, cls in DISTRIBUTIONS.items():
        if isinstance(dist, cls):
            return name
    raise ConfigurationError(f"unknown distribution {dist!r}")


# -- worlds -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SyntheticWorld:
    codec_ids: tuple
    criterion_ids: tuple
    specs: dict  # (codec_id, criterion_id) -> distribution
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "codec_ids", tuple(self.codec_ids))
        object.__setattr__(self, "criterion_ids", tuple(self.criterion_ids))
        specs = dict(self.specs)
        missing = [(h, c) for h in self.codec_ids for c in self.criterion_ids if (h, c) not in specs]
        if missing:
            raise ConfigurationError(f"world is missing distributions for {missing[:10]}")
        object.__setattr__(self, "specs", specs)

    @classmethod
    def from_grid(cls, grid, codec_ids=None, criterion_ids=None, seed=0) -> "SyntheticWorld":
        """Build from a nested list ``grid[codec][criterion]`` of distributions."""
        codec_ids = codec_ids or [f"h{k}" for k in range(len(grid))]
        criterion_ids = criterion_ids or [f"c{k}" for k in range(len(grid[0]))]
        specs = {
            (h, c): grid[a][b] for a, h in enumerate(codec_ids) for b, c in enumerate(criterion_ids)
        }
        return cls(codec_ids, criterion_ids, specs, seed)

    @property
    def bounded(self) -> bool:
        return all(d.bounded for d in self.specs.values())

    @property
    def true_means(self) -> np.ndarray:
        return np.array([[self.specs[h, c].mean() for c in self.criterion_ids] for h in self.codec_ids])

    @property
    def true_variances(self) -> np.ndarray:
        return np.array(
            [[self.specs[h, c].variance() for c in self.criterion_ids] for h in self.codec_ids]
        )

    def mean_vector(self, h) -> dict:
        return {c: self.specs[h, c].mean() for c in self.criterion_ids}


def sample_matrix(world: SyntheticWorld, m: int, seed: Optional[int] = None) -> CriterionMatrix:
    """Draw ``m`` i.i.d. samples evaluated under every codec.

    Each (codec, criterion) cell reads from its own stream keyed on
    ``(seed, codec index, criterion index)``; sample ``i`` is the i-th draw,
    so a smaller ``m`` yields a prefix of a larger one.
    """
    if m < 2:
        raise InsufficientSamplesError(f"m must be >= 2, got {m}")
    seed = world.seed if seed is None else seed
    values = np.empty((len(world.codec_ids), len(world.criterion_ids), m))
    for a, h in enumerate(world.codec_ids):
        for b, c in enumerate(world.criterion_ids):
            rng = np.random.default_rng(np.random.SeedSequence([seed, a, b]))
            values[a, b] = world.specs[h, c].sample(rng, m)
    return CriterionMatrix(world.codec_ids, world.criterion_ids, [str(i) for i in range(m)], values)


@dataclass(frozen=True)
class OracleSelection:
    feasible: frozenset
    h_star: frozenset
    v_star: Optional[float]


def oracle_select(world: SyntheticWorld, objective: Objective, constraints: ConstraintSpace) -> OracleSelection:
    """Exact constrained optimum from closed-form means."""
    feasible = [h for h in world.codec_ids if constraints.contains(world.mean_vector(h))]
    if not feasible:
        return OracleSelection(frozenset(), frozenset(), None)
    values = {h: objective.value(world.mean_vector(h)) for h in feasible}
    v_star = min(values.values())
    # relative tolerance keeps exact ties from being split by rounding
    tol = 1e-12 * max(1.0, abs(v_star))
    h_star = frozenset(h for h, v in values.items() if v <= v_star + tol)
    return OracleSelection(frozenset(feasible), h_star, v_star)


# -- coverage ---------------------------------------------------------------

CLAUSES = ("liberal_empty", "conservative_infeasible", "rectangle_miss", "objective_miss", "sandwich", "optimum_pruned")


@dataclass
class CoverageStats:
    trials: int
    failures: dict = field(default_factory=lambda: {k: 0 for k in CLAUSES})
    simultaneous_failures: int = 0
    rejections: int = 0
    rejection_messages: list = field(default_factory=list)
    width_monotone_violations: int = 0
    uncertified: int = 0
    reasons: dict = field(default_factory=dict)

    @property
    def evaluated(self) -> int:
        return self.trials - self.rejections

    @property
    def failure_fraction(self) -> float:
        return self.simultaneous_failures / self.evaluated if self.evaluated else 0.0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "evaluated": self.evaluated,
            "rejections": self.rejections,
            "rejection_messages": self.rejection_messages[:10],
            "failures": dict(self.failures),
            "simultaneous_failures": self.simultaneous_failures,
            "failure_fraction": self.failure_fraction,
            "width_monotone_violations": self.width_monotone_violations,
            "uncertified": self.uncertified,
            "reasons": dict(sorted(self.reasons.items())),
        }


def evaluate_report(report, world: SyntheticWorld, cfg, oracle: Optional[OracleSelection] = None) -> dict:
    """Clause-level pass/fail of one report against the world's truth."""
    oracle = oracle or oracle_select(world, cfg.objective, cfg.constraints)
    rect = report.rectangle
    means = world.true_means
    w = cfg.objective.vector(world.criterion_ids)
    true_v = means @ w
    obj = report.objective_interval
    out = {
        "liberal_empty": bool(oracle.feasible) and not report.liberal_set,
        "conservative_infeasible": not set(report.conservative_set) <= oracle.feasible,
        "rectangle_miss": not bool(rect.contains(means).all()),
        "objective_miss": any(
            not (obj[h][0] <= true_v[a] <= obj[h][1]) for a, h in enumerate(world.codec_ids)
        ),
        "optimum_pruned": False,
    }
    lower, upper = report.sandwich
    sandwich_bad = False
    if oracle.v_star is not None:
        if lower is not None and lower > oracle.v_star:
            sandwich_bad = True
        if upper is not None and upper < oracle.v_star:
            sandwich_bad = True
    out["sandwich"] = sandwich_bad
    if report.trace:
        survivors = set(report.params["survivors"])
        out["optimum_pruned"] = not oracle.h_star <= survivors
    return out


def widths_monotone(report) -> bool:
    """Every cell's width is non-increasing across PSP iterations."""
    prev = None
    for entry in report.trace:
        width = entry.hi - entry.lo
        if prev is not None:
            with np.errstate(invalid="ignore"):
                grew = width > prev
            if np.any(grew & np.isfinite(prev)):
                return False
        prev = width
    return True


def run_selection(matrix: CriterionMatrix, cfg):
    if isinstance(cfg, PspConfig):
        return psp(matrix, cfg)
    if isinstance(cfg, GsConfig):
        return global_sampling(matrix, cfg)
    raise ConfigurationError(f"unsupported configuration {type(cfg).__name__}")


def trial_seeds(seed: int, trials: int) -> list:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(trials)]


def coverage_trial(world: SyntheticWorld, m: int, cfg, trials: int, seed: int = 0) -> CoverageStats:
    """Monte-Carlo frequency with which the selection guarantees fail."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    stats_ = CoverageStats(trials=trials)
    oracle = oracle_select(world, cfg.objective, cfg.constraints)
    for s in trial_seeds(seed, trials):
        matrix = sample_matrix(world, m, s)
        try:
            report = run_selection(matrix, cfg)
        except DomainError as exc:
            stats_.rejections += 1
            if len(stats_.rejection_messages) < 10:
                stats_.rejection_messages.append(str(exc))
            continue
        clauses = evaluate_report(report, world, cfg, oracle)
        for k, failed in clauses.items():
            stats_.failures[k] += int(failed)
        stats_.simultaneous_failures += int(any(clauses.values()))
        stats_.reasons[report.terminated_reason] = stats_.reasons.get(report.terminated_reason, 0) + 1
        if not report.certified:
            stats_.uncertified += 1
        if report.trace and not widths_monotone(report):
            stats_.width_monotone_violations += 1
    return stats_


def binomial_tolerance(delta: float, trials: int, k: float = 3.0) -> float:
    """``delta + k sqrt(delta (1 - delta) / trials)``."""
    return delta + k * math.sqrt(delta * (1 - delta) / trials)
