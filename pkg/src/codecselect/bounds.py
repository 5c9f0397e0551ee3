"""Empirical maximum discrepancy and confidence-interval half-widths.

Four ways of turning a sample into simultaneous intervals for the means of
a finite function class:

* ``finite_sample_emd``        2 EMD + 3 sqrt(ln(2k/delta) / 2m), values in [0, 1]
* ``asymptotic_emd``           sqrt(2) EMD + sigma (2 + 2 sqrt 2) sqrt(ln(3k/delta) / 2m)
* ``hoeffding_union``          sqrt(ln(2|H|k/delta) / 2m), values in [0, 1]
* ``gaussian_chernoff_union``  2 sigma_hat sqrt(ln(2|H|k/delta) / 2m)

Here ``k`` is the number of criteria times the number of union-bound
slots (iterations of progressive sampling).  Logarithms are natural.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ConfidenceRectangle, CriterionMatrix, Interval
from .errors import (
    BoundViolationError,
    ConfigurationError,
    DomainError,
    InsufficientSamplesError,
    ParameterError,
)

ASYMPTOTIC_CONSTANT = 2.0 + 2.0 * math.sqrt(2.0)


class BoundMethod(enum.Enum):
    FINITE_SAMPLE_EMD = "finite_sample_emd"
    ASYMPTOTIC_EMD = "asymptotic_emd"
    HOEFFDING_UNION = "hoeffding_union"
    GAUSSIAN_CHERNOFF_UNION = "gaussian_chernoff_union"

    @property
    def requires_bounded(self) -> bool:
        return self in (BoundMethod.FINITE_SAMPLE_EMD, BoundMethod.HOEFFDING_UNION)

    @property
    def is_union(self) -> bool:
        return self in (BoundMethod.HOEFFDING_UNION, BoundMethod.GAUSSIAN_CHERNOFF_UNION)

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @classmethod
    def parse(cls, name) -> "BoundMethod":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for method, alias in _CLI_NAMES.items():
            if key in (alias, method.value, method.value.replace("_", "-")):
                return method
        raise ConfigurationError(
            f"unknown bound method {name!r}; expected one of {sorted(_CLI_NAMES.values())}"
        )


_CLI_NAMES = {
    BoundMethod.FINITE_SAMPLE_EMD: "finite-emd",
    BoundMethod.ASYMPTOTIC_EMD: "asymptotic-emd",
    BoundMethod.HOEFFDING_UNION: "hoeffding",
    BoundMethod.GAUSSIAN_CHERNOFF_UNION: "gaussian-chernoff",
}


@dataclass(frozen=True)
class VarianceEstimate:
    """Plugin variance bound ``sigma_sq = 2 * max_h var_h`` (Bessel-corrected)."""

    sigma_sq: float
    per_codec: dict

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq)


def check_delta(delta, name="delta"):
    if not (isinstance(delta, (int, float)) and 0.0 < delta < 1.0):
        raise ParameterError(f"{name} must lie in (0, 1), got {delta!r}")


def _check_count(value, name, minimum=1):
    if int(value) != value or value < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {value!r}")


# -- maximum discrepancy ----------------------------------------------------


def alternating_signs(m: int) -> np.ndarray:
    """Signs ``(-1)**i`` for ``i = 1..m``: -1, +1, -1, ..."""
    signs = np.ones(m)
    signs[0::2] = -1.0
    return signs


def emd_raw_values(values: np.ndarray) -> float:
    """Unclamped EMD of a ``(codec, sample)`` array.

    An odd trailing sample is dropped so the alternating sum has equal
    numbers of each sign.
    """
    values = np.asarray(values, dtype=float)
    m = values.shape[-1]
    if m < 2:
        raise InsufficientSamplesError(f"EMD needs at least 2 samples, got {m}")
    m_even = m - (m % 2)
    per_codec = values[..., :m_even] @ alternating_signs(m_even) / m_even
    return float(np.max(per_codec))


def emd_values(values: np.ndarray) -> float:
    return max(0.0, emd_raw_values(values))


def emd_raw(matrix: CriterionMatrix, c) -> float:
    return emd_raw_values(matrix.values[:, matrix.criterion_index(c), :])


def emd(matrix: CriterionMatrix, c) -> float:
    """EMD of the class ``c o H`` over the matrix's samples, clamped at 0."""
    return max(0.0, emd_raw(matrix, c))


# -- variance ---------------------------------------------------------------


def empirical_variance_estimate(matrix: CriterionMatrix, c) -> VarianceEstimate:
    if matrix.m < 2:
        raise InsufficientSamplesError(f"variance needs at least 2 samples, got {matrix.m}")
    j = matrix.criterion_index(c)
    var = matrix.values[:, j, :].var(axis=1, ddof=1)
    per_codec = {h: float(v) for h, v in zip(matrix.codec_ids, var)}
    return VarianceEstimate(2.0 * float(var.max()), per_codec)


def variance_interval(interval_c_sq: Interval, interval_c: Interval) -> Interval:
    """Interval for ``Var c = E[c^2] - (E c)^2`` from intervals on both moments."""
    sq_lo, sq_hi = interval_c_sq
    lo, hi = interval_c
    if sq_lo > sq_hi or lo > hi:
        raise ConfigurationError("input intervals must satisfy lo <= hi")
    mean_sq_hi = max(lo * lo, hi * hi)
    mean_sq_lo = 0.0 if lo <= 0.0 <= hi else min(lo * lo, hi * hi)
    upper = sq_hi - mean_sq_lo
    if upper < 0:
        raise BoundViolationError(
            f"variance interval is empty: E[c^2] <= {sq_hi} but (E c)^2 >= {mean_sq_lo}"
        )
    return max(0.0, sq_lo - mean_sq_hi), upper


def variance_intervals(rect: ConfidenceRectangle, c, c_sq) -> dict:
    """Variance interval of criterion ``c`` for every codec of ``rect``."""
    return {h: variance_interval(rect[h, c_sq], rect[h, c]) for h in rect.codec_ids}


# -- half-widths --------------------------------------------------------------


def epsilon_finite_emd(d: float, m: int, n_criteria: int, delta: float) -> float:
    check_delta(delta)
    _check_count(m, "m")
    _check_count(n_criteria, "n_criteria")
    if d < 0:
        raise ParameterError(f"EMD must be >= 0, got {d}")
    return 2.0 * d + 3.0 * math.sqrt(math.log(2.0 * n_criteria / delta) / (2.0 * m))


def epsilon_hoeffding(m: int, n_codecs: int, n_criteria: int, delta: float) -> float:
    check_delta(delta)
    _check_count(m, "m")
    _check_count(n_codecs, "n_codecs")
    _check_count(n_criteria, "n_criteria")
    return math.sqrt(math.log(2.0 * n_codecs * n_criteria / delta) / (2.0 * m))


def epsilon_gaussian_chernoff(
    sigma_hat: float, m: int, n_codecs: int, n_criteria: int, delta: float
) -> float:
    """Union of Gaussian tails; ``sigma_hat`` is the largest empirical standard deviation."""
    if not sigma_hat >= 0:
        raise ParameterError(f"sigma_hat must be >= 0, got {sigma_hat}")
    return 2.0 * sigma_hat * epsilon_hoeffding(m, n_codecs, n_criteria, delta)


def epsilon_asymptotic_emd(
    d: float, var, m: int, n_criteria: int, delta: float, tails: str = "two"
) -> float:
    check_delta(delta)
    _check_count(m, "m", minimum=2)
    _check_count(n_criteria, "n_criteria")
    sigma_sq = var.sigma_sq if isinstance(var, VarianceEstimate) else float(var)
    if not (math.isfinite(sigma_sq) and sigma_sq >= 0):
        raise ParameterError(f"sigma_sq must be finite and >= 0, got {sigma_sq}")
    if tails not in ("one", "two"):
        raise ParameterError(f"tails must be 'one' or 'two', got {tails!r}")
    k = 2.0 if tails == "one" else 3.0
    return math.sqrt(2.0) * d + math.sqrt(sigma_sq) * ASYMPTOTIC_CONSTANT * math.sqrt(
        math.log(k * n_criteria / delta) / (2.0 * m)
    )


# -- dominance --------------------------------------------------------------


def hoeffding_dominates(
    method, n_codecs: float, delta: float, sigma: Optional[float] = None
) -> bool:
    """Whether the Hoeffding union bound is guaranteed to be at least as tight.

    For the finite-sample EMD bound: ``|H| <= (2/delta)**8``.  For the
    asymptotic one: ``|H| <= (2/delta)**(sigma^2 (2+2 sqrt 2)^2) * delta/3``.
    Both are compared in log space.
    """
    method = BoundMethod.parse(method)
    check_delta(delta)
    log_h = math.log(n_codecs)
    if method is BoundMethod.FINITE_SAMPLE_EMD:
        return log_h <= 8.0 * math.log(2.0 / delta)
    if method is BoundMethod.ASYMPTOTIC_EMD:
        if sigma is None:
            raise ConfigurationError("sigma is required for the asymptotic EMD predicate")
        exponent = sigma * sigma * ASYMPTOTIC_CONSTANT**2
        return log_h <= exponent * math.log(2.0 / delta) + math.log(delta / 3.0)
    raise ConfigurationError(f"dominance predicate is defined for EMD methods, not {method.value}")


def hoeffding_dominates_asymptotic_exact(n_codecs: float, delta: float, sigma: float) -> bool:
    """Exact solution of ``ln(2|H|/delta) <= sigma^2 K^2 ln(3/delta)``, ``K = 2 + 2 sqrt 2``.

    Equivalent to ``|H| <= (3/delta)**(sigma^2 K^2) * delta/2``; implied by
    :func:`hoeffding_dominates` (whose threshold is never larger).
    """
    check_delta(delta)
    exponent = sigma * sigma * ASYMPTOTIC_CONSTANT**2
    return math.log(n_codecs) <= exponent * math.log(3.0 / delta) + math.log(delta / 2.0)


# -- rectangles -------------------------------------------------------------


def criterion_epsilons(
    matrix: CriterionMatrix,
    method,
    delta: float,
    budget_slots: int = 1,
    n_codecs: Optional[int] = None,
) -> np.ndarray:
    """Per-criterion half-width for every criterion of ``matrix``.

    ``n_codecs`` is the size of the union for the union-bound methods; it
    defaults to the codecs present but progressive sampling passes the
    size of the initial family.
    """
    method = BoundMethod.parse(method)
    check_delta(delta)
    _check_count(budget_slots, "budget_slots")
    n_h = matrix.n_codecs if n_codecs is None else n_codecs
    _check_count(n_h, "n_codecs")
    m, n_c = matrix.m, matrix.n_criteria
    k = n_c * budget_slots
    eps = np.empty(n_c)
    for j in range(n_c):
        col = matrix.values[:, j, :]
        if method is BoundMethod.FINITE_SAMPLE_EMD:
            eps[j] = epsilon_finite_emd(emd_values(col), m, k, delta)
        elif method is BoundMethod.HOEFFDING_UNION:
            eps[j] = epsilon_hoeffding(m, n_h, k, delta)
        elif method is BoundMethod.GAUSSIAN_CHERNOFF_UNION:
            if m < 2:
                raise InsufficientSamplesError("Gaussian-Chernoff needs at least 2 samples")
            sigma_hat = math.sqrt(float(col.var(axis=1, ddof=1).max()))
            eps[j] = epsilon_gaussian_chernoff(sigma_hat, m, n_h, k, delta)
        else:
            if m < 2:
                raise InsufficientSamplesError("asymptotic EMD needs at least 2 samples")
            sigma_sq = 2.0 * float(col.var(axis=1, ddof=1).max())
            eps[j] = epsilon_asymptotic_emd(emd_values(col), sigma_sq, m, k, delta, tails="two")
    return eps


def build_rectangle(
    matrix: CriterionMatrix,
    method,
    delta: float,
    budget_slots: int = 1,
    n_codecs: Optional[int] = None,
) -> ConfidenceRectangle:
    """Intervals ``mean +- eps_c`` for every (codec, criterion) cell.

    Bounded methods reject data outside [0, 1] and clip intervals to it.
    """
    method = BoundMethod.parse(method)
    if method.requires_bounded:
        bad = matrix.first_unbounded_cell()
        if bad is not None:
            h, c, i, v = bad
            raise DomainError(
                f"{method.value} requires values in [0, 1]; codec={h!r}, criterion={c!r}, "
                f"sample={i!r} has value {v!r}"
            )
    eps = criterion_epsilons(matrix, method, delta, budget_slots, n_codecs)
    means = matrix.means()
    lo, hi = means - eps, means + eps
    if method.requires_bounded:
        lo, hi = np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)
    return ConfidenceRectangle(
        matrix.codec_ids, matrix.criterion_ids, lo, hi, delta, method, epsilon=eps
    )


def compare_bounds(
    m: int,
    n_codecs: int,
    n_criteria: int,
    delta: float,
    sigma_hat: float = 0.0,
    d: float = 0.0,
    budget_slots: int = 1,
) -> dict:
    """Two-sided widths ``2 eps`` of all four methods for one parameter set.

    ``sigma_hat`` is the largest per-codec standard deviation; the
    asymptotic EMD bound uses the plugin ``sigma^2 = 2 sigma_hat^2``.
    """
    k = n_criteria * budget_slots
    sigma_sq = 2.0 * sigma_hat * sigma_hat
    widths = {
        BoundMethod.FINITE_SAMPLE_EMD: 2 * epsilon_finite_emd(d, m, k, delta),
        BoundMethod.ASYMPTOTIC_EMD: 2 * epsilon_asymptotic_emd(d, sigma_sq, max(m, 2), k, delta),
        BoundMethod.HOEFFDING_UNION: 2 * epsilon_hoeffding(m, n_codecs, k, delta),
        BoundMethod.GAUSSIAN_CHERNOFF_UNION: 2 * epsilon_gaussian_chernoff(sigma_hat, m, n_codecs, k, delta),
    }
    sigma = math.sqrt(sigma_sq)
    return {
        "widths": widths,
        "hoeffding_dominates_finite_emd": hoeffding_dominates(BoundMethod.FINITE_SAMPLE_EMD, n_codecs, delta),
        "hoeffding_dominates_asymptotic_emd": hoeffding_dominates(
            BoundMethod.ASYMPTOTIC_EMD, n_codecs, delta, sigma=sigma
        ),
        "hoeffding_dominates_asymptotic_emd_exact": hoeffding_dominates_asymptotic_exact(
            n_codecs, delta, sigma
        ),
    }
