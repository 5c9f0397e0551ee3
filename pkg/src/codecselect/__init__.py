"""Certified selection of a near-optimal codec from a finite family."""

from .bounds import (
    BoundMethod,
    VarianceEstimate,
    build_rectangle,
    compare_bounds,
    emd,
    emd_raw,
    empirical_variance_estimate,
    epsilon_asymptotic_emd,
    epsilon_finite_emd,
    epsilon_gaussian_chernoff,
    epsilon_hoeffding,
    hoeffding_dominates,
    hoeffding_dominates_asymptotic_exact,
    variance_interval,
    variance_intervals,
)
from .core import (
    PRESET_OBJECTIVES,
    ConfidenceRectangle,
    ConstraintSpace,
    CriterionMatrix,
    Feasibility,
    HalfSpace,
    Objective,
    PspTraceEntry,
    SelectionReport,
    objective_interval,
    rectangle_vs_constraints,
)
from .errors import (
    BoundViolationError,
    CodecSelectError,
    ConfigurationError,
    DomainError,
    IngestionError,
    InputError,
    InsufficientSamplesError,
    ParameterError,
    ParseError,
)
from .gs import GsConfig, global_sampling
from .psp import PspConfig, batch_schedule, psp
from .synth import (
    Beta,
    CoverageStats,
    Gaussian,
    Point,
    SyntheticWorld,
    TruncatedGaussian,
    Uniform,
    coverage_trial,
    oracle_select,
    sample_matrix,
)

__version__ = "0.1.0"
