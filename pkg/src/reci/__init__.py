"""Causal direction inference from regression-error asymmetry.

The package decides which of two observed variables causes the other by
fitting the same regression class in both directions and comparing test
errors, generates synthetic benchmark corpora with dependent cause/noise,
provides an information-geometric baseline, and numerically verifies the
variance-ratio identity that justifies the decision rule.
"""

from .asymmetry import (
    NoiseSampler,
    SyntheticModel,
    beta_noise,
    gaussian_noise,
    independence_covariance,
    linear_model,
    make_model,
    mc_variance_ratio,
    uniform_noise,
    variance_ratio_limit,
    verify_theorem,
)
from .bench import (
    BenchmarkConfig,
    BenchmarkReport,
    PairRecord,
    accuracy,
    decision_rate_curve,
    run_benchmark,
)
from .errors import (
    BothZero,
    DataError,
    DegenerateRange,
    DegenerateSpacing,
    EmptyFile,
    InsufficientSamples,
    MalformedLine,
    MetaMismatch,
    NonConvergenceWarning,
    NonIntegrable,
    NumericalError,
    ReciError,
    SingularSystem,
    TooFewPointsRemain,
    ZeroWeight,
)
from .igci import IgciConfig, igci_decide
from .infer import (
    Aggregation,
    InferenceConfig,
    confidence,
    decide_from_errors,
    reci_aggregate,
    reci_decide,
    reci_decide_threshold,
)
from .pairs import (
    CauseEffectPair,
    Decision,
    Direction,
    load_dataset,
    load_pair,
    save_pair,
    subsample,
)
from .preprocess import (
    BandwidthRule,
    ScalingKind,
    normalize,
    remove_low_density,
    standardize,
)
from .regress import (
    FittedModel,
    Log,
    ModelSpec,
    Mon,
    Nn,
    Poly,
    SplitConfig,
    Svr,
    fit,
    mse,
    parse_model_spec,
    split,
)
from .simulate import (
    GenConfig,
    SigmoidMixture,
    generate_corpus,
    generate_pair,
    rescale_interval,
    sample_sigmoid_mixture,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
