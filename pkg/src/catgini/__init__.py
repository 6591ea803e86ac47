"""Categorical Gini correlation and tests comparing two predictor groups."""

__version__ = "0.1.0"

from .core import (
    CatGiniError,
    DataError,
    DegeneracyError,
    DegeneratePredictorError,
    DegenerateVarianceError,
    LabeledDataset,
    PairedDataset,
    RngStream,
    concat_features,
    load_csv,
    load_paired_csv,
    write_csv,
)
from .gini import (
    DistanceSums,
    GiniEstimate,
    distance_correlation,
    distance_sums,
    gini_correlation,
    gmd,
)
from .inference import (
    BootstrapResult,
    ComparisonResult,
    PermutationResult,
    added_value_test,
    asn_test,
    bootstrap_test,
    cgc_difference,
    jackknife_variance,
    permutation_independence_test,
    projection_test,
    projection_variance,
)
from .simgen import (
    CovarianceSpec,
    ScenarioConfig,
    ar_covariance,
    gen_scenario,
    psd_sqrt,
    sample_exponential_vector,
    sample_mvnormal,
)
from .harness import (
    ExperimentPlan,
    ReplicateAbortError,
    ScenarioReport,
    export_report,
    run_beta_sweep,
    run_experiment,
)
