"""Sparse recovery from one-bit (sign) measurements.

The layers, bottom up: sparse_core holds the vector plumbing, measurement
draws and persists sign measurements, lp is a dense exact simplex,
solvers houses the four recovery programs on top of it, metrics scores
estimates, vc_tools bounds and certifies the halfspace class's shattering
capacity, complexity turns those bounds into sample sizes, and experiment
sweeps the whole stack into CSV records.
"""

from .complexity import (
    PacQuery,
    noisy_rate_bound,
    noisy_rate_bound_log,
    obcs_plan,
    rate_upper,
    rate_upper_log2,
    samples_necessary,
    samples_sufficient,
    uniform_convergence_bound,
    uniform_convergence_bound_log,
)
from .errors import DegenerateInputError, InvalidArgumentError, ResourceLimitError
from .experiment import (
    ExperimentConfig,
    SummaryRow,
    TrialRecord,
    aggregate,
    generate_truth,
    load_records_csv,
    run_experiment,
    run_single_trial,
    save_records_csv,
    save_summary_csv,
    write_outputs,
)
from .lp import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpSolution,
    solve_lp,
)
from .measurement import (
    MeasurementSet,
    NoiseChannel,
    SamplingDistribution,
    apply_channel,
    composed_flip_probability,
    load_measurements_csv,
    measure,
    sample_rows,
    save_measurements_csv,
)
from .metrics import (
    ErrorReport,
    EuclideanBound,
    empirical_risk,
    euclidean_bound_check,
    gen_error_closed_form,
    gen_error_monte_carlo,
    gw_alpha,
    gw_minimum,
    noisy_risk,
    recovery_report,
)
from .solvers import (
    METHOD_KSW,
    METHOD_L1SVM,
    METHOD_L1SVM_AFFINE,
    METHOD_PV,
    METHODS,
    RecoveryConfig,
    RecoverySolution,
    recover,
    recover_ksw,
    recover_l1svm,
    recover_l1svm_affine,
    recover_pv,
)
from .sparse_core import (
    SparseVector,
    normalize_euclidean,
    truncate_top_k,
    vector_from_json,
    vector_to_json,
)
from .vc_tools import (
    ShatterInstance,
    ShatterSearchResult,
    WitnessMatrix,
    build_witness,
    is_shattered,
    lemma_rearrange_holds,
    max_shattered_size,
    sauer_bound,
    vc_bounds_affine,
    vc_lower_bound,
    vc_upper_bound,
    witness_dichotomy_vector,
    witness_shatters,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
