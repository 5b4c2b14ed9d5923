"""Posterior simulation for the Dirichlet-Laplace normal-means model.

Three Gibbs-type transition kernels (the published incorrect ordering, the
corrected ordering, and the alternative parameterization), a
joint-distribution correctness harness that separates them empirically, and
a squared-error simulation study runner.
"""

__version__ = "0.1.0"

from .errors import DegenerateStateError, NumericalError, ParameterError
from .rng import RngStream
from .distributions import (
    GigParams,
    gig_moment,
    sample_dirichlet,
    sample_exponential,
    sample_gamma,
    sample_gig,
    sample_inverse_gaussian,
)
from .model import (
    AltHyperState,
    HyperState,
    PriorConfig,
    conditional_variances,
    prior_draw_hyper,
    prior_draw_hyper_alt,
    prior_draw_theta,
    update_lambda,
    update_phi,
    update_psi,
    update_tau,
    update_theta,
)
from .kernels import (
    ChainConfig,
    KernelId,
    SampleMatrix,
    hyper_step,
    kernel_step_alternative,
    kernel_step_corrected,
    kernel_step_original,
    run_posterior_chain,
)
from .geweke import (
    BUILTIN_TEST_FUNCTIONS,
    PRIOR_REDRAW,
    GewekeReport,
    TestFunction,
    effective_sample_size,
    geweke_report,
    ks_two_sample,
    qq_points,
    run_mcs,
    run_scs,
)
from .simstudy import (
    ScenarioGrid,
    SimTable,
    gen_data,
    gen_truth,
    run_replicate,
    run_study,
)

__all__ = [
    "__version__",
    "DegenerateStateError", "NumericalError", "ParameterError",
    "RngStream",
    "GigParams", "gig_moment", "sample_dirichlet", "sample_exponential",
    "sample_gamma", "sample_gig", "sample_inverse_gaussian",
    "AltHyperState", "HyperState", "PriorConfig", "conditional_variances",
    "prior_draw_hyper", "prior_draw_hyper_alt", "prior_draw_theta",
    "update_lambda", "update_phi", "update_psi", "update_tau", "update_theta",
    "ChainConfig", "KernelId", "SampleMatrix", "hyper_step",
    "kernel_step_alternative", "kernel_step_corrected", "kernel_step_original",
    "run_posterior_chain",
    "BUILTIN_TEST_FUNCTIONS", "PRIOR_REDRAW", "GewekeReport", "TestFunction",
    "effective_sample_size", "geweke_report", "ks_two_sample", "qq_points",
    "run_mcs", "run_scs",
    "ScenarioGrid", "SimTable", "gen_data", "gen_truth", "run_replicate",
    "run_study",
]
