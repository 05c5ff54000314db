"""Multiscale quasi-interpolation of scattered data with a bias-ratio harness.

The package approximates scalar- and SPD-manifold-valued functions from
scattered samples with Shepard and moving-least-squares operators, improves
them through a nested multiscale error-correction scheme, and measures the
bias/variance split of the resulting approximations in seeded Monte-Carlo
experiments.
"""

from .errors import (
    BadWeightsError,
    EmptyDatasetError,
    NegativeRadiusError,
    NotSpdError,
)
from .geometry import (
    ScalarLine,
    SpdManifold,
    karcher_mean,
    karcher_mean_batch,
    mat_exp_sym,
    mat_log_spd,
    scalar_line,
    spd_dist,
    spd_exp,
    spd_log,
    spd_manifold,
    sym_eig,
    symmetrize,
)
from .kernels import KernelSpec, kernel_eval, mesh_norm, scaled_fill_distance_rule
from .multiscale import (
    Hierarchy,
    HierarchySpec,
    MultiscaleApproximant,
    build_hierarchy,
    fit_multiscale_manifold,
    fit_multiscale_scalar,
)
from .operators import (
    Approximant,
    ScatteredDataset,
    mls_eval,
    shepard_eval,
    shepard_eval_entrywise,
    shepard_eval_manifold,
)
from .stats import (
    PercentileSummary,
    PointMetrics,
    TrialEvaluations,
    mean_estimate,
    point_metrics,
    summarize,
    trial_metrics,
)
from .experiments import (
    DEFAULT_SWEEPS,
    EXPERIMENTS,
    ExperimentConfig,
    MetricsTable,
    NoiseSpec,
    eval_grid,
    run_experiment,
    sample_sites,
    snr_numeric_spd,
    spd_design,
    target_smooth,
    target_spd,
    target_wave,
)

__version__ = "0.1.0"
