"""sdrkit: sufficient dimension reduction toolkit.

Predictor screening (forward and inverse), principal fitted components,
leading principal components, a binary-predictor PFC fitter driven by
alternating logistic blocks and Grassmann ascent, the latent-SPC model
bridge, and a seeded Monte Carlo harness.
"""

from .basis import BasisSpec, FyMatrix, build_fy
from .binary_pfc import (
    BinaryPFC,
    BinaryPfcState,
    SubstepWarning,
    bernoulli_loglik,
    fit_binary_pfc,
    gamma_step,
    loglik_gradients,
    mu_step,
    nu_step,
)
from .data import Dataset, load_csv
from .exceptions import (
    CollinearityError,
    DegenerateBasisError,
    DegenerateLoadingError,
    EmptyDataError,
    EmptyReductionError,
    NumericalError,
    RankDeficiencyError,
    ValidationError,
)
from .grassmann import GrassmannStep, grassmann_maximize
from .latent import (
    LatentSpcModel,
    PfcForm,
    latent_to_pfc,
    verify_covariance_blocks,
    verify_mean_structure,
)
from .logistic import LogisticFit, fit_logistic, fit_logistic_batch
from .pfc import (
    LeadingPrincipalComponents,
    PrincipalFittedComponents,
    fit_pfc,
    fit_spc,
    project,
)
from .screening import (
    PredictorScreener,
    ScreeningConfig,
    ScreeningResult,
    forward_screen,
    inverse_screen,
    reduce_columns,
)
from .simulate import (
    GAMMA_PRESETS,
    AngleStudyReport,
    SimulationConfig,
    gen_binary_data,
    gen_screening_scenario,
    run_angle_study,
    table1_config,
)
from .subspace import ReductionBasis, principal_angles, subspace_angle

__version__ = "0.1.0"

__all__ = [
    "AngleStudyReport",
    "BasisSpec",
    "BinaryPFC",
    "BinaryPfcState",
    "CollinearityError",
    "Dataset",
    "DegenerateBasisError",
    "DegenerateLoadingError",
    "EmptyDataError",
    "EmptyReductionError",
    "FyMatrix",
    "GAMMA_PRESETS",
    "GrassmannStep",
    "LatentSpcModel",
    "LeadingPrincipalComponents",
    "LogisticFit",
    "NumericalError",
    "PfcForm",
    "PredictorScreener",
    "PrincipalFittedComponents",
    "RankDeficiencyError",
    "ReductionBasis",
    "ScreeningConfig",
    "ScreeningResult",
    "SimulationConfig",
    "SubstepWarning",
    "ValidationError",
    "bernoulli_loglik",
    "build_fy",
    "fit_binary_pfc",
    "fit_logistic",
    "fit_logistic_batch",
    "fit_pfc",
    "fit_spc",
    "forward_screen",
    "gamma_step",
    "gen_binary_data",
    "gen_screening_scenario",
    "grassmann_maximize",
    "inverse_screen",
    "latent_to_pfc",
    "load_csv",
    "loglik_gradients",
    "mu_step",
    "nu_step",
    "principal_angles",
    "project",
    "reduce_columns",
    "run_angle_study",
    "subspace_angle",
    "table1_config",
    "verify_covariance_blocks",
    "verify_mean_structure",
]
