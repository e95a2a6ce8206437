"""Layer-wise gradient standardization around pluggable host optimizers.

The package provides blocked parameter vectors, the centralize/normalize
gradient transform, SGD/AdamW/AdaBelief hosts with LookAhead and
softplus calibration, toy landscapes with a finite-difference oracle,
executable escape/convergence checks, and a CLI harness.
"""

from .blocked import BlockedVector, BlockPartition, from_blocks, zeros
from .landscapes import (
    BlobsDataset,
    GaussianWells1D,
    Landscape,
    MlpTask,
    Quadratic,
    Rosenbrock,
    Well,
    fd_gradient,
    make_blobs,
)
from .optimizers import (
    ConfigError,
    HostOptimizerConfig,
    LookAheadConfig,
    OptimizerState,
    Schedule,
    SingPipelineConfig,
    apply_weight_decay,
    host_update,
    lookahead_step,
    lr_at,
    softplus,
    step,
)
from .standardize import StandardizeConfig, ZeroGradientBlockError, centralize, gamma, sing_transform
from .theory import (
    AuditResult,
    ConvergenceRecipe,
    EscapeThresholds,
    convergence_audit,
    escape_thresholds,
    estimate_basin_radius,
    phi_pseudo_norm,
    single_step_escape_check,
    structured_phi_norm,
)
from .trace import RunTrace

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "BlockedVector",
    "zeros",
    "from_blocks",
    "StandardizeConfig",
    "ZeroGradientBlockError",
    "centralize",
    "gamma",
    "sing_transform",
    "ConfigError",
    "HostOptimizerConfig",
    "LookAheadConfig",
    "Schedule",
    "SingPipelineConfig",
    "OptimizerState",
    "softplus",
    "lr_at",
    "apply_weight_decay",
    "host_update",
    "lookahead_step",
    "step",
    "Landscape",
    "Quadratic",
    "Rosenbrock",
    "GaussianWells1D",
    "Well",
    "BlobsDataset",
    "make_blobs",
    "MlpTask",
    "fd_gradient",
    "EscapeThresholds",
    "escape_thresholds",
    "estimate_basin_radius",
    "single_step_escape_check",
    "ConvergenceRecipe",
    "AuditResult",
    "convergence_audit",
    "phi_pseudo_norm",
    "structured_phi_norm",
    "RunTrace",
    "__version__",
]
