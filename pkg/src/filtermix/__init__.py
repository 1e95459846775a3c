"""Combinations of adaptive filters.

Adaptive FIR filters (LMS, NLMS, zero-attracting NLMS, RLS) and convex /
affine combinations of them, with:

- closed-form tracking analysis and optimal tuning (``theory``),
- hierarchical and multi-filter mixtures (``multi``),
- weight transfer between combined filters (``transfer``),
- a reduced-cost difference-filter realization (``lowcost``),
- sparse-plant schemes including block-wise shrinkage (``sparse``),
- second-order Volterra / combined-kernels echo cancellation (``volterra``),
- reproducible ensemble simulations (``scenario``) and configuration-driven
  experiments with CSV output (``experiments``, ``cli``).

Hot loops are compiled with numba when available; set ``FILTERMIX_NUMBA=0``
to force the pure-Python fallback (same arithmetic, much slower) and
``FILTERMIX_THREADS`` to run ensemble realizations concurrently.
"""

from ._accel import HAS_NUMBA
from .combo import (
    ACTIVATIONS,
    RULES,
    Mixer,
    combine_outputs,
    combine_weights,
    scaled_sigmoid,
    sigmoid,
    update_power,
)
from .experiments import EXPERIMENTS, ConfigError, run_config, validate_config
from .filters import LMS, NLMS, RLS, ZANLMS, AdaptiveFilter
from .lowcost import DiffCombo, quantize, reduced_width_multiplies
from .multi import AffineLayer, HierarchyNode, SoftmaxMixer, balanced_tree, softmax
from .scenario import (
    FilterSpec,
    MixerSpec,
    blockwise_ensemble,
    combo2_ensemble,
    echo_ensemble,
    lowcost_ensemble,
    single_ensemble,
)
from .sparse import BlockShrink, block_bounds
from .theory import (
    OptimalParams,
    TrackingSpec,
    classify_regime,
    combined_emse,
    cross_emse,
    lms_emse,
    nsd,
    optimal_emse,
    optimal_lambda,
    optimal_params,
    rls_emse,
)
from .transfer import TransferPolicy, maybe_transfer
from .volterra import CKCanceller, VolterraFilter, quad_regressor

__version__ = "1.0.0"

__all__ = [
    "ACTIVATIONS",
    "AdaptiveFilter",
    "AffineLayer",
    "BlockShrink",
    "CKCanceller",
    "ConfigError",
    "DiffCombo",
    "EXPERIMENTS",
    "FilterSpec",
    "HAS_NUMBA",
    "HierarchyNode",
    "LMS",
    "Mixer",
    "MixerSpec",
    "NLMS",
    "OptimalParams",
    "RLS",
    "RULES",
    "SoftmaxMixer",
    "TrackingSpec",
    "TransferPolicy",
    "VolterraFilter",
    "ZANLMS",
    "balanced_tree",
    "block_bounds",
    "blockwise_ensemble",
    "classify_regime",
    "combine_outputs",
    "combine_weights",
    "combined_emse",
    "combo2_ensemble",
    "cross_emse",
    "echo_ensemble",
    "lms_emse",
    "lowcost_ensemble",
    "maybe_transfer",
    "nsd",
    "optimal_emse",
    "optimal_lambda",
    "optimal_params",
    "quad_regressor",
    "quantize",
    "reduced_width_multiplies",
    "rls_emse",
    "run_config",
    "scaled_sigmoid",
    "sigmoid",
    "single_ensemble",
    "softmax",
    "update_power",
    "validate_config",
    "__version__",
]
