"""Agnostic multiclass PAC learning over finite domains.

Dimension computations, the one-inclusion learner, boosting-based sample
compression, multiplicative-weights list learning, list-bounded learning,
and the three-stage learner that combines them.
"""

from .compression import (
    CompressionError,
    CompressionParams,
    SelectionScheme,
    cc_enumerate,
    scsr_compress,
    scsr_reconstruct,
    scsr_scheme,
)
from .core import (
    BudgetExceeded,
    Distribution,
    HypothesisClass,
    InvariantViolation,
    Menu,
    NotRealizableError,
    best_in_class,
    empirical_error,
    error_rate,
    majority_vote,
    masked_loss,
    menu_loss,
    realizable_subsequence,
    sample,
)
from .dimensions import (
    density,
    ds_dimension,
    estimate_realizable_dimension,
    is_pseudo_cube,
    natarajan_dimension,
)
from .listbound import ll_predict, lscs_compress, lscs_reconstruct, menu_from_list
from .listlearn import adaptive_reward, list_miss_probability, mw_core, mw_list_learn
from .oig import build_oig, min_max_outdegree_orientation, oig_predict
from .pipeline import MaplConfig, mapl, run_mapl, sample_size_calculator, split_thirds

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CompressionError",
    "CompressionParams",
    "Distribution",
    "HypothesisClass",
    "InvariantViolation",
    "MaplConfig",
    "Menu",
    "NotRealizableError",
    "SelectionScheme",
    "adaptive_reward",
    "best_in_class",
    "build_oig",
    "cc_enumerate",
    "density",
    "ds_dimension",
    "empirical_error",
    "error_rate",
    "estimate_realizable_dimension",
    "is_pseudo_cube",
    "list_miss_probability",
    "ll_predict",
    "lscs_compress",
    "lscs_reconstruct",
    "majority_vote",
    "mapl",
    "masked_loss",
    "menu_from_list",
    "menu_loss",
    "min_max_outdegree_orientation",
    "mw_core",
    "mw_list_learn",
    "natarajan_dimension",
    "oig_predict",
    "realizable_subsequence",
    "run_mapl",
    "sample",
    "sample_size_calculator",
    "scsr_compress",
    "scsr_reconstruct",
    "scsr_scheme",
    "split_thirds",
]
