"""Iterative sketching solvers for regularized Fisher discriminant analysis."""
from .data import (CenteredDataset, HeldOut, center_and_membership, geometric_spectrum, load_csv,
                   stratified_split, synthesize_dataset)
from .errors import *  # noqa: F401,F403
from .iterative import IterationRecord, IterationTrace, SketchPolicy, iterate_pinv_fda, iterate_rfda
from .linalg import ThinSvd, pseudo_inverse, spectral_norm, thin_svd
from .sketch import (SketchOperator, apply_sketch, build_count_sketch, build_sampling_operator,
                     build_srht, identity_operator, struct_condition_value)
from .solvers import ProjectionModel, RfdaEstimate, evd_projection, exact_g, exact_pinv_f
from .spectrum import (RidgeSpectrum, effective_dof, lambda_for_dof, leverage_probs,
                       ridge_leverage_probs, ridge_spectrum, uniform_probs)
from .verify import (BoundCheck, classify_nearest_centroid, distortion_bound_check,
                     lemma_sample_size, matmul_concentration, pinv_bound_check, project,
                     relative_error)

__version__ = "0.1.0"
