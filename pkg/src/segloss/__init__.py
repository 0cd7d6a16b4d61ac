"""Numerical segmentation losses over plain numpy arrays.

Layout convention: label maps are integer arrays of shape ``dims`` (rank
1-3); probability and one-hot maps put the class axis last, ``dims + (C,)``
with C >= 2. Every loss returns a LossResult carrying the scalar value and
its exact gradient with respect to the probabilities.
"""

from .boundary import (
    BoundaryContext,
    bd_mismatch_form,
    boundary_context,
    boundary_gt_term,
    boundary_loss,
    dice_coefficient,
    dice_mismatch_form,
    foreground_boundary_distances,
    hd_loss,
    hd_mismatch_form,
    iou_coefficient,
)
from .compound import combo_loss, ell_loss
from .config import DEFAULT_CONFIG, LossConfig
from .core import LossResult, one_hot, softmax, softmax_vjp, validate_labels, validate_prob
from .distance import (
    boundary_penalty_map,
    edt,
    edt_bruteforce,
    hausdorff_exact,
    level_set,
    sentinel_value,
    unsigned_boundary_distance,
)
from .distribution import ce, dpce, focal, topk, wce
from .errors import DegenerateInputError, SeglossError, TensorFileError, ValidationError
from .gradcheck import GradReport, finite_diff_grad, gradcheck, run_suite
from .optimize import GENERATOR_ID, OptTrajectory, optimize
from .region import (
    asymmetric_loss,
    dice_loss,
    focal_tversky_loss,
    generalized_dice_loss,
    iou_loss,
    penalty_gd_loss,
    ss_loss,
    tversky_index,
    tversky_loss,
)
from .registry import evaluate, loss_entry, loss_names, prepare, prepare_frozen, resolve_params
from .relations import RelationCheck, run_all, run_connection_checks, run_identity_checks
from .tensorio import file_digest, read_pgm, read_tensor, write_tensor

__version__ = "0.1.0"

__all__ = [
    "BoundaryContext",
    "DEFAULT_CONFIG",
    "DegenerateInputError",
    "GENERATOR_ID",
    "GradReport",
    "LossConfig",
    "LossResult",
    "OptTrajectory",
    "RelationCheck",
    "SeglossError",
    "TensorFileError",
    "ValidationError",
    "asymmetric_loss",
    "bd_mismatch_form",
    "boundary_context",
    "boundary_gt_term",
    "boundary_loss",
    "boundary_penalty_map",
    "ce",
    "combo_loss",
    "dice_coefficient",
    "dice_loss",
    "dice_mismatch_form",
    "dpce",
    "edt",
    "edt_bruteforce",
    "ell_loss",
    "evaluate",
    "file_digest",
    "finite_diff_grad",
    "focal",
    "focal_tversky_loss",
    "foreground_boundary_distances",
    "generalized_dice_loss",
    "gradcheck",
    "hausdorff_exact",
    "hd_loss",
    "hd_mismatch_form",
    "iou_coefficient",
    "iou_loss",
    "level_set",
    "loss_entry",
    "loss_names",
    "one_hot",
    "optimize",
    "penalty_gd_loss",
    "prepare",
    "prepare_frozen",
    "read_pgm",
    "read_tensor",
    "resolve_params",
    "run_all",
    "run_connection_checks",
    "run_identity_checks",
    "run_suite",
    "sentinel_value",
    "softmax",
    "softmax_vjp",
    "ss_loss",
    "tversky_index",
    "tversky_loss",
    "unsigned_boundary_distance",
    "validate_labels",
    "validate_prob",
    "wce",
    "write_tensor",
]
