"""Data-driven zonotope reachability with multi-resolution interpolation."""

from .setcalc import (
    IntervalBox,
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    contains_point,
    hausdorff_estimate,
    interval_hull,
    linear_map,
    minkowski_sum,
    mz_zono_mul,
    reduce_order,
    self_concatenate,
    support_function,
)
from .sysdata import (
    ContinuousSystem,
    DataMatrices,
    DiscreteSystem,
    check_rank,
    collect_data,
    discretize,
    exact_coarse_noise,
    simulate,
    subsample_coarse,
)
from .ddmodel import (
    ABlock,
    ModelSet,
    build_model_set,
    estimate_coarse_noise,
    extract_A_block,
    verify_membership,
)
from .reach import (
    ChainConfig,
    IraResult,
    ReachChain,
    check_tightness_premise,
    compute_anchors,
    depth_model,
    interpolate_interval,
    propagate_step,
    run_fine_chain,
    run_ira,
    run_model_based,
    step_size_sensitivity_report,
)
from .conformal import (
    BaselinePredictor,
    CalibrationInstance,
    CalibrationRecord,
    calibrate,
    conformal_quantile,
    evaluate_coverage,
    inflate,
    pathwise_score,
    pointwise_score,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
