"""Relative pose from a single affine correspondence.

Minimal solvers for two-view relative pose under a planar-motion
assumption (calibrated, calibrated least-squares, and unknown focal
length) and with a known vertical direction, plus RANSAC / histogram
voting wrappers and a synthetic evaluation harness.
"""

from . import errors
from .geometry import (
    NORMALIZED,
    PIXEL,
    AffineCorrespondence,
    GravityAlignment,
    ImagePoint,
    PlanarMotion,
    RelativePose,
    SimplifiedEssential,
    TrigVector,
    affine_constraint_residual,
    align_point,
    epipolar_residual,
    essential_from_pose,
    essential_residuals,
    planar_essential,
    planar_pose,
    recover_original_pose,
    rotation_error,
    translation_error,
    triangulate_depths,
)
from .planar import (
    FocalSolution,
    PlanarSystem,
    StationaryPoint,
    build_planar_system,
    solve_planar_closed_form,
    solve_planar_least_squares,
    solve_planar_unknown_focal,
)
from .robust import (
    RansacConfig,
    RansacResult,
    VotingConfig,
    histogram_voting,
    model_essential,
    model_pose,
    ransac,
    residual_pixels,
    resolve_translation_sign,
)
from .synth import (
    MotionSpec,
    NoiseConfig,
    SceneConfig,
    SweepSpec,
    SyntheticInstance,
    TrialRecord,
    affine_from_homography,
    generate_instance,
    quintile_rmse,
    random_outlier_acs,
    run_sweep,
)
from .vertical import (
    AlignedSystem,
    ConstraintSystem,
    NullspaceParam,
    QuarticPolys,
    build_aligned_system,
    build_constraint_matrix,
    decompose_simplified,
    eliminate_to_quartic,
    nullspace_basis,
    solve_beta_gamma,
    solve_vertical,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
