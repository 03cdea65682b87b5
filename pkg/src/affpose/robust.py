"""Robust estimation on top of the single-correspondence solvers.

Two estimators are provided: a fixed-iteration RANSAC that samples one
correspondence per hypothesis (all solvers here are one-correspondence
minimal solvers) and a histogram-voting scheme that runs the closed-form
planar solver on every correspondence and takes the mode of the joint
(theta, phi) histogram.

Scoring uses point residuals only (Sampson or symmetric epipolar
distance, in pixels); the affine part of a correspondence participates
solely inside the minimal solver.  Epipolar scores cannot tell a
translation from its negation, so the sign of the winning model is
resolved afterwards by a cheirality vote over its inliers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import planar as _planar
from . import vertical as _vertical
from .errors import AffposeError, AllIterationsFailed, EmptyInput
from .geometry import (
    NORMALIZED,
    PIXEL,
    AffineCorrespondence,
    GravityAlignment,
    PlanarMotion,
    RelativePose,
    batch_depths,
    essential_from_pose,
    planar_essential,
    planar_pose,
)
from .planar import FocalSolution

SOLVER_IDS = ("planar-cf", "planar-ls", "planar-unknown-f", "vertical-1ac")


@dataclass(frozen=True)
class RansacConfig:
    threshold: float = 2.0
    iterations: int = 100
    seed: int = 0
    residual: str = "sampson"  # or "symmetric-epipolar"

    def __post_init__(self) -> None:
        if self.threshold <= 0.0:
            raise ValueError("threshold must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.residual not in ("sampson", "symmetric-epipolar"):
            raise ValueError(f"unknown residual kind {self.residual!r}")


@dataclass(frozen=True)
class RansacResult:
    model: object
    inlier_mask: np.ndarray
    score: int
    residuals: np.ndarray

    @property
    def inlier_residuals(self) -> np.ndarray:
        return self.residuals[self.inlier_mask]


@dataclass(frozen=True)
class VotingConfig:
    bin_width_deg: float = 1.0
    refinement: str = "none"  # or "mean-of-peak-bin"

    def __post_init__(self) -> None:
        n = 360.0 / self.bin_width_deg
        if abs(n - round(n)) > 1e-9:
            raise ValueError("bin width must divide 360 evenly")
        if self.refinement not in ("none", "mean-of-peak-bin"):
            raise ValueError(f"unknown refinement {self.refinement!r}")


def model_essential(model) -> np.ndarray:
    """Essential matrix (normalized frame) of any supported model type."""
    if isinstance(model, PlanarMotion):
        return planar_essential(model.theta, model.phi)
    if isinstance(model, FocalSolution):
        return planar_essential(model.motion.theta, model.motion.phi)
    if isinstance(model, RelativePose):
        return essential_from_pose(model.R, model.t)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def model_pose(model) -> RelativePose:
    """Rotation/translation of any supported model type (unit-scale t)."""
    if isinstance(model, PlanarMotion):
        return planar_pose(model.theta, model.phi)
    if isinstance(model, FocalSolution):
        return planar_pose(model.motion.theta, model.motion.phi)
    if isinstance(model, RelativePose):
        return model
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _model_focal(model, focal: float | None) -> float:
    if isinstance(model, FocalSolution):
        return model.f
    if focal is None:
        raise ValueError("pixel residuals need a focal length for this model")
    return focal


def _pixel_points(acs: list[AffineCorrespondence]) -> tuple[np.ndarray, np.ndarray, str]:
    frame = acs[0].frame
    pts_i = np.array([[ac.p_i.u, ac.p_i.v, 1.0] for ac in acs])
    pts_j = np.array([[ac.p_j.u, ac.p_j.v, 1.0] for ac in acs])
    return pts_i, pts_j, frame


def _residuals_px(
    E: np.ndarray,
    pts_i: np.ndarray,
    pts_j: np.ndarray,
    frame: str,
    f: float | np.ndarray,
    kind: str,
) -> np.ndarray:
    """Pixelwise epipolar scores for homogeneous point rows.

    Normalized-frame points are lifted to centered pixels with the focal
    length; the fundamental matrix rescales E accordingly.  ``E`` may be a
    stack of models (..., 3, 3) with a matching stack of focal lengths, in
    which case one row of scores per model is returned.
    """
    E = np.asarray(E, dtype=float)
    f = np.asarray(f, dtype=float)
    d = np.stack([1.0 / f, 1.0 / f, np.ones_like(f)], axis=-1)
    F = d[..., :, None] * E * d[..., None, :]
    if frame == NORMALIZED:
        scale = np.stack([f, f, np.ones_like(f)], axis=-1)
        xi = pts_i * scale[..., None, :]
        xj = pts_j * scale[..., None, :]
    else:
        xi, xj = np.broadcast_to(pts_i, F.shape[:-2] + pts_i.shape), np.broadcast_to(
            pts_j, F.shape[:-2] + pts_j.shape
        )
    lines_j = np.einsum("...kl,...nl->...nk", F, xi)
    lines_i = np.einsum("...lk,...nl->...nk", F, xj)
    r = (xj * lines_j).sum(axis=-1)
    ni = lines_j[..., 0] ** 2 + lines_j[..., 1] ** 2
    nj = lines_i[..., 0] ** 2 + lines_i[..., 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "sampson":
            out = np.abs(r) / np.sqrt(ni + nj)
        else:
            out = np.abs(r) * (1.0 / np.sqrt(ni) + 1.0 / np.sqrt(nj))
    return np.where(np.isfinite(out), out, np.inf)


def residual_pixels(model, ac: AffineCorrespondence, focal: float | None = None, kind: str = "sampson") -> float:
    """Pixel-domain epipolar score of one correspondence under a model."""
    pts_i, pts_j, frame = _pixel_points([ac])
    f = _model_focal(model, focal)
    return float(_residuals_px(model_essential(model), pts_i, pts_j, frame, f, kind)[0])


def resolve_translation_sign(motion: PlanarMotion, ac: AffineCorrespondence) -> PlanarMotion:
    """Flip phi by pi if the antipodal translation better satisfies the
    positive-depth requirement for this correspondence."""
    flipped = PlanarMotion(motion.theta, motion.phi + math.pi)
    pose = planar_pose(motion.theta, motion.phi)
    z = batch_depths(pose, ac.p_i.homogeneous()[None, :], ac.p_j.homogeneous()[None, :])[0]
    if z[0] > 0.0 and z[1] > 0.0:
        return motion
    return flipped


def _cheirality_votes(pose: RelativePose, pts_i: np.ndarray, pts_j: np.ndarray, mask: np.ndarray) -> int:
    z = batch_depths(pose, pts_i[mask], pts_j[mask])
    return int(np.sum((z[:, 0] > 0.0) & (z[:, 1] > 0.0)))


def _resolve_model_sign(model, pts_i, pts_j, frame, focal, mask):
    """Pick the translation sign with the larger positive-depth inlier vote."""
    if isinstance(model, RelativePose):
        return model
    if isinstance(model, FocalSolution):
        motion, f = model.motion, model.f
    else:
        motion, f = model, None
    if frame == PIXEL:
        scale = 1.0 / (f if f is not None else focal)
        xi = pts_i * np.array([scale, scale, 1.0])
        xj = pts_j * np.array([scale, scale, 1.0])
    else:
        xi, xj = pts_i, pts_j
    flipped = PlanarMotion(motion.theta, motion.phi + math.pi)
    votes = _cheirality_votes(planar_pose(motion.theta, motion.phi), xi, xj, mask)
    votes_flipped = _cheirality_votes(planar_pose(flipped.theta, flipped.phi), xi, xj, mask)
    chosen = motion if votes >= votes_flipped else flipped
    if isinstance(model, FocalSolution):
        return FocalSolution(motion=chosen, f=model.f, g=model.g)
    return chosen


def _hypotheses(solver: str, ac: AffineCorrespondence, gravity) -> list:
    if solver == "planar-cf":
        return [_planar.solve_planar_closed_form(_planar.build_planar_system(ac))]
    if solver == "planar-ls":
        return [p.x.motion() for p in _planar.solve_planar_least_squares(_planar.build_planar_system(ac))]
    if solver == "planar-unknown-f":
        return list(_planar.solve_planar_unknown_focal(ac))
    if solver == "vertical-1ac":
        g_i, g_j = gravity
        return list(_vertical.solve_vertical(ac, g_i, g_j))
    raise ValueError(f"unknown solver id {solver!r}")


def ransac(
    solver: str,
    acs: list[AffineCorrespondence],
    cfg: RansacConfig,
    gravity: tuple[GravityAlignment, GravityAlignment] | None = None,
    focal: float | None = None,
) -> RansacResult:
    """Fixed-iteration one-correspondence RANSAC.

    Each iteration samples a single correspondence uniformly, runs the
    minimal solver, and scores every returned candidate over all
    correspondences.  The hypothesis with the most inliers wins; ties go
    to the lower mean inlier residual, then to the earlier iteration.
    Deterministic for a fixed seed.
    """
    if not acs:
        raise EmptyInput("no correspondences")
    if solver == "vertical-1ac" and gravity is None:
        raise ValueError("vertical-1ac needs the pair of gravity alignments")
    pts_i, pts_j, frame = _pixel_points(acs)
    rng = np.random.default_rng(cfg.seed)
    indices = rng.integers(0, len(acs), size=cfg.iterations)

    best = None  # (-score, mean inlier residual, iteration) and payload
    hypothesis_cache: dict[int, list | None] = {}
    for it, idx in enumerate(indices):
        idx = int(idx)
        if idx not in hypothesis_cache:
            try:
                hypothesis_cache[idx] = _hypotheses(solver, acs[idx], gravity)
            except AffposeError:
                hypothesis_cache[idx] = None
        models = hypothesis_cache[idx]
        if not models:
            continue
        if len(models) == 1:
            E_stack = model_essential(models[0])[None, :, :]
            f_stack = np.array([_model_focal(models[0], focal)])
        else:
            E_stack = np.stack([model_essential(m) for m in models])
            f_stack = np.array([_model_focal(m, focal) for m in models])
        res_stack = _residuals_px(E_stack, pts_i, pts_j, frame, f_stack, cfg.residual)
        mask_stack = res_stack <= cfg.threshold
        scores = mask_stack.sum(axis=1)
        for m_idx, model in enumerate(models):
            score = int(scores[m_idx])
            mask = mask_stack[m_idx]
            res = res_stack[m_idx]
            mean_res = float(res[mask].mean()) if score else math.inf
            key = (-score, mean_res, it)
            if best is None or key < best[0]:
                best = (key, model, mask, res)
    if best is None:
        raise AllIterationsFailed(f"all {cfg.iterations} iterations failed")
    _, model, mask, res = best
    model = _resolve_model_sign(model, pts_i, pts_j, frame, focal, mask) if mask.any() else model
    return RansacResult(model=model, inlier_mask=mask, score=int(mask.sum()), residuals=res)


def histogram_voting(acs: list[AffineCorrespondence], cfg: VotingConfig = VotingConfig()) -> PlanarMotion:
    """Mode of the joint (theta, phi) histogram of per-correspondence
    closed-form solutions.

    The translation-direction sign of each vote is first resolved by the
    positive-depth test on its own correspondence, so antipodal solutions
    vote in the same bin.
    """
    if not acs:
        raise EmptyInput("no correspondences")
    votes = []
    for ac in acs:
        try:
            motion = _planar.solve_planar_closed_form(_planar.build_planar_system(ac))
        except AffposeError:
            continue
        motion = resolve_translation_sign(motion, ac)
        votes.append((math.degrees(motion.theta), math.degrees(motion.phi)))
    if not votes:
        raise EmptyInput("no correspondence produced a usable vote")
    deg = np.asarray(votes)
    w = cfg.bin_width_deg
    nbins = int(round(360.0 / w))
    idx = np.clip(np.floor((deg + 180.0) / w).astype(int), 0, nbins - 1)
    flat = idx[:, 0] * nbins + idx[:, 1]
    counts = np.bincount(flat, minlength=nbins * nbins)
    peak = int(counts.argmax())
    members = deg[flat == peak]
    if cfg.refinement == "mean-of-peak-bin":
        theta_deg, phi_deg = members.mean(axis=0)
    else:
        theta_deg = -180.0 + (peak // nbins + 0.5) * w
        phi_deg = -180.0 + (peak % nbins + 0.5) * w
    return PlanarMotion(math.radians(theta_deg), math.radians(phi_deg))
