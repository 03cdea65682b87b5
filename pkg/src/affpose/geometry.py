"""Core two-view geometry: shared types, essential matrices, and error metrics.

Conventions used throughout the package:

* Image points are homogeneous ``[u, v, 1]`` column vectors.  The ``frame``
  tag distinguishes normalized-plane coordinates from centered pixel
  coordinates (principal point already subtracted).
* The relative pose maps view-i coordinates to view-j coordinates,
  ``X_j = R @ X_i + t``, so the essential matrix is ``E = [t]_x R`` and the
  epipolar constraint reads ``p_j^T E p_i = 0``.
* Planar motion lives in the XZ plane with Y as the vertical axis: a yaw
  ``theta`` about Y and a translation direction ``phi`` measured from the
  optical (Z) axis.  The translation magnitude is unobservable and fixed
  to 1 unless stated otherwise.
* All angles are radians internally; error metrics report degrees.

Every function here is pure and operates on immutable values; there is no
shared mutable state, so concurrent use needs no locking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMotion, FrameMismatch

NORMALIZED = "normalized"
PIXEL = "pixel"

_DET_WARN_EPS = 1e-8


def canonical_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(angle, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(t: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(t) @ v == cross(t, v)."""
    x, y, z = np.asarray(t, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


@dataclass(frozen=True)
class ImagePoint:
    """A 2-D image measurement with its coordinate-frame tag."""

    u: float
    v: float
    frame: str = NORMALIZED

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if self.frame not in (NORMALIZED, PIXEL):
            raise ValueError(f"unknown frame {self.frame!r}")

    def homogeneous(self) -> np.ndarray:
        return np.array([self.u, self.v, 1.0])


def _require_frame(point: ImagePoint, frame: str, what: str) -> None:
    if point.frame != frame:
        raise FrameMismatch(f"{what} expects {frame}-frame points, got {point.frame!r}")


@dataclass(frozen=True)
class AffineCorrespondence:
    """A point match plus the 2x2 linear map of the local patch warp.

    ``A`` maps infinitesimal offsets around ``p_i`` to offsets around
    ``p_j``.  A nearly singular ``A`` is physically suspicious but not
    rejected; a warning is emitted instead.
    """

    p_i: ImagePoint
    p_j: ImagePoint
    A: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        if A.shape != (2, 2) or not np.all(np.isfinite(A)):
            raise ValueError("A must be a finite 2x2 matrix")
        object.__setattr__(self, "A", A)
        if self.p_i.frame != self.p_j.frame:
            raise FrameMismatch("correspondence endpoints use different frames")
        if abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) < _DET_WARN_EPS:
            warnings.warn("affine part of correspondence is nearly singular", stacklevel=2)

    @property
    def frame(self) -> str:
        return self.p_i.frame


@dataclass(frozen=True)
class PlanarMotion:
    """Ground-plane motion: yaw ``theta`` and translation direction ``phi``.

    ``rho`` (meters) is an optional scale that no solver ever produces; it
    exists so ground-truth records can carry the simulated baseline.
    """

    theta: float
    phi: float
    rho: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", canonical_angle(self.theta))
        object.__setattr__(self, "phi", canonical_angle(self.phi))
        if self.rho is not None and self.rho < 0.0:
            raise ValueError("rho must be nonnegative")


@dataclass(frozen=True)
class TrigVector:
    """The stacked sines/cosines (x1, x2, x3, x4) of the planar unknowns.

    ``x1, x2`` encode the relative bearing ``theta - phi`` and ``x3, x4``
    encode ``phi``.  ``constrained`` records whether the two unit-circle
    constraints hold; the raw closed-form eigenvector does not satisfy
    them and is flagged accordingly.
    """

    x1: float
    x2: float
    x3: float
    x4: float
    constrained: bool = True

    def __post_init__(self) -> None:
        if self.constrained:
            if abs(self.x1**2 + self.x2**2 - 1.0) > 1e-9 or abs(self.x3**2 + self.x4**2 - 1.0) > 1e-9:
                raise ValueError("constrained TrigVector violates unit-circle constraints")

    @classmethod
    def from_motion(cls, motion: PlanarMotion) -> "TrigVector":
        a = motion.theta - motion.phi
        return cls(math.sin(a), math.cos(a), math.sin(motion.phi), math.cos(motion.phi))

    def motion(self) -> PlanarMotion:
        """Extract (theta, phi); uses only within-pair ratios, so any common
        scale on (x1, x2) or (x3, x4) is irrelevant."""
        phi = math.atan2(self.x3, self.x4)
        theta = math.atan2(self.x1, self.x2) + phi
        return PlanarMotion(theta, phi)

    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])


@dataclass(frozen=True)
class RelativePose:
    """Rotation plus unit-norm translation, defined up to translation sign."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        t = np.asarray(self.t, dtype=float).reshape(3)
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-9 or np.linalg.det(R) < 0.0:
            raise ValueError("R is not a proper rotation")
        if abs(np.linalg.norm(t) - 1.0) > 1e-9:
            raise ValueError("t must have unit norm")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class GravityAlignment:
    """Per-view pitch/roll rotation that maps camera axes onto gravity.

    ``R_imu = R_x(theta_x) @ R_z(theta_z)``; applying it to image points
    leaves only an unknown yaw between the two aligned views.
    """

    theta_x: float = 0.0
    theta_z: float = 0.0
    R_imu: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_x", float(self.theta_x))
        object.__setattr__(self, "theta_z", float(self.theta_z))
        object.__setattr__(self, "R_imu", rot_x(self.theta_x) @ rot_z(self.theta_z))


IDENTITY_ALIGNMENT = GravityAlignment(0.0, 0.0)


@dataclass(frozen=True)
class SimplifiedEssential:
    """Essential matrix of a yaw-only motion between gravity-aligned views.

    The six parameters fill the pattern
    ``[[e1, e2, e3], [e4, 0, e5], [-e3, e6, e1]]``.
    """

    e1: float
    e2: float
    e3: float
    e4: float
    e5: float
    e6: float

    @classmethod
    def from_vector(cls, e: np.ndarray) -> "SimplifiedEssential":
        return cls(*(float(v) for v in np.asarray(e, dtype=float).reshape(6)))

    @classmethod
    def from_yaw_translation(cls, theta: float, t_tilde: np.ndarray) -> "SimplifiedEssential":
        tx, ty, tz = np.asarray(t_tilde, dtype=float).reshape(3)
        c, s = math.cos(theta), math.sin(theta)
        return cls(ty * s, -tz, ty * c, tz * c - tx * s, -tx * c - tz * s, tx)

    def vector(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3, self.e4, self.e5, self.e6])

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.e1, self.e2, self.e3],
                [self.e4, 0.0, self.e5],
                [-self.e3, self.e6, self.e1],
            ]
        )


def essential_residuals(E: np.ndarray) -> tuple[float, float]:
    """(|det|, Frobenius norm of the trace-constraint matrix) after scaling
    E to unit Frobenius norm.  Both vanish exactly on essential matrices."""
    E = np.asarray(E, dtype=float)
    norm = np.linalg.norm(E)
    if norm == 0.0:
        return 0.0, 0.0
    En = E / norm
    trace_mat = 2.0 * En @ En.T @ En - np.trace(En @ En.T) * En
    return abs(np.linalg.det(En)), float(np.linalg.norm(trace_mat))


def essential_from_pose(R: np.ndarray, t: np.ndarray) -> np.ndarray:
    """E = [t]_x R.  Raises DegenerateMotion for a zero baseline."""
    t = np.asarray(t, dtype=float).reshape(3)
    if np.linalg.norm(t) < 1e-15:
        raise DegenerateMotion("zero translation yields no epipolar geometry")
    return skew(t) @ np.asarray(R, dtype=float)


def planar_pose(theta: float, phi: float, rho: float = 1.0) -> RelativePose:
    """Rotation/translation of a ground-plane motion (unit-scale t)."""
    R = rot_y(theta)
    t = -R @ np.array([rho * math.sin(phi), 0.0, rho * math.cos(phi)])
    return RelativePose(R, t / np.linalg.norm(t))


def planar_essential(theta: float, phi: float) -> np.ndarray:
    """Essential matrix of a planar motion, written directly in terms of
    the two angles (translation scale fixed to 1)."""
    a = theta - phi
    return np.array(
        [
            [0.0, math.cos(a), 0.0],
            [-math.cos(phi), 0.0, math.sin(phi)],
            [0.0, math.sin(a), 0.0],
        ]
    )


def epipolar_residual(E: np.ndarray, p_i: ImagePoint, p_j: ImagePoint) -> float:
    """Algebraic epipolar residual p_j^T E p_i for normalized points."""
    _require_frame(p_i, NORMALIZED, "epipolar_residual")
    _require_frame(p_j, NORMALIZED, "epipolar_residual")
    return float(p_j.homogeneous() @ np.asarray(E, dtype=float) @ p_i.homogeneous())


def affine_constraint_residual(E: np.ndarray, ac: AffineCorrespondence) -> np.ndarray:
    """First two components of E^T p_j + A_hat^T E p_i.

    The two epipolar lines n_i = E^T p_j and n_j = E p_i appear as
    intermediates; the residual vanishes exactly when the affine part is
    consistent with E.
    """
    if ac.frame != NORMALIZED:
        raise FrameMismatch("affine_constraint_residual expects normalized-frame input")
    E = np.asarray(E, dtype=float)
    n_i = E.T @ ac.p_j.homogeneous()
    n_j = E @ ac.p_i.homogeneous()
    return n_i[:2] + ac.A.T @ n_j[:2]


def align_point(p: ImagePoint, g: GravityAlignment) -> np.ndarray:
    """Gravity-aligned homogeneous coordinates R_imu @ [u, v, 1].

    The third component is kept as-is (not renormalized); downstream
    expressions are homogeneous in it.
    """
    _require_frame(p, NORMALIZED, "align_point")
    return g.R_imu @ p.homogeneous()


def recover_original_pose(
    R_y: np.ndarray,
    t_tilde: np.ndarray,
    g_i: GravityAlignment,
    g_j: GravityAlignment,
) -> RelativePose:
    """Undo the per-view gravity alignment of a yaw-only aligned pose."""
    t_tilde = np.asarray(t_tilde, dtype=float).reshape(3)
    norm = np.linalg.norm(t_tilde)
    if norm < 1e-15:
        raise DegenerateMotion("zero aligned translation")
    R = g_j.R_imu.T @ np.asarray(R_y, dtype=float) @ g_i.R_imu
    t = g_j.R_imu.T @ (t_tilde / norm)
    return RelativePose(R, t)


def rotation_error(R_gt: np.ndarray, R: np.ndarray) -> float:
    """Angular difference between two rotations, in degrees."""
    c = (np.trace(np.asarray(R_gt, dtype=float) @ np.asarray(R, dtype=float).T) - 1.0) / 2.0
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


def translation_error(t_gt: np.ndarray, t: np.ndarray, ignore_sign: bool = False) -> float:
    """Angle between two translation directions, in degrees.

    Sign-aware by default; with ``ignore_sign`` the antipodal ambiguity of
    essential-matrix translations is folded away (0..90 degrees).
    """
    t_gt = np.asarray(t_gt, dtype=float).reshape(3)
    t = np.asarray(t, dtype=float).reshape(3)
    n_gt, n = np.linalg.norm(t_gt), np.linalg.norm(t)
    if n_gt < 1e-15 or n < 1e-15:
        raise DegenerateMotion("translation error undefined for zero vectors")
    c = float(t_gt @ t) / (n_gt * n)
    angle = math.degrees(math.acos(min(1.0, max(-1.0, c))))
    if ignore_sign:
        return min(angle, 180.0 - angle)
    return angle


def triangulate_depths(pose: RelativePose, p_i: ImagePoint, p_j: ImagePoint) -> tuple[float, float]:
    """Depths of the triangulated point in both views.

    Solves ``z_j p_j = R (z_i p_i) + t`` for the two depths in the
    least-squares sense.  Positive depths in both views mean the candidate
    pose passes the cheirality test for this correspondence.
    """
    a = pose.R @ p_i.homogeneous()
    b = -p_j.homogeneous()
    t = pose.t
    g11 = a @ a
    g12 = a @ b
    g22 = b @ b
    r1 = -(a @ t)
    r2 = -(b @ t)
    det = g11 * g22 - g12 * g12
    if det <= 1e-14 * max(g11 * g22, 1e-300):
        return math.inf, math.inf
    return ((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det)


def batch_depths(pose: RelativePose, pts_i: np.ndarray, pts_j: np.ndarray) -> np.ndarray:
    """Vectorized two-view depths for (N, 3) homogeneous point arrays.

    Returns an (N, 2) array of (depth in view i, depth in view j); rows
    with numerically parallel rays come back as +inf.
    """
    a = pts_i @ pose.R.T           # R p_i per row
    b = -pts_j
    # normal equations of the 3x2 system [a, b] z = -t
    g11 = (a * a).sum(axis=1)
    g12 = (a * b).sum(axis=1)
    g22 = (b * b).sum(axis=1)
    r1 = -(a @ pose.t)
    r2 = -(b @ pose.t)
    det = g11 * g22 - g12 * g12
    out = np.full((pts_i.shape[0], 2), np.inf)
    ok = det > 1e-14 * np.maximum(g11 * g22, 1e-300)
    out[ok, 0] = (g22[ok] * r1[ok] - g12[ok] * r2[ok]) / det[ok]
    out[ok, 1] = (g11[ok] * r2[ok] - g12[ok] * r1[ok]) / det[ok]
    return out
