"""Synthetic scene generation and the noise-sweep experiment harness.

A scene is a ground plane plus a set of random planes seen by two
calibrated views.  Each correspondence is built the way a real
affine-covariant detector would be emulated: the matched point is
projected into both views, four auxiliary points on the same plane are
projected to fit a local homography, and the affine part is the Jacobian
of that homography at the matched point.  Pixel noise is applied in the
pixel frame (to the matched projections and, by default, also to the
auxiliary projections) before normalization.

Trials are independent; every trial draws its generator and estimator
streams from (seed, level index, trial index), so results do not depend
on execution order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AffposeError, EmptyInput, GenerationFailed, PointAtInfinity
from .geometry import (
    NORMALIZED,
    PIXEL,
    AffineCorrespondence,
    GravityAlignment,
    ImagePoint,
    PlanarMotion,
    RelativePose,
    planar_pose,
    rot_x,
    rot_y,
    rot_z,
    rotation_error,
    translation_error,
)
from .robust import (
    RansacConfig,
    VotingConfig,
    histogram_voting,
    model_pose,
    ransac,
)

_AXIS_COS_MIN = math.sqrt(1.0 - 0.99**2)  # rejects planes nearly containing an optical axis


@dataclass(frozen=True)
class SceneConfig:
    n_ground_points: int = 50
    n_plane_points: int = 50
    x_range: tuple[float, float] = (-5.0, 5.0)
    y_range: tuple[float, float] = (-5.0, 5.0)
    z_range: tuple[float, float] = (10.0, 20.0)
    baseline: float = 2.0
    image_size: tuple[int, int] = (640, 480)
    focal: float = 400.0
    principal_point: tuple[float, float] = (320.0, 240.0)
    ground_height: float = 2.0  # meters below the camera, along +Y
    patch_size: float = 1.0     # side of the square holding the auxiliary points
    min_v_px: float = 5.0       # planar scenes: keep points off the motion-plane trace
    max_batches: int = 64

    def __post_init__(self) -> None:
        if self.baseline <= 0.0 or self.focal <= 0.0:
            raise ValueError("baseline and focal length must be positive")
        for lo, hi in (self.x_range, self.y_range, self.z_range):
            if hi <= lo:
                raise ValueError("coordinate ranges must be nonempty")


@dataclass(frozen=True)
class NoiseConfig:
    pixel_sigma: float = 0.0            # px, per coordinate
    nonplanar_sigma_deg: float = 0.0    # X/Z rotation and out-of-plane translation
    imu_pitch_sigma_deg: float = 0.0
    imu_roll_sigma_deg: float = 0.0
    noise_homography_points: bool = True

    def __post_init__(self) -> None:
        if min(self.pixel_sigma, self.nonplanar_sigma_deg, self.imu_pitch_sigma_deg, self.imu_roll_sigma_deg) < 0.0:
            raise ValueError("noise levels must be nonnegative")


@dataclass(frozen=True)
class MotionSpec:
    """Ground-truth motion regime.

    ``planar``: yaw/translation-direction pair, sampled uniformly from
    ``+-angle_range`` unless fixed explicitly.  ``vertical``: yaw plus
    per-view pitch/roll sampled from the same range, translation along
    ``direction`` ("forward", "sideways", or "random").
    """

    kind: str = "planar"
    theta: float | None = None
    phi: float | None = None
    angle_range: float = math.radians(10.0)
    direction: str = "random"
    align_first_view: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("planar", "vertical"):
            raise ValueError(f"unknown motion kind {self.kind!r}")
        if self.direction not in ("forward", "sideways", "random"):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class SyntheticInstance:
    pose: RelativePose
    motion: PlanarMotion | None
    gravity: tuple[GravityAlignment, GravityAlignment] | None
    acs: list[AffineCorrespondence]
    acs_pixel: list[AffineCorrespondence]
    focal: float


@dataclass(frozen=True)
class TrialRecord:
    solver: str
    level: float
    trial: int
    eps_R: float
    eps_t: float
    failed: bool = False
    error: str = ""


def affine_from_homography(H: np.ndarray, p_i: ImagePoint) -> np.ndarray:
    """Jacobian of the dehomogenized map x -> dehom(H x) at a point."""
    H = np.asarray(H, dtype=float)
    p = p_i.homogeneous()
    q = H @ p
    s = q[2]
    if abs(s) < 1e-12 * max(1.0, np.abs(H).max() * np.abs(p).max()):
        raise PointAtInfinity("homography sends the point to infinity")
    u_j = q[:2] / s
    return (H[:2, :2] - np.outer(u_j, H[2, :2])) / s


def _sample_pose(spec: MotionSpec, noise: NoiseConfig, scene: SceneConfig, rng):
    """Draw the ground-truth pose, the planar parameters (when planar), and
    the true/solver gravity alignments (when vertical)."""
    if spec.kind == "planar":
        theta = spec.theta if spec.theta is not None else rng.uniform(-spec.angle_range, spec.angle_range)
        phi = spec.phi if spec.phi is not None else rng.uniform(-spec.angle_range, spec.angle_range)
        R = rot_y(theta)
        center_j = scene.baseline * np.array([math.sin(phi), 0.0, math.cos(phi)])
        if noise.nonplanar_sigma_deg > 0.0:
            sig = math.radians(noise.nonplanar_sigma_deg)
            R = rot_x(rng.normal(0.0, sig)) @ rot_z(rng.normal(0.0, sig)) @ R
            t = -R @ center_j
            t = _tilt_out_of_plane(t, rng.normal(0.0, sig))
        else:
            t = -R @ center_j
        motion = PlanarMotion(theta, phi, rho=scene.baseline)
        return R, t, motion, None, None

    rng_angles = lambda: rng.uniform(-spec.angle_range, spec.angle_range)
    if spec.align_first_view:
        g_i_true = GravityAlignment(0.0, 0.0)
    else:
        g_i_true = GravityAlignment(rng_angles(), rng_angles())
    g_j_true = GravityAlignment(rng_angles(), rng_angles())
    theta = spec.theta if spec.theta is not None else rng_angles()
    R = g_j_true.R_imu.T @ rot_y(theta) @ g_i_true.R_imu
    if spec.direction == "forward":
        d = np.array([0.0, 0.0, 1.0])
    elif spec.direction == "sideways":
        d = np.array([1.0, 0.0, 0.0])
    else:
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        d[2] = abs(d[2])  # keep the second camera from walking behind the scene
    t = -R @ (scene.baseline * d)
    return R, t, None, g_i_true, g_j_true


def _tilt_out_of_plane(t: np.ndarray, angle: float) -> np.ndarray:
    """Rotate t inside the vertical plane that contains it."""
    y = np.array([0.0, 1.0, 0.0])
    axis = np.cross(y, t)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        return t
    axis /= norm
    c, s = math.cos(angle), math.sin(angle)
    return c * t + s * np.cross(axis, t) + (1.0 - c) * (axis @ t) * axis


def _project_centered(X: np.ndarray, focal: float) -> np.ndarray:
    return focal * X[..., :2] / X[..., 2:3]


def _in_image(px: np.ndarray, scene: SceneConfig) -> np.ndarray:
    cx, cy = scene.principal_point
    w, h = scene.image_size
    return (
        (px[:, 0] >= -cx) & (px[:, 0] <= w - cx) & (px[:, 1] >= -cy) & (px[:, 1] <= h - cy)
    )


def _valid_points(
    X: np.ndarray, R: np.ndarray, t: np.ndarray, scene: SceneConfig, planar: bool
) -> np.ndarray:
    Xj = X @ R.T + t
    ok = (X[:, 2] > 0.5) & (Xj[:, 2] > 0.5)
    px_i = _project_centered(X, scene.focal)
    px_j = _project_centered(Xj, scene.focal)
    ok &= _in_image(px_i, scene)
    ok &= _in_image(px_j, scene)
    if planar:
        # Points on the motion plane project onto v = 0 in every view and
        # carry no planar-motion information; stay clear of that band.
        ok &= np.abs(px_i[:, 1]) >= scene.min_v_px
        ok &= np.abs(px_j[:, 1]) >= scene.min_v_px
    return ok


def _plane_frame(normals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal in-plane axes for an (N, 3) array of unit normals."""
    ref = np.tile(np.array([0.0, 1.0, 0.0]), (normals.shape[0], 1))
    near_y = np.abs(normals[:, 1]) > 0.9
    ref[near_y] = np.array([1.0, 0.0, 0.0])
    b1 = np.cross(normals, ref)
    b1 /= np.linalg.norm(b1, axis=1, keepdims=True)
    b2 = np.cross(normals, b1)
    return b1, b2


def _dlt_homographies(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Batched exact 4-point homographies: src, dst are (N, 4, 2)."""
    n = src.shape[0]
    rows = np.zeros((n, 8, 9))
    x, y = src[..., 0], src[..., 1]
    xp, yp = dst[..., 0], dst[..., 1]
    rows[:, 0::2, 0] = -x
    rows[:, 0::2, 1] = -y
    rows[:, 0::2, 2] = -1.0
    rows[:, 0::2, 6] = x * xp
    rows[:, 0::2, 7] = y * xp
    rows[:, 0::2, 8] = xp
    rows[:, 1::2, 3] = -x
    rows[:, 1::2, 4] = -y
    rows[:, 1::2, 5] = -1.0
    rows[:, 1::2, 6] = x * yp
    rows[:, 1::2, 7] = y * yp
    rows[:, 1::2, 8] = yp
    _, _, Vt = np.linalg.svd(rows)
    return Vt[:, -1, :].reshape(n, 3, 3)


def generate_instance(
    scene: SceneConfig,
    motion: MotionSpec,
    noise: NoiseConfig,
    rng: np.random.Generator,
) -> SyntheticInstance:
    """One synthetic two-view instance with affine correspondences.

    Points that fall outside either image (or behind either camera) are
    resampled; GenerationFailed is raised if the budget runs out.
    """
    R, t, planar_motion, g_i_true, g_j_true = _sample_pose(motion, noise, scene, rng)

    points = []
    normals = []
    offsets = []

    # ground-plane points
    need = scene.n_ground_points
    for _ in range(scene.max_batches):
        if need == 0:
            break
        X = np.stack(
            [
                rng.uniform(*scene.x_range, size=need),
                np.full(need, scene.ground_height),
                rng.uniform(*scene.z_range, size=need),
            ],
            axis=1,
        )
        ok = _valid_points(X, R, t, scene, motion.kind == "planar")
        for Xk in X[ok]:
            points.append(Xk)
            normals.append(np.array([0.0, 1.0, 0.0]))
            offsets.append(scene.ground_height)
        need -= int(ok.sum())
    if need > 0:
        raise GenerationFailed("could not place the ground-plane points in both views")

    # one point on each random plane; the plane's anchor doubles as the point
    z_i = np.array([0.0, 0.0, 1.0])
    z_j = R[2]
    need = scene.n_plane_points
    for _ in range(scene.max_batches):
        if need == 0:
            break
        X = np.stack(
            [
                rng.uniform(*scene.x_range, size=need),
                rng.uniform(*scene.y_range, size=need),
                rng.uniform(*scene.z_range, size=need),
            ],
            axis=1,
        )
        nrm = rng.standard_normal((need, 3))
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        d = (nrm * X).sum(axis=1)
        ok = _valid_points(X, R, t, scene, motion.kind == "planar")
        ok &= np.abs(nrm @ z_i) > _AXIS_COS_MIN
        ok &= np.abs(nrm @ z_j) > _AXIS_COS_MIN
        ok &= np.abs(d) > 0.5
        for Xk, nk, dk in zip(X[ok], nrm[ok], d[ok]):
            points.append(Xk)
            normals.append(nk)
            offsets.append(dk)
        need -= int(ok.sum())
    if need > 0:
        raise GenerationFailed("could not place the random-plane points in both views")

    X = np.asarray(points)
    n_vec = np.asarray(normals)
    n_pts = X.shape[0]

    # auxiliary square on each plane for the homography fit
    b1, b2 = _plane_frame(n_vec)
    h = 0.5 * scene.patch_size
    corners = np.array([[h, h], [h, -h], [-h, h], [-h, -h]])
    aux = X[:, None, :] + corners[None, :, 0, None] * b1[:, None, :] + corners[None, :, 1, None] * b2[:, None, :]

    X_j = X @ R.T + t
    aux_j = aux @ R.T + t
    px_i = _project_centered(X, scene.focal)
    px_j = _project_centered(X_j, scene.focal)
    aux_i = _project_centered(aux, scene.focal)
    aux_j_px = _project_centered(aux_j, scene.focal)

    if noise.pixel_sigma > 0.0:
        px_i = px_i + rng.normal(0.0, noise.pixel_sigma, px_i.shape)
        px_j = px_j + rng.normal(0.0, noise.pixel_sigma, px_j.shape)
        if noise.noise_homography_points:
            aux_i = aux_i + rng.normal(0.0, noise.pixel_sigma, aux_i.shape)
            aux_j_px = aux_j_px + rng.normal(0.0, noise.pixel_sigma, aux_j_px.shape)

    H = _dlt_homographies(aux_i, aux_j_px)
    s = H[:, 2, 0] * px_i[:, 0] + H[:, 2, 1] * px_i[:, 1] + H[:, 2, 2]
    if np.any(np.abs(s) < 1e-12):
        raise GenerationFailed("a fitted homography degenerated at its point")
    q = np.einsum("nij,nj->ni", H, np.concatenate([px_i, np.ones((n_pts, 1))], axis=1))
    u_warp = q[:, :2] / q[:, 2:3]
    A = (H[:, :2, :2] - u_warp[:, :, None] * H[:, 2:3, :2]) / s[:, None, None]

    f = scene.focal
    acs_norm = []
    acs_pixel = []
    for k in range(n_pts):
        acs_pixel.append(
            AffineCorrespondence(
                ImagePoint(px_i[k, 0], px_i[k, 1], PIXEL),
                ImagePoint(px_j[k, 0], px_j[k, 1], PIXEL),
                A[k],
            )
        )
        acs_norm.append(
            AffineCorrespondence(
                ImagePoint(px_i[k, 0] / f, px_i[k, 1] / f, NORMALIZED),
                ImagePoint(px_j[k, 0] / f, px_j[k, 1] / f, NORMALIZED),
                A[k],
            )
        )

    gravity = None
    if motion.kind == "vertical":
        sp = math.radians(noise.imu_pitch_sigma_deg)
        sr = math.radians(noise.imu_roll_sigma_deg)
        gravity = (
            GravityAlignment(
                g_i_true.theta_x + (rng.normal(0.0, sp) if sp > 0 else 0.0),
                g_i_true.theta_z + (rng.normal(0.0, sr) if sr > 0 else 0.0),
            ),
            GravityAlignment(
                g_j_true.theta_x + (rng.normal(0.0, sp) if sp > 0 else 0.0),
                g_j_true.theta_z + (rng.normal(0.0, sr) if sr > 0 else 0.0),
            ),
        )

    pose = RelativePose(R, t / np.linalg.norm(t))
    return SyntheticInstance(
        pose=pose,
        motion=planar_motion,
        gravity=gravity,
        acs=acs_norm,
        acs_pixel=acs_pixel,
        focal=scene.focal,
    )


def random_outlier_acs(
    n: int, scene: SceneConfig, rng: np.random.Generator
) -> tuple[list[AffineCorrespondence], list[AffineCorrespondence]]:
    """Uniform random correspondences (normalized and pixel variants)."""
    cx, cy = scene.principal_point
    w, h = scene.image_size
    f = scene.focal
    norm_list, pixel_list = [], []
    for _ in range(n):
        ui, vi = rng.uniform(-cx, w - cx), rng.uniform(-cy, h - cy)
        uj, vj = rng.uniform(-cx, w - cx), rng.uniform(-cy, h - cy)
        A = rng.uniform(-2.0, 2.0, size=(2, 2))
        pixel_list.append(
            AffineCorrespondence(ImagePoint(ui, vi, PIXEL), ImagePoint(uj, vj, PIXEL), A)
        )
        norm_list.append(
            AffineCorrespondence(
                ImagePoint(ui / f, vi / f, NORMALIZED), ImagePoint(uj / f, vj / f, NORMALIZED), A
            )
        )
    return norm_list, pixel_list


# ---------------------------------------------------------------------------
# aggregation and sweeps
# ---------------------------------------------------------------------------


def quintile_values(values: np.ndarray) -> float:
    """RMSE over the lowest two quintiles (best 40%) of the values."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise EmptyInput("no values to aggregate")
    keep = max(1, (2 * values.size) // 5)
    kept = values[:keep]
    return float(np.sqrt(np.mean(kept**2)))


def quintile_rmse(records: list[TrialRecord]) -> tuple[float, float]:
    """Quintile RMSE of the rotation and translation errors, each sorted
    independently."""
    if not records:
        raise EmptyInput("no records to aggregate")
    eps_R = np.array([r.eps_R for r in records])
    eps_t = np.array([r.eps_t for r in records])
    return quintile_values(eps_R), quintile_values(eps_t)


@dataclass(frozen=True)
class SweepSpec:
    solver: str
    regime: str = "planar"  # planar | vertical-random | vertical-forward | vertical-sideways
    axis: str = "pixel"     # pixel | nonplanar | pitch | roll
    levels: tuple[float, ...] = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    trials: int = 1000
    seed: int = 0
    estimator: str = "ransac"  # ransac | voting
    scene: SceneConfig = field(default_factory=SceneConfig)
    base_noise: NoiseConfig = field(default_factory=NoiseConfig)
    ransac: RansacConfig = field(default_factory=RansacConfig)
    voting: VotingConfig = field(default_factory=VotingConfig)

    def __post_init__(self) -> None:
        if self.solver not in ("planar-cf", "planar-ls", "planar-unknown-f", "vertical-1ac"):
            raise ValueError(f"unknown solver id {self.solver!r}")
        if self.axis not in ("pixel", "nonplanar", "pitch", "roll"):
            raise ValueError(f"unknown noise axis {self.axis!r}")
        vertical = self.solver == "vertical-1ac"
        if vertical != self.regime.startswith("vertical"):
            raise ValueError("solver and motion regime do not match")
        if self.axis in ("pitch", "roll") and not vertical:
            raise ValueError("IMU noise axes apply to the vertical solver only")
        if self.axis == "nonplanar" and vertical:
            raise ValueError("non-planar noise applies to the planar solvers only")
        if self.estimator not in ("ransac", "voting"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.estimator == "voting" and self.solver != "planar-cf":
            raise ValueError("histogram voting is defined for the closed-form solver")


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: list[tuple]
    records: list[TrialRecord]

    def table_lines(self) -> list[str]:
        lines = [f"# {k} = {v}" for k, v in _spec_echo(self.spec)]
        lines.append("level,solver,n_trials,n_failed,eps_R_rmse_deg,eps_t_rmse_deg")
        for row in self.rows:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        return lines

    def record_lines(self) -> list[str]:
        lines = [f"# {k} = {v}" for k, v in _spec_echo(self.spec)]
        lines.append("level,trial,solver,eps_R_deg,eps_t_deg,failed,error")
        for r in self.records:
            lines.append(
                f"{r.level!r},{r.trial},{r.solver},{r.eps_R!r},{r.eps_t!r},{int(r.failed)},{r.error}"
            )
        return lines


def _spec_echo(spec: SweepSpec) -> list[tuple[str, object]]:
    pairs = [
        ("solver", spec.solver),
        ("regime", spec.regime),
        ("axis", spec.axis),
        ("levels", list(spec.levels)),
        ("trials", spec.trials),
        ("seed", spec.seed),
        ("estimator", spec.estimator),
        ("scene", spec.scene),
        ("base_noise", spec.base_noise),
        ("ransac", spec.ransac),
        ("voting", spec.voting),
        ("quintile", "independent sort of eps_R and eps_t, best 40%"),
    ]
    return pairs


def _noise_at(spec: SweepSpec, level: float) -> NoiseConfig:
    if spec.axis == "pixel":
        return replace(spec.base_noise, pixel_sigma=level)
    if spec.axis == "nonplanar":
        return replace(spec.base_noise, nonplanar_sigma_deg=level)
    if spec.axis == "pitch":
        return replace(spec.base_noise, imu_pitch_sigma_deg=level)
    return replace(spec.base_noise, imu_roll_sigma_deg=level)


def _motion_at(spec: SweepSpec) -> MotionSpec:
    if spec.regime == "planar":
        return MotionSpec(kind="planar")
    return MotionSpec(kind="vertical", direction=spec.regime.split("-", 1)[1])


def run_trial(spec: SweepSpec, level_index: int, trial_index: int) -> TrialRecord:
    """One generation + robust-estimation trial; deterministic in its indices."""
    level = spec.levels[level_index]
    rng = np.random.default_rng([spec.seed, level_index, trial_index, 0])
    noise = _noise_at(spec, level)
    motion = _motion_at(spec)
    try:
        inst = generate_instance(spec.scene, motion, noise, rng)
        if spec.solver == "planar-unknown-f":
            acs, focal = inst.acs_pixel, None
        else:
            acs, focal = inst.acs, inst.focal
        if spec.estimator == "voting":
            model = histogram_voting(acs, spec.voting)
        else:
            est_seed = int(np.random.default_rng([spec.seed, level_index, trial_index, 1]).integers(2**63))
            cfg = replace(spec.ransac, seed=est_seed)
            model = ransac(spec.solver, acs, cfg, gravity=inst.gravity, focal=focal).model
        pose = model_pose(model)
        eps_R = rotation_error(inst.pose.R, pose.R)
        eps_t = translation_error(inst.pose.t, pose.t)
        return TrialRecord(spec.solver, level, trial_index, eps_R, eps_t)
    except AffposeError as exc:
        return TrialRecord(spec.solver, level, trial_index, math.nan, math.nan, True, type(exc).__name__)


def worker_count() -> int:
    """Worker cap from the AFFPOSE_THREADS environment variable (>= 1)."""
    try:
        return max(1, int(os.environ.get("AFFPOSE_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run the full noise sweep and aggregate quintile RMSE per level.

    Failed trials carry NaN errors, are excluded from the aggregation,
    and are counted in the ``n_failed`` column.  Output is byte-stable
    for a fixed spec regardless of the worker count.
    """
    if workers is None:
        workers = worker_count()
    records: list[TrialRecord] = []
    jobs = [(li, ti) for li in range(len(spec.levels)) for ti in range(spec.trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_star, ((spec, li, ti) for li, ti in jobs), chunksize=64))
    else:
        records = [run_trial(spec, li, ti) for li, ti in jobs]

    rows = []
    for li, level in enumerate(spec.levels):
        level_records = records[li * spec.trials : (li + 1) * spec.trials]
        good = [r for r in level_records if not r.failed]
        n_failed = len(level_records) - len(good)
        if good:
            eps_R, eps_t = quintile_rmse(good)
        else:
            eps_R = eps_t = math.nan
        rows.append((float(level), spec.solver, len(level_records), n_failed, eps_R, eps_t))
    return SweepResult(spec=spec, rows=rows, records=records)


def _trial_star(args) -> TrialRecord:
    return run_trial(*args)
