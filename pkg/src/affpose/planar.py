"""Single-correspondence solvers for ground-plane motion.

One affine correspondence yields three linear equations in the stacked
trigonometric vector ``x = [sin(theta-phi), cos(theta-phi), sin(phi),
cos(phi)]``: one from the epipolar constraint and two from the affine-warp
compatibility with the essential matrix.  Three solvers consume them:

* ``solve_planar_closed_form`` drops the two unit-circle constraints and
  takes the least-eigenvalue eigenvector of ``C^T C``.
* ``solve_planar_least_squares`` keeps the constraints and returns every
  stationary point of the constrained sum of squares.  The backend
  substitutes tangent half-angles, eliminates one variable with a
  Sylvester resultant, reads roots off a companion matrix, and polishes
  with damped Newton on the torus.
* ``solve_planar_unknown_focal`` works in centered pixel coordinates with
  an unknown focal length.  Substituting ``y2 = g*x2, y4 = g*x4`` (with
  ``g`` the inverse focal length) makes the three equations linear and
  homogeneous; the one-dimensional null space plus the two unit-circle
  constraints then pins ``g`` in closed form.

All functions are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .errors import (
    DegenerateInput,
    FrameMismatch,
    NoRealSolution,
    NumericalFailure,
)
from .geometry import NORMALIZED, PIXEL, AffineCorrespondence, PlanarMotion, TrigVector

_RANK_EPS = 1e-10
_KKT_TOL = 1e-6
_DEDUPE_TOL = 1e-6


@dataclass(frozen=True)
class PlanarSystem:
    """The 3x4 coefficient matrix of the planar constraints."""

    C: np.ndarray

    def __post_init__(self) -> None:
        C = np.asarray(self.C, dtype=float)
        if C.shape != (3, 4):
            raise ValueError("planar system must be 3x4")
        object.__setattr__(self, "C", C)


@dataclass(frozen=True)
class StationaryPoint:
    """One stationary point of the constrained least-squares objective."""

    x: TrigVector
    lambda1: float
    lambda2: float
    objective: float


@dataclass(frozen=True)
class FocalSolution:
    """Planar motion plus the recovered focal length (and its inverse)."""

    motion: PlanarMotion
    f: float
    g: float


def _coefficient_rows(u_i: float, v_i: float, u_j: float, v_j: float, A: np.ndarray) -> np.ndarray:
    """Stack the epipolar row and the two affine-compatibility rows."""
    a11, a12 = A[0]
    a21, a22 = A[1]
    return np.array(
        [
            [v_i, v_i * u_j, v_j, -u_i * v_j],
            [0.0, a11 * v_i, a21, -(a21 * u_i + v_j)],
            [1.0, a12 * v_i + u_j, a22, -a22 * u_i],
        ]
    )


def build_planar_system(ac: AffineCorrespondence) -> PlanarSystem:
    """Coefficient matrix C with C @ x = 0 for the true motion."""
    if ac.frame != NORMALIZED:
        raise FrameMismatch("planar system expects normalized-frame correspondences")
    return PlanarSystem(_coefficient_rows(ac.p_i.u, ac.p_i.v, ac.p_j.u, ac.p_j.v, ac.A))


def _check_rank(C: np.ndarray) -> None:
    s = np.linalg.svd(C, compute_uv=False)
    if s[0] == 0.0 or s[-1] / s[0] < _RANK_EPS:
        raise DegenerateInput("planar system is rank deficient")


def solve_planar_closed_form(sys: PlanarSystem) -> PlanarMotion:
    """Eigenvector solution ignoring the unit-circle constraints.

    The eigenvector carries one global scale, so the two sine/cosine pairs
    are generally off their circles individually; the angle extraction
    only uses within-pair ratios.  Negating the eigenvector maps phi to
    phi + pi and leaves theta unchanged, so the returned translation
    direction is defined up to sign.
    """
    _check_rank(sys.C)
    try:
        # right-singular vector of the least singular value == least-eigenvalue
        # eigenvector of C^T C, but resolved at singular-value (not squared)
        # gaps, which matters for nearly rank-deficient systems
        _, _, Vt = np.linalg.svd(sys.C)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("eigendecomposition failed") from exc
    x = Vt[-1]
    return TrigVector(*x, constrained=False).motion()


# ---------------------------------------------------------------------------
# constrained least squares
# ---------------------------------------------------------------------------

# Chebyshev sample nodes for the resultant determinant (degree <= 20) and the
# corresponding least-squares fit operator, both fixed at import time.
_RES_SCALE = 1.2
_RES_NODES = _RES_SCALE * np.cos((2.0 * np.arange(28) + 1.0) / 56.0 * np.pi)
_RES_FIT = np.linalg.pinv(_cheb.chebvander(_RES_NODES / _RES_SCALE, 20))
_RES_POWERS = np.vander(_RES_NODES, 5, increasing=True)  # r^0 .. r^4 at the nodes

_FALLBACK_GRID = np.stack(
    np.meshgrid(
        np.linspace(-np.pi, np.pi, 13)[:-1],
        np.linspace(-np.pi, np.pi, 13)[:-1],
        indexing="ij",
    ),
    axis=-1,
).reshape(-1, 2)


def _halfangle_system(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient arrays of the two stationarity equations.

    Entry ``[k, l]`` multiplies ``s^k r^l`` where ``s = tan(alpha/2)`` and
    ``r = tan(phi/2)`` are the half-angle variables of ``alpha = theta -
    phi`` and ``phi``; denominators ``(1+s^2)^2 (1+r^2)`` are cleared.
    """
    A1, AB, AC, AD = G[0, 0], G[0, 1], G[0, 2], G[0, 3]
    B1, BC, BD = G[1, 1], G[1, 2], G[1, 3]
    C1, CD, D1 = G[2, 2], G[2, 3], G[3, 3]

    E1 = np.zeros((5, 3))
    p1 = np.array([AB, 2.0 * (A1 - B1), -6.0 * AB, -2.0 * (A1 - B1), AB])
    E1[:, 0] += p1
    E1[:, 2] += p1
    for sign, power in ((1.0, 0), (-1.0, 4)):
        E1[power] += sign * np.array([AD, 2.0 * AC, -AD])
    for power in (1, 3):
        E1[power] += -2.0 * np.array([BD, 2.0 * BC, -BD])

    E2 = np.zeros((3, 5))
    p2 = np.array([CD, 2.0 * (C1 - D1), -6.0 * CD, -2.0 * (C1 - D1), CD])
    E2[0] += p2
    E2[2] += p2
    for sign, power in ((1.0, 0), (-1.0, 4)):
        E2[:, power] += sign * np.array([BC, 2.0 * AC, -BC])
    for power in (1, 3):
        E2[:, power] += -2.0 * np.array([BD, 2.0 * AD, -BD])
    return E1, E2


def _batched_real_roots(coeffs: np.ndarray) -> list[np.ndarray]:
    """Real roots of a batch of ascending-coefficient polynomials.

    Rows whose leading coefficient nearly vanishes fall back to a reduced
    degree; companion matrices of equal size are solved in one call.
    """
    out: list[np.ndarray] = [np.empty(0)] * coeffs.shape[0]
    by_degree: dict[int, list[int]] = {}
    for k, row in enumerate(coeffs):
        top = np.abs(row).max()
        if top == 0.0:
            continue
        nz = np.nonzero(np.abs(row) > 1e-13 * top)[0]
        if nz.size == 0 or nz[-1] == 0:
            continue
        by_degree.setdefault(int(nz[-1]), []).append(k)
    for deg, idx in by_degree.items():
        comp = np.zeros((len(idx), deg, deg))
        comp[:, 1:, :-1] = np.eye(deg - 1)
        block = coeffs[idx, : deg + 1]
        comp[:, :, -1] = -block[:, :-1] / block[:, -1:]
        roots = np.linalg.eigvals(comp)
        real = np.abs(roots.imag) < 1e-7
        for row_i, k in enumerate(idx):
            out[k] = roots[row_i, real[row_i]].real
    return out


def _quadratic_real_roots(coeffs: np.ndarray) -> list[np.ndarray]:
    """Real roots of ascending-coefficient quadratics (closed form)."""
    out: list[np.ndarray] = []
    for c0, c1, c2 in coeffs:
        top = max(abs(c0), abs(c1), abs(c2))
        if top == 0.0:
            out.append(np.empty(0))
            continue
        if abs(c2) < 1e-13 * top:
            out.append(np.array([-c0 / c1]) if abs(c1) >= 1e-13 * top else np.empty(0))
            continue
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            out.append(np.empty(0))
            continue
        q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1 if c1 != 0.0 else 1.0))
        roots = [q / c2] if q == 0.0 else [q / c2, c0 / q]
        out.append(np.array(roots))
    return out


def _resultant_seeds(E1: np.ndarray, E2: np.ndarray) -> np.ndarray:
    """Candidate (alpha, phi) pairs from eliminating the half-angle s.

    Only representatives with |r| <= 1 are needed: every stationary point
    has an antipodal twin whose half-angle coordinates satisfy r r' = -1,
    so one member of each pair lands inside the unit interval.
    """
    e1v = _RES_POWERS[:, :3] @ E1.T  # (nodes, 5): value of each s-coefficient
    e2v = _RES_POWERS @ E2.T         # (nodes, 3)
    S = np.zeros((_RES_NODES.size, 6, 6))
    for row in range(2):
        for k in range(5):
            S[:, row, row + k] = e1v[:, 4 - k]
    for row in range(4):
        for k in range(3):
            S[:, 2 + row, row + k] = e2v[:, 2 - k]
    dets = np.linalg.det(S)
    scale = np.abs(dets).max()
    if scale == 0.0 or not np.isfinite(scale):
        return np.empty((0, 2))
    coeffs = _RES_FIT @ (dets / scale)
    try:
        r_roots = _cheb.chebroots(coeffs)
    except np.linalg.LinAlgError:
        return np.empty((0, 2))
    r_roots = r_roots[np.abs(r_roots.imag) < 1e-7].real * _RES_SCALE
    r_roots = r_roots[np.abs(r_roots) <= 1.02]
    if r_roots.size == 0:
        return np.empty((0, 2))

    rpow = np.vander(r_roots, 5, increasing=True)  # (k, 5)
    quartics = rpow[:, :3] @ E1.T                  # E1(s; r0): (k, 5)
    quadratics = rpow @ E2.T                       # E2(s; r0): (k, 3)
    seeds = []
    scales = (np.abs(E2).max(), np.abs(E1).max())
    root_sets = (_batched_real_roots(quartics), _quadratic_real_roots(quadratics))
    for which in (0, 1):
        cross = quadratics if which == 0 else quartics
        cross_scale = max(scales[which], 1e-300)
        for k, s_arr in enumerate(root_sets[which]):
            if s_arr.size == 0:
                continue
            spow = np.vander(s_arr, cross.shape[1], increasing=True)
            other_val = spow @ cross[k]
            # a true intersection must nearly kill the other polynomial too
            keep = np.abs(other_val) < 1e-3 * cross_scale * (1.0 + np.abs(s_arr)) ** (cross.shape[1] - 1)
            phi = 2.0 * math.atan(r_roots[k])
            for s0 in s_arr[keep]:
                seeds.append((2.0 * math.atan(s0), phi))
    if not seeds:
        return np.empty((0, 2))
    return np.array(seeds)


def _newton_polish(G: np.ndarray, seeds: np.ndarray, iters: int = 14) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Newton iteration on the angle-gradient system.

    Converged seeds leave the active set, so late iterations only touch
    the stragglers.
    """
    alpha = seeds[:, 0].copy()
    phi = seeds[:, 1].copy()
    g00, g01, g02, g03 = G[0]
    g11, g12, g13 = G[1, 1:]
    g22, g23 = G[2, 2:]
    g33 = G[3, 3]

    def gradient(a_arr, p_arr):
        sa, ca = np.sin(a_arr), np.cos(a_arr)
        sp, cp = np.sin(p_arr), np.cos(p_arr)
        gx0 = g00 * sa + g01 * ca + g02 * sp + g03 * cp
        gx1 = g01 * sa + g11 * ca + g12 * sp + g13 * cp
        gx2 = g02 * sa + g12 * ca + g22 * sp + g23 * cp
        gx3 = g03 * sa + g13 * ca + g23 * sp + g33 * cp
        return sa, ca, sp, cp, gx0, gx1, gx2, gx3

    active = np.arange(alpha.size)
    for it in range(iters):
        if active.size == 0:
            break
        a_act, p_act = alpha[active], phi[active]
        sa, ca, sp, cp, gx0, gx1, gx2, gx3 = gradient(a_act, p_act)
        ga = ca * gx0 - sa * gx1
        gp = cp * gx2 - sp * gx3
        haa = g00 * ca * ca - 2.0 * g01 * sa * ca + g11 * sa * sa - sa * gx0 - ca * gx1
        hpp = g22 * cp * cp - 2.0 * g23 * sp * cp + g33 * sp * sp - sp * gx2 - cp * gx3
        hap = ca * (g02 * cp - g03 * sp) - sa * (g12 * cp - g13 * sp)
        det = haa * hpp - hap * hap
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        da = -(hpp * ga - hap * gp) / det
        dp = -(haa * gp - hap * ga) / det
        step = np.abs(da) + np.abs(dp)
        shrink = np.where(step > 0.7, 0.7 / np.maximum(step, 1e-300), 1.0)
        alpha[active] = a_act + da * shrink
        phi[active] = p_act + dp * shrink
        if it >= 2:
            active = active[step > 1e-12]
    sa, ca, sp, cp, gx0, gx1, gx2, gx3 = gradient(alpha, phi)
    grad_norm = 2.0 * np.hypot(ca * gx0 - sa * gx1, cp * gx2 - sp * gx3)
    return np.stack([alpha, phi], axis=1), grad_norm


def _canonicalize(alpha: float, phi: float) -> tuple[float, float]:
    """Pick the antipodal representative with cos(phi) >= 0 (ties: sin(phi) >= 0)."""
    cp, sp = math.cos(phi), math.sin(phi)
    if cp < -1e-12 or (abs(cp) <= 1e-12 and sp < 0.0):
        alpha += math.pi
        phi += math.pi
    a = math.atan2(math.sin(alpha), math.cos(alpha))
    p = math.atan2(math.sin(phi), math.cos(phi))
    return a, p


def solve_planar_least_squares(sys: PlanarSystem) -> list[StationaryPoint]:
    """All real stationary points of the constrained least-squares problem.

    Returns canonical representatives only (each point and its negated
    twin count once), sorted by ascending objective; the first entry is
    the selected global minimum.  Ties in the objective are broken by the
    angle values, lowest first.
    """
    _check_rank(sys.C)
    scale = np.linalg.norm(sys.C)
    Cn = sys.C / scale
    G = Cn.T @ Cn

    E1, E2 = _halfangle_system(G)
    seeds = _resultant_seeds(E1, E2)
    if seeds.size == 0:
        seeds = _FALLBACK_GRID
    elif seeds.shape[0] > 1:
        # merge near-duplicate seeds found through both elimination routes
        rounded = np.round(seeds / 1e-7)
        _, first = np.unique(rounded, axis=0, return_index=True)
        seeds = seeds[np.sort(first)]
    polished, grad = _newton_polish(G, seeds)
    good = polished[grad < 1e-9]
    if good.size == 0:
        polished, grad = _newton_polish(G, _FALLBACK_GRID)
        good = polished[grad < 1e-9]
    candidates = [tuple(pair) for pair in good]
    # The pairwise-normalized null direction is exactly stationary whenever
    # the system is consistent (zero objective), and it is resolved from C
    # directly, well below the fp floor of the Gram-matrix gradient.
    _, _, Vt = np.linalg.svd(Cn)
    null = Vt[-1]
    n12, n34 = math.hypot(null[0], null[1]), math.hypot(null[2], null[3])
    if n12 > 1e-12 and n34 > 1e-12:
        candidates.append((math.atan2(null[0], null[1]), math.atan2(null[2], null[3])))
    if not candidates:
        raise NumericalFailure("no stationary point converged")

    def direct_objective(alpha: float, phi: float) -> float:
        x = np.array([math.sin(alpha), math.cos(alpha), math.sin(phi), math.cos(phi)])
        r = Cn @ x
        return float(r @ r)

    ranked = sorted(
        (_canonicalize(alpha, phi) for alpha, phi in candidates),
        key=lambda ap: (direct_objective(*ap), ap[1], ap[0]),
    )
    unique: list[tuple[float, float]] = []
    for alpha, phi in ranked:
        for a0, p0 in unique:
            if (
                abs(math.remainder(alpha - a0, 2.0 * math.pi)) < _DEDUPE_TOL
                and abs(math.remainder(phi - p0, 2.0 * math.pi)) < _DEDUPE_TOL
            ):
                break
        else:
            unique.append((alpha, phi))

    points = []
    for alpha, phi in unique:
        x = np.array([math.sin(alpha), math.cos(alpha), math.sin(phi), math.cos(phi)])
        # stationarity residual of the multiplier system, on the normalized problem
        gxn = G @ x
        l1n = -(x[0] * gxn[0] + x[1] * gxn[1])
        l2n = -(x[2] * gxn[2] + x[3] * gxn[3])
        kkt = np.abs(gxn + np.array([l1n, l1n, l2n, l2n]) * x).max()
        if kkt > _KKT_TOL:
            continue
        rr = sys.C @ x
        points.append(
            StationaryPoint(
                x=TrigVector(*x),
                lambda1=float(l1n) * scale**2,
                lambda2=float(l2n) * scale**2,
                objective=float(rr @ rr),
            )
        )
    if not points:
        raise NoRealSolution("all stationary candidates failed the residual check")
    points.sort(key=lambda p: (p.objective, p.x.x3, p.x.x1))
    return points[:8]


# ---------------------------------------------------------------------------
# unknown focal length
# ---------------------------------------------------------------------------


def _unknown_focal_candidates(ac: AffineCorrespondence) -> list[tuple[np.ndarray, float]]:
    """All real (x, g) roots of the reduced system, before the g > 0 filter.

    Dividing the inverse focal length out of the epipolar equation and
    substituting ``y2 = g*x2, y4 = g*x4`` turns the three polynomial
    equations into one homogeneous linear system whose coefficient matrix
    is exactly the planar system built on pixel coordinates.  The
    unit-circle constraints then give two linear equations in
    ``(lambda^2, lambda^2/g^2)``.
    """
    if ac.frame != PIXEL:
        raise FrameMismatch("unknown-focal solver expects centered pixel coordinates")
    N = _coefficient_rows(ac.p_i.u, ac.p_i.v, ac.p_j.u, ac.p_j.v, ac.A)
    s = np.linalg.svd(N, compute_uv=False)
    if s[0] == 0.0 or s[-1] / s[0] < _RANK_EPS:
        raise DegenerateInput("reduced focal system is rank deficient")
    _, _, Vt = np.linalg.svd(N)
    n = Vt[3]

    M2 = np.array([[n[0] ** 2, n[1] ** 2], [n[2] ** 2, n[3] ** 2]])
    det2 = M2[0, 0] * M2[1, 1] - M2[0, 1] * M2[1, 0]
    if abs(det2) < 1e-14 * max(1.0, np.abs(M2).max() ** 2):
        raise DegenerateInput("unit-circle constraints do not separate scale and focal length")
    P = (M2[1, 1] - M2[0, 1]) / det2
    Q = (M2[0, 0] - M2[1, 0]) / det2
    if P <= 0.0 or Q <= 0.0:
        raise NoRealSolution("no real focal length satisfies both constraints")

    g = math.sqrt(P / Q)
    lam = math.sqrt(P)
    candidates = []
    for lam_sign in (1.0, -1.0):
        for g_signed in (g, -g):
            x = lam_sign * lam * np.array([n[0], n[1] / g_signed, n[2], n[3] / g_signed])
            candidates.append((x, g_signed))
    return candidates


def _focal_residuals(x: np.ndarray, g: float, N: np.ndarray) -> np.ndarray:
    """The five equation residuals at (x, g): three pixel-frame constraint
    rows (epipolar row carries its original factor of g) and the two
    unit-circle constraints."""
    y = np.array([x[0], g * x[1], x[2], g * x[3]])
    rows = N @ y
    rows[0] *= g
    return np.array(
        [rows[0], rows[1], rows[2], x[0] ** 2 + x[1] ** 2 - 1.0, x[2] ** 2 + x[3] ** 2 - 1.0]
    )


def solve_planar_unknown_focal(ac: AffineCorrespondence) -> list[FocalSolution]:
    """Planar motion and focal length from one centered-pixel correspondence.

    Returns the real solutions with positive focal length; the trivial
    root (zero inverse focal length) never survives the positivity
    filter.  Each returned solution satisfies all five equations of the
    system to 1e-6.
    """
    candidates = _unknown_focal_candidates(ac)
    N = _coefficient_rows(ac.p_i.u, ac.p_i.v, ac.p_j.u, ac.p_j.v, ac.A)
    solutions = []
    for x, g in candidates:
        if g <= 0.0:
            continue
        if np.abs(_focal_residuals(x, g, N)).max() > 1e-6:
            continue
        solutions.append(FocalSolution(motion=TrigVector(*x).motion(), f=1.0 / g, g=g))
    if not solutions:
        raise NoRealSolution("no admissible focal solution")
    solutions.sort(key=lambda sol: (sol.f, sol.motion.phi))
    return solutions
