"""Relative pose from one affine correspondence with known pitch and roll.

Aligning both views with the measured gravity direction leaves a yaw-only
rotation, so the essential matrix between the aligned views has just six
distinct entries arranged in the pattern
``[[e1, e2, e3], [e4, 0, e5], [-e3, e6, e1]]``.  One correspondence gives
three linear equations in those entries (two from the affine warp, one
from the epipolar constraint); their 3-D null space is searched for
matrices satisfying the determinant and trace constraints, which reduces
to a quartic solved through companion-matrix eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._constraint_expansion import constraint_rows
from .errors import (
    DegenerateInput,
    DegenerateMotion,
    EmptyResult,
    InconsistentPattern,
    NoRealSolution,
    RankDeficient,
)
from .geometry import (
    NORMALIZED,
    AffineCorrespondence,
    FrameMismatch,
    GravityAlignment,
    RelativePose,
    SimplifiedEssential,
    align_point,
    rot_y,
)

_RANK3_EPS = 1e-10
_RANK6_EPS = 1e-8
_ZERO_CONSTRAINTS_EPS = 1e-9
_ROOT_TOL = 1e-6
_TY_EPS = 1e-10


@dataclass(frozen=True)
class AlignedSystem:
    """Linear system M e = 0 for the aligned-view essential parameters."""

    M: np.ndarray
    a_tilde: np.ndarray
    p_i_aligned: np.ndarray
    p_j_aligned: np.ndarray


@dataclass(frozen=True)
class NullspaceParam:
    """Orthonormal kernel basis; candidates are beta*m1 + gamma*m2 + m3."""

    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray


@dataclass(frozen=True)
class ConstraintSystem:
    """Seven cubic constraint rows over the degree-3 monomials.

    Column order: [b^3, b^2 g, b^2, b g^2, b g, b, g^3, g^2, g, 1].
    Row 0 is the determinant; rows 1..6 are the trace-constraint
    components at the six independent pattern positions.
    """

    M1: np.ndarray


@dataclass(frozen=True)
class QuarticPolys:
    """Remainder polynomials of the echelon reduction.

    ``qa`` multiplies [b g, g^3, g^2, g, 1] and ``qb`` multiplies
    [b, g^3, g^2, g, 1]; eliminating the mixed monomial gives the
    univariate ``qc`` with descending coefficients over g^4 .. 1.
    """

    qa: np.ndarray
    qb: np.ndarray
    qc: np.ndarray


def monomials(beta: float, gamma: float) -> np.ndarray:
    """The degree-3 monomial vector matching ConstraintSystem columns."""
    b, g = beta, gamma
    return np.array([b**3, b * b * g, b * b, b * g * g, b * g, b, g**3, g * g, g, 1.0])


def _monomial_gradient(beta: float, gamma: float) -> np.ndarray:
    b, g = beta, gamma
    d_beta = np.array([3 * b * b, 2 * b * g, 2 * b, g * g, g, 1.0, 0.0, 0.0, 0.0, 0.0])
    d_gamma = np.array([0.0, b * b, 0.0, 2 * b * g, b, 0.0, 3 * g * g, 2 * g, 1.0, 0.0])
    return np.stack([d_beta, d_gamma], axis=1)


def build_aligned_system(
    ac: AffineCorrespondence, g_i: GravityAlignment, g_j: GravityAlignment
) -> AlignedSystem:
    """Coefficient matrix of the two affine rows and the epipolar row."""
    if ac.frame != NORMALIZED:
        raise FrameMismatch("aligned system expects normalized-frame correspondences")
    pi = align_point(ac.p_i, g_i)
    pj = align_point(ac.p_j, g_j)
    ui, vi, wi = pi
    uj, vj, wj = pj

    R_i = g_i.R_imu
    r1, r2 = R_i[0, 0], R_i[0, 1]
    r3, r4, r5 = R_i[1]
    r6, r7, r8 = R_i[2]

    A_hat_t = np.zeros((3, 3))
    A_hat_t[:2, :2] = ac.A.T
    a_tilde_mat = A_hat_t @ g_j.R_imu.T
    a1, a2, a3 = a_tilde_mat[0]
    a4, a5, a6 = a_tilde_mat[1]

    M = np.array(
        [
            [
                ui * a1 + wi * a3 + uj * r1 + wj * r6,
                vi * a1 + uj * r3,
                wi * a1 + uj * r6 - ui * a3 - wj * r1,
                ui * a2 + vj * r1,
                wi * a2 + vj * r6,
                vi * a3 + wj * r3,
            ],
            [
                ui * a4 + wi * a6 + uj * r2 + wj * r7,
                vi * a4 + uj * r4,
                wi * a4 - ui * a6 + uj * r7 - wj * r2,
                ui * a5 + vj * r2,
                wi * a5 + vj * r7,
                vi * a6 + wj * r4,
            ],
            [
                ui * uj + wi * wj,
                uj * vi,
                uj * wi - ui * wj,
                ui * vj,
                vj * wi,
                vi * wj,
            ],
        ]
    )
    return AlignedSystem(M=M, a_tilde=np.array([a1, a2, a3, a4, a5, a6]), p_i_aligned=pi, p_j_aligned=pj)


def nullspace_basis(M: np.ndarray) -> NullspaceParam:
    """Orthonormal kernel basis of the 3x6 system, ordered by ascending
    singular value of the corresponding right-singular vectors."""
    M = np.asarray(M, dtype=float)
    U, s, Vt = np.linalg.svd(M)
    if s[0] == 0.0 or s[-1] / s[0] < _RANK3_EPS:
        raise DegenerateInput("aligned system has rank below 3")
    return NullspaceParam(m1=Vt[5], m2=Vt[4], m3=Vt[3])


def build_constraint_matrix(m1: np.ndarray, m2: np.ndarray, m3: np.ndarray) -> ConstraintSystem:
    return ConstraintSystem(M1=constraint_rows(np.asarray(m1), np.asarray(m2), np.asarray(m3)))


def _frobenius_cubed(e: np.ndarray) -> float:
    sq = 2.0 * e[0] ** 2 + e[1] ** 2 + 2.0 * e[2] ** 2 + e[3] ** 2 + e[4] ** 2 + e[5] ** 2
    return sq**1.5


def eliminate_to_quartic(cs: ConstraintSystem) -> QuarticPolys:
    """Row-reduce the constraint matrix to the two remainder polynomials.

    One of the seven rows is linearly dependent; the row whose removal
    maximizes the smallest singular value of the remaining block is
    dropped, then the left 6x6 block is reduced to the identity.
    """
    M1 = cs.M1
    scale = np.abs(M1).max()
    if scale == 0.0:
        raise RankDeficient("constraint matrix is identically zero")
    M1 = M1 / scale
    s = np.linalg.svd(M1, compute_uv=False)
    if s[5] / s[0] < _RANK6_EPS:
        raise RankDeficient("constraint matrix rank below 6")

    # sigma_min of each drop-one-row submatrix via the principal minors of
    # the row Gram matrix (eigvalsh on 6x6 blocks is far cheaper than SVDs)
    gram = M1 @ M1.T
    keep = np.array([[r for r in range(7) if r != k] for k in range(7)])
    minors = gram[keep[:, :, None], keep[:, None, :]]
    smin = np.sqrt(np.maximum(np.linalg.eigvalsh(minors)[:, 0], 0.0))
    order = np.argsort(smin)[::-1]
    for drop in order:
        sub = np.delete(M1, drop, axis=0)
        A = sub[:, :6]
        B = sub[:, 6:]
        try:
            rem = np.linalg.solve(A, B)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(rem)):
            break
    else:
        raise RankDeficient("no invertible 6x6 pivot block")

    qa = np.concatenate([[1.0], rem[4]])
    qb = np.concatenate([[1.0], rem[5]])
    qc = np.array(
        [qb[1], qb[2] - qa[1], qb[3] - qa[2], qb[4] - qa[3], -qa[4]]
    )
    return QuarticPolys(qa=qa, qb=qb, qc=qc)


def _quartic_roots(qc: np.ndarray) -> np.ndarray:
    """Real roots of the quartic; near-vanishing leading coefficients are
    trimmed so solutions drifting to infinity drop out by degree reduction."""
    top = np.abs(qc).max()
    if top == 0.0:
        raise RankDeficient("quartic vanished identically")
    coeffs = qc / top
    lead = np.nonzero(np.abs(coeffs) > 1e-12)[0]
    coeffs = coeffs[lead[0] :]
    if coeffs.size == 1:
        raise NoRealSolution("quartic degenerated to a nonzero constant")
    roots = np.roots(coeffs)
    return roots[np.abs(roots.imag) < 1e-8].real


def _residual_block(M1: np.ndarray, beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    return _monomial_block(beta, gamma) @ M1.T


def _monomial_block(b: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.empty(b.shape + (10,))
    b2 = b * b
    g2 = g * g
    out[..., 0] = b2 * b
    out[..., 1] = b2 * g
    out[..., 2] = b2
    out[..., 3] = b * g2
    out[..., 4] = b * g
    out[..., 5] = b
    out[..., 6] = g2 * g
    out[..., 7] = g2
    out[..., 8] = g
    out[..., 9] = 1.0
    return out


def _gradient_block(b: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d_b = np.zeros(b.shape + (10,))
    d_g = np.zeros(b.shape + (10,))
    b2 = b * b
    g2 = g * g
    d_b[..., 0] = 3 * b2
    d_b[..., 1] = 2 * b * g
    d_b[..., 2] = 2 * b
    d_b[..., 3] = g2
    d_b[..., 4] = g
    d_b[..., 5] = 1.0
    d_g[..., 1] = b2
    d_g[..., 3] = 2 * b * g
    d_g[..., 4] = b
    d_g[..., 6] = 3 * g2
    d_g[..., 7] = 2 * g
    d_g[..., 8] = 1.0
    return d_b, d_g


def _polish_roots(M1: np.ndarray, beta: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on the determinant row and a well-conditioned trace row,
    vectorized over all root candidates."""
    beta = beta.copy()
    gamma = gamma.copy()
    monomial_block = _monomial_block
    gradient_block = _gradient_block

    d_b, d_g = gradient_block(beta, gamma)
    trace_grad = np.abs(d_b @ M1[1:].T) + np.abs(d_g @ M1[1:].T)
    trace_row = 1 + np.argmax(trace_grad, axis=-1)
    row_a = M1[0]
    rows_b = M1[trace_row]
    res_a = monomial_block(beta, gamma) @ row_a
    res_b = np.einsum("km,km->k", monomial_block(beta, gamma), rows_b)
    res_max = np.maximum(np.abs(res_a), np.abs(res_b))
    for _ in range(10):
        d_b, d_g = gradient_block(beta, gamma)
        j00 = d_b @ row_a
        j01 = d_g @ row_a
        j10 = np.einsum("km,km->k", d_b, rows_b)
        j11 = np.einsum("km,km->k", d_g, rows_b)
        det = j00 * j11 - j01 * j10
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        step_b = -(j11 * res_a - j01 * res_b) / det
        step_g = -(j00 * res_b - j10 * res_a) / det
        new_beta = beta + step_b
        new_gamma = gamma + step_g
        mono = monomial_block(new_beta, new_gamma)
        new_a = mono @ row_a
        new_b = np.einsum("km,km->k", mono, rows_b)
        new_max = np.maximum(np.abs(new_a), np.abs(new_b))
        improved = new_max <= res_max
        beta = np.where(improved, new_beta, beta)
        gamma = np.where(improved, new_gamma, gamma)
        res_a = np.where(improved, new_a, res_a)
        res_b = np.where(improved, new_b, res_b)
        res_max = np.where(improved, new_max, res_max)
        if res_max.max() < 1e-15 or not improved.any():
            break
    return beta, gamma


def solve_beta_gamma(cs: ConstraintSystem, basis: NullspaceParam | None = None) -> list[tuple[float, float]]:
    """Real null-space coefficients whose candidate satisfies every constraint.

    At most four pairs exist (the eliminated polynomial is a quartic).
    Each returned pair is Newton-polished and then checked against all
    seven constraint rows, normalized by the candidate's Frobenius scale.
    """
    quartic = eliminate_to_quartic(cs)
    gammas = _quartic_roots(quartic.qc)
    if gammas.size == 0:
        raise NoRealSolution("quartic has no real root")
    gpow = np.stack([gammas**3, gammas**2, gammas, np.ones_like(gammas)], axis=-1)
    betas = -(gpow @ quartic.qb[1:])
    # polish only the roots that actually lost precision in the elimination
    rough = np.abs(_residual_block(cs.M1, betas, gammas)).max(axis=-1) > 0.01 * _ROOT_TOL
    if rough.any():
        pb, pg = _polish_roots(cs.M1, betas[rough], gammas[rough])
        betas = betas.copy()
        gammas = gammas.copy()
        betas[rough] = pb
        gammas[rough] = pg
    pairs = []
    for beta, gamma in zip(betas, gammas):
        residuals = cs.M1 @ monomials(beta, gamma)
        if basis is not None:
            e = beta * basis.m1 + gamma * basis.m2 + basis.m3
            residuals = residuals / _frobenius_cubed(e)
        if np.abs(residuals).max() > _ROOT_TOL:
            continue
        pairs.append((float(beta), float(gamma)))
    if not pairs:
        raise NoRealSolution("no real root satisfies the constraint system")
    return pairs[:4]


def decompose_simplified(E: SimplifiedEssential) -> list[tuple[float, np.ndarray]]:
    """Yaw angle and aligned translation consistent with the pattern.

    Candidates are verified against the two entries that mix the yaw with
    the in-plane translation; sign choices that fail are dropped.  The
    translation inherits the (arbitrary) overall scale and sign of E.
    """
    e1, e2, e3, e4, e5, e6 = E.vector()
    scale = np.linalg.norm(E.matrix())
    if scale < 1e-300:
        raise DegenerateMotion("zero essential matrix")
    tol = 1e-6 * max(1.0, scale)
    tx, tz = e6, -e2
    out = []
    if e1 * e1 + e3 * e3 > (_TY_EPS * scale) ** 2:
        for ty in (math.hypot(e1, e3), -math.hypot(e1, e3)):
            theta = math.atan2(e1 / ty, e3 / ty)
            c, s = math.cos(theta), math.sin(theta)
            if abs(e4 - (tz * c - tx * s)) <= tol and abs(e5 - (-tx * c - tz * s)) <= tol:
                out.append((theta, np.array([tx, ty, tz])))
    else:
        det = -(tz * tz + tx * tx)
        if abs(det) < (1e-12 * scale) ** 2:
            raise DegenerateMotion("translation vanishes in every component")
        c = (-tz * e4 + tx * e5) / det
        s = (tx * e4 + tz * e5) / det
        norm = math.hypot(c, s)
        if norm < 1e-300:
            raise InconsistentPattern("yaw is unconstrained by the given entries")
        c, s = c / norm, s / norm
        if abs(e4 - (tz * c - tx * s)) <= tol and abs(e5 - (-tx * c - tz * s)) <= tol:
            out.append((math.atan2(s, c), np.array([tx, 0.0, tz])))
    if not out:
        raise InconsistentPattern("no sign choice reproduces the mixed entries")
    return out


def solve_vertical(
    ac: AffineCorrespondence, g_i: GravityAlignment, g_j: GravityAlignment
) -> list[RelativePose]:
    """Full pipeline: aligned system, null space, quartic, decomposition,
    de-alignment, and cheirality filtering.

    Candidates failing the positive-depth test for the correspondence are
    dropped; survivors are sorted by decreasing depth margin.
    """
    system = build_aligned_system(ac, g_i, g_j)
    basis = nullspace_basis(system.M)
    cs = build_constraint_matrix(basis.m1, basis.m2, basis.m3)
    if np.abs(cs.M1).max() < _ZERO_CONSTRAINTS_EPS:
        # Every null-space combination is already an essential matrix: the
        # translation is unobservable (zero baseline / pure rotation).
        raise DegenerateMotion("constraints vanish identically; baseline unobservable")
    pairs = solve_beta_gamma(cs, basis)

    pi_h = ac.p_i.homogeneous()
    pj_h = ac.p_j.homogeneous()
    scored = []
    for beta, gamma in pairs:
        e = beta * basis.m1 + gamma * basis.m2 + basis.m3
        try:
            candidates = decompose_simplified(SimplifiedEssential.from_vector(e))
        except (InconsistentPattern, DegenerateMotion):
            continue
        for theta, t_tilde in candidates:
            norm = np.linalg.norm(t_tilde)
            if norm < 1e-15:
                continue
            R = g_j.R_imu.T @ rot_y(theta) @ g_i.R_imu
            t_unit = g_j.R_imu.T @ (t_tilde / norm)
            # cheirality before constructing (and validating) the pose object
            a = R @ pi_h
            g11, g12, g22 = a @ a, -(a @ pj_h), pj_h @ pj_h
            det = g11 * g22 - g12 * g12
            if det <= 1e-14 * max(g11 * g22, 1e-300):
                continue
            for sign in (1.0, -1.0):
                r1 = -sign * (a @ t_unit)
                r2 = sign * (pj_h @ t_unit)
                z_i = (g22 * r1 - g12 * r2) / det
                z_j = (g11 * r2 - g12 * r1) / det
                if z_i > 0.0 and z_j > 0.0:
                    scored.append((min(z_i, z_j), R, sign * t_unit))
    if not scored:
        raise EmptyResult("all pose candidates failed the cheirality test")
    scored.sort(key=lambda item: -item[0])
    return [RelativePose(R, t) for _, R, t in scored]
