"""Brute-force reference procedures for validating the solver backends.

Everything here is deliberately primitive: dense grid evaluation, dense
multi-start Newton, and direct matrix arithmetic.  None of it shares code
with the solver pipelines it cross-checks.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import AffineCorrespondence


def grid_objective_min(C: np.ndarray, step_deg: float = 0.05, block: int = 512) -> float:
    """Exhaustive minimum of the normalized planar objective on the torus.

    Evaluates ``|C_n x(alpha, phi)|^2`` at every grid node with the given
    angular step and returns the smallest value seen.  No refinement.
    """
    Cn = np.asarray(C, dtype=float)
    Cn = Cn / np.linalg.norm(Cn)
    n = int(round(360.0 / step_deg))
    angles = -np.pi + 2.0 * np.pi * np.arange(n) / n
    sin_a, cos_a = np.sin(angles), np.cos(angles)
    a, b, c, d = Cn.T
    P = np.outer(a, sin_a) + np.outer(b, cos_a)  # (3, n) over alpha
    Q = np.outer(c, sin_a) + np.outer(d, cos_a)  # (3, n) over phi
    p2 = (P**2).sum(axis=0)
    q2 = (Q**2).sum(axis=0)
    best = math.inf
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        F = p2[lo:hi, None] + q2[None, :] + 2.0 * (P[:, lo:hi].T @ Q)
        best = min(best, float(F.min()))
    return best


def _focal_system(ac: AffineCorrespondence):
    ui, vi = ac.p_i.u, ac.p_i.v
    uj, vj = ac.p_j.u, ac.p_j.v
    a11, a12 = ac.A[0]
    a21, a22 = ac.A[1]

    def residuals(alpha, phi, g, with_scale=False):
        sa, ca = np.sin(alpha), np.cos(alpha)
        sp, cp = np.sin(phi), np.cos(phi)
        t1 = (vi * g * sa, vi * uj * g**2 * ca, vj * g * sp, -ui * vj * g**2 * cp)
        t2 = (a11 * vi * g * ca, a21 * sp, -(a21 * ui + vj) * g * cp)
        t3 = (sa, (a12 * vi + uj) * g * ca, a22 * sp, -a22 * ui * g * cp)
        F = np.stack([sum(t1), sum(t2), sum(t3)], axis=-1)
        if not with_scale:
            return F
        S = np.stack(
            [
                sum(np.abs(term) for term in t1),
                sum(np.abs(term) for term in t2),
                sum(np.abs(term) for term in t3),
            ],
            axis=-1,
        )
        return F, S

    def jacobian(alpha, phi, g):
        sa, ca = np.sin(alpha), np.cos(alpha)
        sp, cp = np.sin(phi), np.cos(phi)
        J = np.empty(np.shape(alpha) + (3, 3))
        J[..., 0, 0] = vi * g * ca - vi * uj * g**2 * sa
        J[..., 0, 1] = vj * g * cp + ui * vj * g**2 * sp
        J[..., 0, 2] = vi * sa + 2.0 * vi * uj * g * ca + vj * sp - 2.0 * ui * vj * g * cp
        J[..., 1, 0] = -a11 * vi * g * sa
        J[..., 1, 1] = a21 * cp + (a21 * ui + vj) * g * sp
        J[..., 1, 2] = a11 * vi * ca - (a21 * ui + vj) * cp
        J[..., 2, 0] = ca - (a12 * vi + uj) * g * sa
        J[..., 2, 1] = a22 * cp + a22 * ui * g * sp
        J[..., 2, 2] = (a12 * vi + uj) * ca - a22 * ui * cp
        return J

    scale = max(1.0, abs(ui), abs(vi), abs(uj), abs(vj))
    return residuals, jacobian, scale


def canonical_focal_root(alpha: float, phi: float, g: float) -> tuple[float, float, float]:
    """Map a root to the representative of its antipodal pair (cos(phi) >= 0)."""
    if math.cos(phi) < -1e-12 or (abs(math.cos(phi)) <= 1e-12 and math.sin(phi) < 0.0):
        alpha += math.pi
        phi += math.pi
    alpha = math.atan2(math.sin(alpha), math.cos(alpha))
    phi = math.atan2(math.sin(phi), math.cos(phi))
    return alpha, phi, g


def focal_roots_by_newton(
    ac: AffineCorrespondence,
    n_angle: int = 16,
    g_grid: np.ndarray | None = None,
    iters: int = 40,
) -> list[tuple[float, float, float]]:
    """All positive-focal roots of the pixel-frame system by dense
    multi-start Newton over (alpha, phi, g).

    Returns canonical (alpha, phi, g) triples, deduplicated.
    """
    residuals, jacobian, scale = _focal_system(ac)
    if g_grid is None:
        g_grid = np.geomspace(1e-4, 1e-1, 13)
    angles = -np.pi + 2.0 * np.pi * np.arange(n_angle) / n_angle
    al, ph, gg = np.meshgrid(angles, angles, g_grid, indexing="ij")
    al, ph, gg = al.ravel().copy(), ph.ravel().copy(), gg.ravel().copy()

    last_step = np.full(al.shape, np.inf)
    for _ in range(iters):
        F = residuals(al, ph, gg)
        J = jacobian(al, ph, gg)
        try:
            step = np.linalg.solve(J, -F[..., None])[..., 0]
        except np.linalg.LinAlgError:
            J = J + 1e-12 * np.eye(3)
            step = np.linalg.solve(J, -F[..., None])[..., 0]
        step = np.where(np.isfinite(step), step, 0.0)
        norm = np.linalg.norm(step, axis=-1)
        clip = np.where(norm > 0.5, 0.5 / np.maximum(norm, 1e-300), 1.0)
        al += step[:, 0] * clip
        ph += step[:, 1] * clip
        gg += step[:, 2] * clip
        last_step = norm * clip

    # A genuine root shows quadratic contraction (final steps at machine
    # level) and a residual far below the magnitude of its own terms; flat
    # basins around the trivial root fail both filters.
    F, S = residuals(al, ph, gg, with_scale=True)
    rel = np.abs(F) / np.maximum(S, 1e-300)
    ok = (rel.max(axis=-1) < 1e-9) & (gg > 1e-7) & np.isfinite(gg)
    ok &= last_step < 1e-9 * (1.0 + np.abs(al) + np.abs(ph) + np.abs(gg))
    roots: list[tuple[float, float, float]] = []
    for a0, p0, g0 in zip(al[ok], ph[ok], gg[ok]):
        a0, p0, g0 = canonical_focal_root(float(a0), float(p0), float(g0))
        for a1, p1, g1 in roots:
            if (
                abs(math.remainder(a0 - a1, 2.0 * math.pi)) < 1e-5
                and abs(math.remainder(p0 - p1, 2.0 * math.pi)) < 1e-5
                and abs(g0 - g1) < 1e-9 + 1e-5 * g1
            ):
                break
        else:
            roots.append((a0, p0, g0))
    return roots


def essential_pattern_matrix(e: np.ndarray) -> np.ndarray:
    e1, e2, e3, e4, e5, e6 = np.asarray(e, dtype=float).reshape(6)
    return np.array([[e1, e2, e3], [e4, 0.0, e5], [-e3, e6, e1]])


def det_trace_values(m1: np.ndarray, m2: np.ndarray, m3: np.ndarray, beta: float, gamma: float) -> np.ndarray:
    """Direct determinant/trace-constraint values of the assembled candidate.

    Returns the 7-vector (det, T11, T12, T13, T21, T23, T32) computed by
    plain matrix arithmetic; the reference for the expanded coefficients.
    """
    E = essential_pattern_matrix(beta * np.asarray(m1) + gamma * np.asarray(m2) + np.asarray(m3))
    T = 2.0 * E @ E.T @ E - np.trace(E @ E.T) * E
    return np.array([np.linalg.det(E), T[0, 0], T[0, 1], T[0, 2], T[1, 0], T[1, 2], T[2, 1]])


def finite_difference_jacobian(H: np.ndarray, u: float, v: float, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of the dehomogenized homography warp."""
    H = np.asarray(H, dtype=float)

    def warp(x, y):
        q = H @ np.array([x, y, 1.0])
        return q[:2] / q[2]

    J = np.empty((2, 2))
    J[:, 0] = (warp(u + step, v) - warp(u - step, v)) / (2.0 * step)
    J[:, 1] = (warp(u, v + step) - warp(u, v - step)) / (2.0 * step)
    return J


