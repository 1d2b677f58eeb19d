"""Orthonormal-basis algebra on the Stiefel/Grassmann manifold.

A projection basis is a p x d matrix A with orthonormal columns (A'A = I_d).
Optimization cares about the plane spanned by A rather than A itself, so the
operations here work plane-to-plane: distances and angles are invariant to
within-plane rotation, and geodesic interpolation removes within-plane spin.
"""

import numpy as np

from .errors import DegenerateInputError

ORTHO_TOL = 1e-10
SAME_PLANE_TOL = 1e-8


def is_orthonormal(A, tol=ORTHO_TOL):
    A = np.asarray(A, dtype=float)
    d = A.shape[1]
    return np.max(np.abs(A.T @ A - np.eye(d))) <= tol


def check_basis(A):
    """Validate basis invariants; returns A as a float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"basis must be a 2-D matrix, got ndim={A.ndim}")
    p, d = A.shape
    if not 1 <= d < p:
        raise ValueError(f"need 1 <= d < p, got p={p}, d={d}")
    if not is_orthonormal(A):
        raise ValueError("basis columns are not orthonormal within 1e-10")
    return A


def _check_pair(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"basis shapes differ: {A.shape} vs {B.shape}")
    return A, B


def orthonormalize(M):
    """Orthonormalize the columns of M by modified Gram-Schmidt.

    One reorthogonalization pass keeps the result orthonormal to well below
    1e-10 for the moderate dimensions used here. Raises DegenerateInputError
    when M is numerically rank deficient.
    """
    M = np.asarray(M, dtype=float)
    p, d = M.shape
    if not 1 <= d <= p:
        raise ValueError(f"need 1 <= d <= p, got p={p}, d={d}")
    Q = M.copy()
    for _ in range(2):
        for j in range(d):
            for k in range(j):
                Q[:, j] -= (Q[:, k] @ Q[:, j]) * Q[:, k]
            norm = np.linalg.norm(Q[:, j])
            if norm < 1e-12:
                raise DegenerateInputError(
                    f"column {j} is numerically dependent on earlier columns"
                )
            Q[:, j] /= norm
    return Q


def random_basis(p, d, rng):
    """Uniform draw from the Stiefel manifold V_d(R^p).

    Orthonormalizing a matrix of i.i.d. standard normals gives a draw whose
    plane is invariant under fixed rotations.
    """
    if not 1 <= d < p:
        raise ValueError(f"need 1 <= d < p, got p={p}, d={d}")
    return orthonormalize(rng.standard_normal((p, d)))


def proj_distance(A, B):
    """Distance between planes: Frobenius norm of the projector difference."""
    A, B = _check_pair(A, B)
    # ||AA' - BB'||_F^2 = 2d - 2||A'B||_F^2 for orthonormal A, B
    c = A.T @ B
    d = A.shape[1]
    val = 2.0 * d - 2.0 * np.sum(c * c)
    return float(np.sqrt(max(val, 0.0)))


def squint_angle(A, B):
    """Smallest principal angle between the planes of A and B, in [0, pi/2]."""
    A, B = _check_pair(A, B)
    tau = np.linalg.svd(A.T @ B, compute_uv=False)
    return float(np.arccos(np.clip(np.max(tau), -1.0, 1.0)))


def orient_align(B, ref):
    """Rotate/reflect B within its plane to be closest to ref in Frobenius norm.

    Orthogonal Procrustes: result = B @ U @ V' where U S V' = svd(B' ref).
    The plane of B is preserved exactly.
    """
    B, ref = _check_pair(B, ref)
    U, _, Vt = np.linalg.svd(B.T @ ref)
    return B @ (U @ Vt)


def _principal_frames(A, B):
    """Principal vectors and angles of the two planes.

    Returns (Pa, Pb, theta) with Pa, Pb orthonormal, spanning plane(A) and
    plane(B), and Pa[:, i], Pb[:, i] at principal angle theta[i].
    """
    Va, lam, Vbt = np.linalg.svd(A.T @ B)
    theta = np.arccos(np.clip(lam, -1.0, 1.0))
    return A @ Va, B @ Vbt.T, theta


def geodesic_interpolate(A, B, t):
    """Point at fraction t on the plane-to-plane geodesic from A to B.

    Within-plane spin is removed: the path is parameterized by principal
    angles, so t=0 spans plane(A) and t=1 spans plane(B).
    """
    A, B = _check_pair(A, B)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    if proj_distance(A, B) < SAME_PLANE_TOL:
        return orient_align(B, A)
    Pa, Pb, theta = _principal_frames(A, B)
    G = np.empty_like(Pa)
    for i, th in enumerate(theta):
        if th < 1e-9:
            G[:, i] = Pa[:, i]
        else:
            q = (Pb[:, i] - np.cos(th) * Pa[:, i]) / np.sin(th)
            G[:, i] = np.cos(t * th) * Pa[:, i] + np.sin(t * th) * q
    return orthonormalize(G)
