"""SO(3) and small linear-algebra primitives used throughout the estimator.

Conventions, stated once and used everywhere:

* Attitude is stored as a unit quaternion ``[w, x, y, z]``; rotation matrices
  are materialized on demand.  ``quat_to_matrix(q)`` maps body-frame vectors
  into the parent frame.
* All tangent-space perturbations compose on the right:
  ``R <-+ delta  ==  R @ so3_exp(delta)``.
"""

from __future__ import annotations

import numpy as np

# Series switchover points: below these angles the closed forms lose digits
# to cancellation, so low-order Taylor expansions take over.
_EXP_TAYLOR_ANGLE = 1e-8
_LOG_TAYLOR_ANGLE = 1e-6


def skew(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def so3_exp(phi: np.ndarray) -> np.ndarray:
    """Rodrigues map from an axis-angle vector (rad) to a rotation matrix."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (3,) or not np.all(np.isfinite(phi)):
        raise ValueError("so3_exp expects a finite 3-vector")
    angle = np.linalg.norm(phi)
    K = skew(phi)
    if angle < _EXP_TAYLOR_ANGLE:
        return np.eye(3) + K + 0.5 * (K @ K)
    s = np.sin(angle) / angle
    c = (1.0 - np.cos(angle)) / (angle * angle)
    return np.eye(3) + s * K + c * (K @ K)


def so3_log(R: np.ndarray) -> np.ndarray:
    """Principal logarithm of a rotation matrix; result norm <= pi.

    At the antipode (angle pi) the axis sign follows the largest diagonal
    entry, with remaining signs taken from the off-diagonal sums.
    """
    R = np.asarray(R, dtype=float)
    trace = np.clip((np.trace(R) - 1.0) * 0.5, -1.0, 1.0)
    angle = np.arccos(trace)
    vee = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if angle < _LOG_TAYLOR_ANGLE:
        # log(R) ~ vee * (1 + angle^2/6) near identity
        return vee * (1.0 + angle * angle / 6.0)
    if np.pi - angle < 1e-6:
        # Near the antipode sin(angle) ~ 0; recover the axis from
        # (R + I)/2 = aa^T + O(pi - angle).
        A = 0.5 * (R + np.eye(3))
        k = int(np.argmax(np.diag(A)))
        axis = np.empty(3)
        axis[k] = np.sqrt(max(A[k, k], 0.0))
        for i in range(3):
            if i != k:
                axis[i] = 0.5 * (A[i, k] + A[k, i]) / axis[k]
        axis = axis / np.linalg.norm(axis)
        if np.dot(axis, vee) < 0:
            axis = -axis
        elif np.linalg.norm(vee) < 1e-12:
            # Exactly pi: both signs are valid, pick the one whose first
            # nonzero component is positive (so log of pi-about-x is [pi,0,0]).
            for comp in axis:
                if abs(comp) > 1e-9:
                    if comp < 0:
                        axis = -axis
                    break
        return axis * angle
    return vee * (angle / np.sin(angle))


def so3_right_jacobian(phi: np.ndarray) -> np.ndarray:
    """Right Jacobian J_r with Exp(phi + d) ~ Exp(phi) Exp(J_r(phi) d)."""
    phi = np.asarray(phi, dtype=float)
    angle = np.linalg.norm(phi)
    K = skew(phi)
    if angle < _EXP_TAYLOR_ANGLE:
        return np.eye(3) - 0.5 * K + (K @ K) / 6.0
    a2 = angle * angle
    c1 = (1.0 - np.cos(angle)) / a2
    c2 = (angle - np.sin(angle)) / (a2 * angle)
    return np.eye(3) - c1 * K + c2 * (K @ K)


def so3_right_jacobian_inv(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    angle = np.linalg.norm(phi)
    K = skew(phi)
    if angle < _EXP_TAYLOR_ANGLE:
        return np.eye(3) + 0.5 * K + (K @ K) / 12.0
    cot_term = 1.0 / (angle * angle) - (1.0 + np.cos(angle)) / (2.0 * angle * np.sin(angle))
    return np.eye(3) + 0.5 * K + cot_term * (K @ K)


# ----------------------------- quaternions ------------------------------- #
# Layout [w, x, y, z], Hamilton product, q maps body -> parent.

def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q)


def quat_from_rotvec(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    angle = np.linalg.norm(phi)
    if angle < _EXP_TAYLOR_ANGLE:
        q = np.concatenate(([1.0 - angle * angle / 8.0], 0.5 * phi))
        return quat_normalize(q)
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) / angle * phi))


def quat_to_rotvec(q: np.ndarray) -> np.ndarray:
    q = quat_normalize(q)
    if q[0] < 0:
        q = -q
    vec = q[1:]
    norm = np.linalg.norm(vec)
    if norm < _EXP_TAYLOR_ANGLE:
        return 2.0 * vec / q[0] * (1.0 - norm * norm / (3.0 * q[0] * q[0]))
    angle = 2.0 * np.arctan2(norm, q[0])
    return vec * (angle / norm)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(R: np.ndarray) -> np.ndarray:
    """Shepperd's method; numerically safe for all rotation matrices."""
    R = np.asarray(R, dtype=float)
    t = np.trace(R)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(R[i, i] - R[j, j] - R[k, k] + 1.0) * 2.0
        q = np.empty(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    if q[0] < 0:
        q = -q
    return quat_normalize(q)


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    return quat_to_matrix(q) @ np.asarray(v, dtype=float)


# --------------------------- eigendecomposition --------------------------- #

def symmetric_eigendecompose(M: np.ndarray, sym_tol: float = 1e-9):
    """Eigenvalues (descending) and matching orthonormal eigenvectors of a
    symmetric 3x3 (or general n x n) matrix.

    Raises ValueError if the input deviates from symmetry by more than
    ``sym_tol`` relative to its norm.
    """
    M = np.asarray(M, dtype=float)
    scale = max(1.0, np.linalg.norm(M))
    if np.linalg.norm(M - M.T) > sym_tol * scale:
        raise ValueError("symmetric_eigendecompose requires a symmetric matrix")
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]
