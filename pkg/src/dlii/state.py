"""Navigation state and its manifold plus/minus operators.

Error-state layout (tangent space), right-perturbation convention:

    LGO (dim 12): [dtheta 0:3, dt 3:6, dv 6:9, db_w 9:12]
    LIO (dim 17): LGO blocks + [db_a 12:15, dg 15:17]

The gravity block is a 2-vector in the tangent plane of the current gravity
estimate, so any update preserves the gravity norm exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .manifold import (
    quat_from_rotvec,
    quat_identity,
    quat_mul,
    quat_normalize,
    quat_to_matrix,
    quat_to_rotvec,
    quat_conj,
)

LGO_DIM = 12
LIO_DIM = 17

THETA = slice(0, 3)
POS = slice(3, 6)
VEL = slice(6, 9)
BW = slice(9, 12)
BA = slice(12, 15)
GRAV = slice(15, 17)


def gravity_tangent_basis(g: np.ndarray) -> np.ndarray:
    """3x2 orthonormal basis of the plane orthogonal to g."""
    a = np.asarray(g, dtype=float)
    a = a / np.linalg.norm(a)
    tmp = np.array([0.0, 0.0, 1.0])
    if abs(a @ tmp) > 0.99:
        tmp = np.array([1.0, 0.0, 0.0])
    b1 = tmp - a * (a @ tmp)
    b1 = b1 / np.linalg.norm(b1)
    b2 = np.cross(a, b1)
    return np.stack([b1, b2], axis=1)


@dataclass
class NavState:
    """Manifold state: attitude (unit quaternion, body->global), position,
    velocity, gyro bias; LIO mode adds accel bias and gravity vector."""

    q: np.ndarray = field(default_factory=quat_identity)
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b_w: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b_a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    g: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))
    mode: str = "lgo"
    P: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in ("lgo", "lio"):
            raise ValueError(f"unknown state mode {self.mode!r}")
        if self.P is None:
            self.P = np.zeros((self.dim, self.dim))

    @property
    def dim(self) -> int:
        return LGO_DIM if self.mode == "lgo" else LIO_DIM

    @property
    def R(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def copy(self) -> "NavState":
        return NavState(
            q=self.q.copy(),
            t=self.t.copy(),
            v=self.v.copy(),
            b_w=self.b_w.copy(),
            b_a=self.b_a.copy(),
            g=self.g.copy(),
            mode=self.mode,
            P=self.P.copy(),
        )


def boxplus(x: NavState, delta: np.ndarray) -> NavState:
    """Retract a tangent-space delta onto the state manifold (right side)."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (x.dim,):
        raise ValueError(f"delta has dim {delta.shape}, state expects ({x.dim},)")
    out = x.copy()
    out.q = quat_normalize(quat_mul(x.q, quat_from_rotvec(delta[THETA])))
    out.t = x.t + delta[POS]
    out.v = x.v + delta[VEL]
    out.b_w = x.b_w + delta[BW]
    if x.mode == "lio":
        out.b_a = x.b_a + delta[BA]
        B = gravity_tangent_basis(x.g)
        raw = x.g + B @ delta[GRAV]
        out.g = raw * (np.linalg.norm(x.g) / np.linalg.norm(raw))
    return out


def boxminus(y: NavState, x: NavState) -> np.ndarray:
    """Inverse of boxplus: the tangent delta with y = x [+] delta."""
    if y.mode != x.mode:
        raise ValueError("boxminus requires states of the same mode")
    delta = np.zeros(x.dim)
    delta[THETA] = quat_to_rotvec(quat_mul(quat_conj(x.q), y.q))
    delta[POS] = y.t - x.t
    delta[VEL] = y.v - x.v
    delta[BW] = y.b_w - x.b_w
    if x.mode == "lio":
        delta[BA] = y.b_a - x.b_a
        B = gravity_tangent_basis(x.g)
        norm = np.linalg.norm(x.g)
        along = (x.g @ y.g) / norm
        if along <= 0:
            raise ValueError("gravity vectors more than 90 degrees apart")
        delta[GRAV] = (B.T @ y.g) * (norm / along)
    return delta
