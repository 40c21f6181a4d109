"""3D vector helpers, cone membership and the orientation-circle construction.

Points and directions are plain ``(x, y, z)`` tuples at the API boundary;
internally everything is converted to float numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

Vec3 = tuple[float, float, float]

# Absolute slack applied to cosine comparisons so boundary points don't flicker.
COS_TOL = 1e-9

_BASIS = (
    np.array([1.0, 0.0, 0.0]),
    np.array([0.0, 1.0, 0.0]),
    np.array([0.0, 0.0, 1.0]),
)


def as_array(v: Sequence[float]) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite vector component")
    return arr


def as_vec3(v: Sequence[float]) -> Vec3:
    a = as_array(v)
    return (float(a[0]), float(a[1]), float(a[2]))


def normalize(v: Sequence[float]) -> np.ndarray:
    a = as_array(v)
    n = np.linalg.norm(a)
    if n == 0.0:
        raise ValueError("degenerate direction")
    return a / n


def unit_vec3(v: Sequence[float]) -> Vec3:
    """Unit-norm copy of ``v``; vectors already unit within 1e-12 are kept as-is."""
    a = as_array(v)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ValueError("degenerate direction")
    if abs(n - 1.0) > 1e-12:
        a = a / n
    return (float(a[0]), float(a[1]), float(a[2]))


def angle_between(v: Sequence[float], w: Sequence[float]) -> float:
    """Angle in radians between two nonzero vectors, in [0, pi]."""
    a, b = normalize(v), normalize(w)
    return math.acos(max(-1.0, min(1.0, float(a @ b))))


def cos_within(cos_value, half_angle: float):
    """True where an angle with the given cosine is <= ``half_angle``.

    Works elementwise on arrays. ``half_angle >= pi`` accepts everything.
    """
    if half_angle >= math.pi:
        return np.ones_like(cos_value, dtype=bool) if np.ndim(cos_value) else True
    return cos_value >= math.cos(half_angle) - COS_TOL


def cone_contains(
    apex: Sequence[float],
    axis: Sequence[float],
    half_angle: float,
    max_range: float | None,
    p: Sequence[float],
) -> bool:
    """Membership in a spherical-base cone.

    ``max_range=None`` means unbounded. The apex itself is inside.
    """
    ax = normalize(axis)
    if not 0.0 < half_angle <= math.pi:
        raise ValueError(f"half_angle must lie in (0, pi], got {half_angle}")
    d = as_array(p) - as_array(apex)
    dist = float(np.linalg.norm(d))
    if max_range is not None and dist > max_range:
        return False
    if dist == 0.0:
        return True
    return bool(cos_within(float(ax @ d) / dist, half_angle))


def in_plane_unit(n: np.ndarray) -> np.ndarray:
    """Deterministic unit vector perpendicular to the unit normal ``n``."""
    for e in _BASIS:
        c = np.cross(n, e)
        cn = np.linalg.norm(c)
        if cn > 1e-9:
            return c / cn
    raise ValueError("degenerate direction")  # unreachable for unit n


@dataclass(frozen=True)
class OrientationCircle:
    center: Vec3
    radius: float
    a: Vec3
    b: Vec3
    normal: Vec3

    def point(self, omega_deg: float) -> np.ndarray:
        w = math.radians(omega_deg)
        return np.asarray(self.center) + self.radius * (
            np.asarray(self.a) * math.sin(w) + np.asarray(self.b) * math.cos(w)
        )


def orientation_circle(
    c_k: Sequence[float], u_j: Sequence[float], phi: float
) -> OrientationCircle:
    """Circle of beam-edge contact points around ``u_j`` seen from ``c_k``.

    Every point p on the circle satisfies angle(p - c_k, u_j - c_k) = phi/2,
    so aiming the antenna at p keeps ``u_j`` exactly on the beam boundary.
    ``phi`` is the full beamwidth in degrees.
    """
    if not 0.0 < phi < 180.0:
        raise ValueError(f"beamwidth must lie in (0, 180) degrees, got {phi}")
    c, u = as_array(c_k), as_array(u_j)
    offset = c - u
    length = float(np.linalg.norm(offset))
    if length == 0.0:
        raise ValueError("grid point and user coincide")
    n = offset / length
    a = in_plane_unit(n)
    b = np.cross(a, n)
    r = length * math.tan(math.radians(phi) / 2.0)
    return OrientationCircle(as_vec3(u), r, as_vec3(a), as_vec3(b), as_vec3(n))


@dataclass(frozen=True)
class OrientationCandidate:
    axis: Vec3
    anchor_user: int
    omega: float
    boresight: bool = False


def candidate_orientations(
    c_k: Sequence[float],
    u_j: Sequence[float],
    phi: float,
    n_samples: int,
    anchor_user: int = -1,
) -> list[OrientationCandidate]:
    """``n_samples`` beam-edge orientations plus the boresight one.

    Boundary candidates come first in increasing omega; the boresight
    candidate (axis pointing straight at the anchor) is last.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    circle = orientation_circle(c_k, u_j, phi)
    c = as_array(c_k)
    out = []
    for i in range(n_samples):
        omega = i * 360.0 / n_samples
        axis = normalize(circle.point(omega) - c)
        out.append(OrientationCandidate(as_vec3(axis), anchor_user, omega))
    bore = normalize(as_array(u_j) - c)
    out.append(OrientationCandidate(as_vec3(bore), anchor_user, 0.0, boresight=True))
    return out


def candidate_axes(
    c_k: np.ndarray, anchors: np.ndarray, phi: float, n_samples: int
) -> np.ndarray:
    """Vectorized :func:`candidate_orientations` for many anchors at once.

    Returns an array of shape ``(len(anchors), n_samples + 1, 3)`` with the
    same ordering (boundary candidates by omega, boresight last). Anchors
    coinciding with ``c_k`` get straight-down axes; any orientation covers them.
    """
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 3)
    m = len(anchors)
    out = np.empty((m, n_samples + 1, 3))
    offset = c_k[None, :] - anchors
    length = np.linalg.norm(offset, axis=1)
    collocated = length == 0.0
    safe = np.where(collocated, 1.0, length)
    n = offset / safe[:, None]

    a = np.empty_like(n)
    picked = np.zeros(m, dtype=bool)
    for e in _BASIS:
        c = np.cross(n, e)
        cn = np.linalg.norm(c, axis=1)
        take = ~picked & (cn > 1e-9)
        a[take] = c[take] / cn[take, None]
        picked |= take
    a[~picked] = _BASIS[0]
    b = np.cross(a, n)

    r = length * math.tan(math.radians(phi) / 2.0)
    w = np.radians(np.arange(n_samples) * 360.0 / n_samples)
    ring = (
        a[:, None, :] * np.sin(w)[None, :, None] + b[:, None, :] * np.cos(w)[None, :, None]
    ) * r[:, None, None]
    # p(w) - c_k = (u_j - c_k) + ring = -offset + ring
    vec = ring - offset[:, None, :]
    norms = np.linalg.norm(vec, axis=2, keepdims=True)
    out[:, :n_samples, :] = vec / np.where(norms == 0.0, 1.0, norms)
    out[:, n_samples, :] = -n
    out[collocated] = (0.0, 0.0, -1.0)
    return out
