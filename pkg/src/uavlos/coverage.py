"""Guaranteed line-of-sight predicates between UAV poses and users."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import RadioParams, max_range, snr
from .geometry import Vec3, as_array, as_vec3, cone_contains, cos_within, unit_vec3

# Reported SNR for a collocated UAV/user is evaluated at this distance.
MIN_LINK_DISTANCE = 1.0


@dataclass(frozen=True)
class User:
    """A user at ``position`` that can only see the sky inside a cone.

    ``aov`` is the cone half-angle in degrees measured from ``lov_axis``.
    """

    id: int
    position: Vec3
    lov_axis: Vec3
    aov: float

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position))
        object.__setattr__(self, "lov_axis", unit_vec3(self.lov_axis))
        if not 0.0 < self.aov <= 180.0:
            raise ValueError(f"user {self.id}: aov must lie in (0, 180], got {self.aov}")


@dataclass(frozen=True)
class UavPose:
    position: Vec3
    orientation: Vec3

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position))
        object.__setattr__(self, "orientation", unit_vec3(self.orientation))


def distance(a, b) -> float:
    return float(np.linalg.norm(as_array(a) - as_array(b)))


def link_snr(params: RadioParams, d: float) -> float:
    """SNR for a covered link, with distances below 1 m floored."""
    return snr(params, max(d, MIN_LINK_DISTANCE))


def uav_covers(pose: UavPose, user: User, params: RadioParams) -> bool:
    """User within range and inside the UAV's beam cone."""
    return cone_contains(
        pose.position,
        pose.orientation,
        math.radians(params.hpbw) / 2.0,
        max_range(params),
        user.position,
    )


def user_sees(user: User, pose: UavPose, params: RadioParams) -> bool:
    """UAV within range and inside the user's line-of-view cone."""
    return cone_contains(
        user.position, user.lov_axis, math.radians(user.aov), max_range(params), pose.position
    )


def f_los(pose: UavPose, user: User, params: RadioParams) -> int:
    return int(uav_covers(pose, user, params) and user_sees(user, pose, params))


def in_lov_region(grid_point, user: User, params: RadioParams) -> bool:
    """Whether some antenna orientation at ``grid_point`` gives the user LoS."""
    return cone_contains(
        user.position, user.lov_axis, math.radians(user.aov), max_range(params), grid_point
    )


def lov_region_mask(
    centers: np.ndarray, user: User, params: RadioParams, d_max: float | None = None
) -> np.ndarray:
    """Vectorized :func:`in_lov_region` over an ``(K, 3)`` array of points."""
    if d_max is None:
        d_max = max_range(params)
    d = centers - np.asarray(user.position)
    dist = np.linalg.norm(d, axis=1)
    inside = dist <= d_max
    cosv = (d @ np.asarray(user.lov_axis)) / np.where(dist == 0.0, 1.0, dist)
    inside &= cos_within(cosv, math.radians(user.aov)) | (dist == 0.0)
    return inside
