"""Scenario construction: region grid, clustered users and JSON persistence.

User generation draws from a numpy ``PCG64`` stream in this fixed order:

1. cluster sizes, one integer at a time until the user count is reached;
2. cluster centers, ``(n_clusters, 3)`` uniforms;
3. per-user offsets: ``(n_users, 3)`` standard normals for the direction,
   then ``n_users`` uniforms for the radius;
4. ``n_users`` AoV uniforms;
5. ``(n_users, 3)`` standard normals for the LoV axes.

Changing the AoV interval with a fixed seed therefore moves no user.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .channel import RadioParams
from .coverage import User

LOV_MODES = ("sphere", "hemisphere-up")


class ScenarioError(ValueError):
    """Malformed scenario file or inconsistent scenario data."""


class ScenarioWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Region:
    length: float = 1000.0
    breadth: float = 1000.0
    altitude: float = 100.0
    grid_size: float = 20.0
    boundary_margin: float = 50.0

    def __post_init__(self):
        for name in ("length", "breadth", "altitude", "grid_size"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"region.{name} must be positive, got {v}")
        if not (math.isfinite(self.boundary_margin) and self.boundary_margin >= 0):
            raise ValueError("region.boundary_margin must be nonnegative")
        for name in ("length", "breadth", "altitude"):
            cells = getattr(self, name) / self.grid_size
            if abs(cells - round(cells)) > 1e-6:
                raise ValueError(f"region.grid_size does not divide region.{name}")

    def contains(self, p, tol: float = 1e-9) -> bool:
        x, y, z = p
        return (
            -tol <= x <= self.length + tol
            and -tol <= y <= self.breadth + tol
            and -tol <= z <= self.altitude + tol
        )

    def axis_cells(self) -> tuple[int, int, int]:
        """Cell counts along x, y, z; partial layers round up."""
        g, m = self.grid_size, self.boundary_margin

        def count(extent: float) -> int:
            return int(math.ceil(extent / g - 1e-9))

        return (
            count(self.length + 2 * m),
            count(self.breadth + 2 * m),
            count(self.altitude + m),
        )


@dataclass(frozen=True)
class GridCandidate:
    index: int
    center: tuple[float, float, float]


@dataclass(frozen=True)
class Scenario:
    region: Region
    users: tuple[User, ...]
    params: RadioParams = field(default_factory=RadioParams)
    seed: int = 0
    aov_interval: tuple[float, float] = (180.0, 180.0)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "aov_interval", tuple(float(a) for a in self.aov_interval))
        lo, hi = self.aov_interval
        if not 0.0 < lo <= hi <= 180.0:
            raise ScenarioError(f"aov_interval must satisfy 0 < lo <= hi <= 180, got {lo, hi}")
        seen = set()
        for i, u in enumerate(self.users):
            if u.id in seen:
                raise ScenarioError(f"users[{i}].id: duplicate id {u.id}")
            seen.add(u.id)
            if not self.region.contains(u.position):
                raise ScenarioError(f"users[{i}].pos: outside the region box")
            if not lo - 1e-9 <= u.aov <= hi + 1e-9:
                raise ScenarioError(f"users[{i}].aov_deg: {u.aov} outside aov_interval")

    def user_by_id(self) -> dict[int, User]:
        return {u.id: u for u in self.users}


def grid_centers(region: Region) -> np.ndarray:
    """Cell centers as a ``(K, 3)`` array, x varying fastest, then y, then z."""
    nx, ny, nz = region.axis_cells()
    g, m = region.grid_size, region.boundary_margin
    xs = -m + g * (np.arange(nx) + 0.5)
    ys = -m + g * (np.arange(ny) + 0.5)
    zs = g * (np.arange(nz) + 0.5)
    z, y, x = np.meshgrid(zs, ys, xs, indexing="ij")
    return np.column_stack([x.ravel(), y.ravel(), z.ravel()])


def generate_grid(region: Region) -> list[GridCandidate]:
    return [
        GridCandidate(k, (float(c[0]), float(c[1]), float(c[2])))
        for k, c in enumerate(grid_centers(region))
    ]


def partition_sizes(rng: np.random.Generator, n_users: int, size_range) -> list[int]:
    lo, hi = size_range
    sizes: list[int] = []
    while sum(sizes) < n_users:
        sizes.append(int(rng.integers(lo, hi + 1)))
    sizes[-1] -= sum(sizes) - n_users
    return sizes


def _unit_rows(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=1, keepdims=True)
    v = np.where(n == 0.0, np.array([0.0, 0.0, 1.0]), v)
    return v / np.where(n == 0.0, 1.0, n)


def generate_users(
    region: Region,
    n_users: int,
    cluster_size_range: tuple[int, int] = (10, 15),
    aov_interval: tuple[float, float] = (180.0, 180.0),
    seed: int = 0,
    cluster_radius: float = 50.0,
    lov_mode: str = "sphere",
) -> list[User]:
    """Clustered users with uniform AoV in ``aov_interval``; pure in ``seed``."""
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    lo_size, hi_size = cluster_size_range
    if not 1 <= lo_size <= hi_size:
        raise ValueError(f"bad cluster_size_range {cluster_size_range}")
    lo, hi = aov_interval
    if not 0.0 < lo <= hi <= 180.0:
        raise ValueError(f"aov_interval must satisfy 0 < lo <= hi <= 180, got {aov_interval}")
    if lov_mode not in LOV_MODES:
        raise ValueError(f"lov_mode must be one of {LOV_MODES}")
    dims = np.array([region.length, region.breadth, region.altitude])
    if cluster_radius < 0 or cluster_radius > dims.min() / 2:
        raise ValueError(
            f"cluster_radius {cluster_radius} exceeds half the smallest region dimension"
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    sizes = partition_sizes(rng, n_users, cluster_size_range)
    centers = rng.uniform(cluster_radius, dims - cluster_radius, size=(len(sizes), 3))
    directions = _unit_rows(rng.standard_normal((n_users, 3)))
    radii = cluster_radius * np.cbrt(rng.random(n_users))
    aovs = rng.uniform(lo, hi, size=n_users)
    axes = _unit_rows(rng.standard_normal((n_users, 3)))
    if lov_mode == "hemisphere-up":
        axes[:, 2] = np.abs(axes[:, 2])

    owner = np.repeat(np.arange(len(sizes)), sizes)
    pos = np.clip(centers[owner] + directions * radii[:, None], 0.0, dims)
    return [
        User(j, tuple(pos[j]), tuple(axes[j]), float(aovs[j])) for j in range(n_users)
    ]


# --- JSON persistence -----------------------------------------------------

_REGION_KEYS = {
    "length_m": "length",
    "breadth_m": "breadth",
    "altitude_m": "altitude",
    "grid_size_m": "grid_size",
    "boundary_margin_m": "boundary_margin",
}
_RADIO_KEYS = {
    "fc_hz": "f_c",
    "pt_w": "p_t",
    "gt_db": "g_t",
    "bandwidth_hz": "bandwidth",
    "noise_psd_dbm_hz": "noise_psd",
    "snr_threshold_db": "snr_threshold",
    "hpbw_deg": "hpbw",
}
_USER_KEYS = ("id", "pos", "lov_axis", "aov_deg")
_TOP_KEYS = ("region", "radio", "users", "seed", "aov_interval_deg")


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    return {
        "region": {k: getattr(s.region, a) for k, a in _REGION_KEYS.items()},
        "radio": {k: getattr(s.params, a) for k, a in _RADIO_KEYS.items()},
        "users": [
            {"id": u.id, "pos": list(u.position), "lov_axis": list(u.lov_axis), "aov_deg": u.aov}
            for u in s.users
        ],
        "seed": s.seed,
        "aov_interval_deg": list(s.aov_interval),
    }


def _warn_unknown(obj: dict, known, where: str) -> None:
    for key in obj:
        if key not in known:
            warnings.warn(f"{where}: ignoring unknown field {key!r}", ScenarioWarning, stacklevel=3)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _vector(value, where: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ScenarioError(f"{where}: expected a list of 3 numbers")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))


def _section(data: dict, name: str, keys: dict[str, str], cls):
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"{name}: expected an object")
    _warn_unknown(raw, keys, name)
    kwargs = {attr: _number(raw[k], f"{name}.{k}") for k, attr in keys.items() if k in raw}
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{name}: {exc}") from exc


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario: expected a JSON object")
    _warn_unknown(data, _TOP_KEYS, "scenario")
    region = _section(data, "region", _REGION_KEYS, Region)
    params = _section(data, "radio", _RADIO_KEYS, RadioParams)

    if "users" not in data:
        raise ScenarioError("users: missing field")
    if not isinstance(data["users"], list):
        raise ScenarioError("users: expected a list")
    users = []
    for i, raw in enumerate(data["users"]):
        where = f"users[{i}]"
        if not isinstance(raw, dict):
            raise ScenarioError(f"{where}: expected an object")
        _warn_unknown(raw, _USER_KEYS, where)
        for key in _USER_KEYS:
            if key not in raw:
                raise ScenarioError(f"{where}.{key}: missing field")
        if isinstance(raw["id"], bool) or not isinstance(raw["id"], int):
            raise ScenarioError(f"{where}.id: expected an integer")
        try:
            users.append(
                User(
                    raw["id"],
                    _vector(raw["pos"], f"{where}.pos"),
                    _vector(raw["lov_axis"], f"{where}.lov_axis"),
                    _number(raw["aov_deg"], f"{where}.aov_deg"),
                )
            )
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioError("seed: expected an integer")
    if "aov_interval_deg" in data:
        iv = data["aov_interval_deg"]
        if not isinstance(iv, list) or len(iv) != 2:
            raise ScenarioError("aov_interval_deg: expected [lo, hi]")
        interval = (_number(iv[0], "aov_interval_deg[0]"), _number(iv[1], "aov_interval_deg[1]"))
    elif users:
        interval = (min(u.aov for u in users), max(u.aov for u in users))
    else:
        interval = (180.0, 180.0)
    return Scenario(region, tuple(users), params, seed, interval)


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(data)
