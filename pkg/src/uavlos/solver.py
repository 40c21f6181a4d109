"""Greedy UAV placement/orientation, the fixed-orientation baseline and an
exhaustive oracle for small instances.

The greedy computes, for every grid cell, which of its LoV-feasible users
each candidate orientation covers exactly once. Later iterations only mask
out users that an earlier deployment already took, so ``flos_evals`` counts
real geometric evaluations and never re-counts cached ones.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .channel import SPEED_OF_LIGHT, RadioParams, max_range
from .coverage import MIN_LINK_DISTANCE, UavPose, User, f_los, in_lov_region, link_snr, lov_region_mask
from .geometry import OrientationCandidate, candidate_axes, candidate_orientations, cos_within
from .scenario import GridCandidate, Scenario, generate_grid

DOWN = (0.0, 0.0, -1.0)
DEFAULT_OMEGA_SAMPLES = 72
ORACLE_LIMIT = 10**7


class AuditError(ValueError):
    """A solution violates feasibility, disjointness or bookkeeping."""


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Deployment:
    grid_index: int
    pose: UavPose
    assigned_users: frozenset[int]
    avg_snr: float
    anchor_user: int | None = None


@dataclass
class SolveStats:
    lov_checks: int = 0
    flos_evals: int = 0
    anchor_evals: int = 0
    iterations: int = 0
    coverable_history: list[int] = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        # wall time is deliberately left out so solution files are reproducible
        return {
            "lov_checks": self.lov_checks,
            "flos_evals": self.flos_evals,
            "anchor_evals": self.anchor_evals,
            "iterations": self.iterations,
            "coverable_history": list(self.coverable_history),
        }


@dataclass
class Solution:
    algorithm: str
    budget: int
    deployments: list[Deployment]
    uncovered_users: frozenset[int]
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def covered_users(self) -> frozenset[int]:
        return frozenset().union(*(d.assigned_users for d in self.deployments))

    @property
    def objective(self) -> float:
        """Total assigned SNR per deployed UAV (0 when nothing is deployed)."""
        if not self.deployments:
            return 0.0
        total = sum(d.avg_snr * len(d.assigned_users) for d in self.deployments)
        return total / len(self.deployments)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "budget": self.budget,
            "deployments": [
                {
                    "grid_index": d.grid_index,
                    "pos": list(d.pose.position),
                    "orient": list(d.pose.orientation),
                    "users": sorted(d.assigned_users),
                    "avg_snr_db": d.avg_snr,
                    "anchor": d.anchor_user,
                }
                for d in self.deployments
            ],
            "uncovered": sorted(self.uncovered_users),
            "objective_eq6": self.objective,
            "stats": self.stats.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def solution_from_dict(data: Any) -> Solution:
    try:
        deployments = [
            Deployment(
                int(d["grid_index"]),
                UavPose(tuple(d["pos"]), tuple(d["orient"])),
                frozenset(int(u) for u in d["users"]),
                float(d["avg_snr_db"]),
                d.get("anchor"),
            )
            for d in data["deployments"]
        ]
        st = data.get("stats", {})
        stats = SolveStats(
            st.get("lov_checks", 0),
            st.get("flos_evals", 0),
            st.get("anchor_evals", 0),
            st.get("iterations", 0),
            list(st.get("coverable_history", [])),
        )
        return Solution(
            data.get("algorithm", "unknown"),
            int(data["budget"]),
            deployments,
            frozenset(int(u) for u in data["uncovered"]),
            stats,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AuditError(f"malformed solution: {exc!r}") from exc


def save_solution(solution: Solution, path) -> None:
    Path(path).write_text(solution.to_json())


def load_solution(path) -> Solution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise AuditError(f"{path}: invalid JSON ({exc})") from exc
    return solution_from_dict(data)


# --- greedy ---------------------------------------------------------------


def _snr_array(params: RadioParams, dist: np.ndarray) -> np.ndarray:
    d = np.maximum(dist, MIN_LINK_DISTANCE)
    pl = 20.0 * np.log10(4.0 * math.pi * params.f_c * d / SPEED_OF_LIGHT)
    return params.tx_power_dbm + params.g_t - pl - params.noise_power_dbm


class _Cell:
    """Cached coverage of one grid cell over its initial user set."""

    __slots__ = ("index", "center", "users", "snr", "packed", "row_anchor", "n_users", "alive")

    def __init__(self, index, center, users, snr, cover, row_anchor):
        self.index = index
        self.center = center
        self.users = users  # positions into scenario.users, ascending
        self.snr = snr
        self.n_users = len(users)
        self.packed = np.packbits(cover, axis=1)
        self.row_anchor = row_anchor  # local anchor per row, -1 if none
        self.alive = np.ones(len(users), dtype=bool)

    def best(self):
        """(count, avg_snr, row) of the best live candidate, or None."""
        rows = np.flatnonzero((self.row_anchor < 0) | self.alive[np.maximum(self.row_anchor, 0)])
        if len(rows) == 0:
            return None
        cov = np.unpackbits(self.packed[rows], axis=1, count=self.n_users).astype(bool)
        cov &= self.alive
        counts = cov.sum(axis=1)
        top = counts.max()
        if top == 0:
            return None
        sums = np.where(counts == top, cov @ self.snr, -np.inf)
        i = int(np.argmax(sums))
        return int(top), float(sums[i] / top), int(rows[i])

    def covered(self, row: int) -> np.ndarray:
        cov = np.unpackbits(self.packed[row], count=self.n_users).astype(bool)
        return self.users[cov & self.alive]


def _lov_matrix(scenario: Scenario, centers: np.ndarray) -> np.ndarray:
    d_max = max_range(scenario.params)
    return np.array(
        [lov_region_mask(centers, u, scenario.params, d_max) for u in scenario.users]
    ).reshape(len(scenario.users), len(centers))


def _build_cells(scenario, grid, lov, n_samples, stats, fixed_axis):
    params = scenario.params
    half = math.radians(params.hpbw) / 2.0
    positions = np.array([u.position for u in scenario.users]).reshape(-1, 3)
    cells = []
    for k in np.flatnonzero(lov.any(axis=0)):
        users = np.flatnonzero(lov[:, k])
        center = np.asarray(grid[k].center, dtype=float)
        vec = positions[users] - center
        dist = np.linalg.norm(vec, axis=1)
        at_center = dist == 0.0
        unit = vec / np.where(at_center, 1.0, dist)[:, None]
        if fixed_axis is None:
            axes = candidate_axes(center, positions[users], params.hpbw, n_samples).reshape(-1, 3)
            row_anchor = np.repeat(np.arange(len(users)), n_samples + 1)
        else:
            axes = np.asarray([fixed_axis], dtype=float)
            row_anchor = np.array([-1])
        cover = cos_within(axes @ unit.T, half) | at_center
        stats.flos_evals += cover.size
        cells.append(_Cell(grid[k].index, center, users, _snr_array(params, dist), cover, row_anchor))
    return cells


def _solve(scenario, grid, uav_budget, n_samples, fixed_axis, name) -> Solution:
    if uav_budget is None:
        uav_budget = len(grid)
    if uav_budget < 1:
        raise ValueError("uav_budget must be >= 1")
    if n_samples < 1:
        raise ValueError("n_omega_samples must be >= 1")
    t0 = time.perf_counter()
    stats = SolveStats()
    centers = np.array([g.center for g in grid], dtype=float).reshape(-1, 3)
    lov = _lov_matrix(scenario, centers)
    stats.lov_checks = lov.size
    cells = _build_cells(scenario, grid, lov, n_samples, stats, fixed_axis)

    by_user: dict[int, list[tuple[_Cell, int]]] = {}
    for cell in cells:
        for local, j in enumerate(cell.users):
            by_user.setdefault(int(j), []).append((cell, local))

    def evaluate_cell(cell):
        stats.anchor_evals += int(cell.alive.sum()) if fixed_axis is None else 1
        return cell.best()

    best = {}
    for cell in cells:
        b = evaluate_cell(cell)
        if b is not None:
            best[cell.index] = (cell, b)

    users = scenario.users
    deployments: list[Deployment] = []
    coverable = int(sum(c.alive.sum() for c in cells))
    while best and len(deployments) < uav_budget:
        stats.coverable_history.append(coverable)
        key = min(best, key=lambda k: (-best[k][1][0], -best[k][1][1], k))
        cell, (count, avg, row) = best[key]
        taken = cell.covered(row)
        anchor_local = int(cell.row_anchor[row])
        if fixed_axis is None:
            anchor_pos = np.asarray(users[cell.users[anchor_local]].position)
            axis = candidate_axes(cell.center, anchor_pos, scenario.params.hpbw, n_samples)[
                0, row % (n_samples + 1)
            ]
            anchor_id = users[cell.users[anchor_local]].id
        else:
            axis, anchor_id = fixed_axis, None
        deployments.append(
            Deployment(
                cell.index,
                UavPose(tuple(cell.center), tuple(axis)),
                frozenset(users[j].id for j in taken),
                avg,
                anchor_id,
            )
        )
        touched = {}
        for j in taken:
            for other, local in by_user[int(j)]:
                other.alive[local] = False
                coverable -= 1
                touched[other.index] = other
        for k, other in touched.items():
            b = evaluate_cell(other) if other.alive.any() else None
            if b is None:
                best.pop(k, None)
            else:
                best[k] = (other, b)

    stats.iterations = len(deployments)
    stats.wall_time_s = time.perf_counter() - t0
    covered = frozenset().union(*(d.assigned_users for d in deployments))
    uncovered = frozenset(u.id for u in users) - covered
    return Solution(name, uav_budget, deployments, uncovered, stats)


def greedy_solve(
    scenario: Scenario,
    grid: Sequence[GridCandidate] | None = None,
    uav_budget: int | None = None,
    n_omega_samples: int = DEFAULT_OMEGA_SAMPLES,
) -> Solution:
    """Greedy joint placement and orientation.

    Each round picks the (cell, orientation) covering the most remaining
    users; ties go to higher mean SNR, then lower cell index, anchor id and
    omega. Stops when nothing coverable remains or the budget is spent.
    ``uav_budget=None`` means one UAV per grid cell.
    """
    grid = generate_grid(scenario.region) if grid is None else list(grid)
    return _solve(scenario, grid, uav_budget, n_omega_samples, None, "greedy")


def baseline_solve(
    scenario: Scenario,
    grid: Sequence[GridCandidate] | None = None,
    uav_budget: int | None = None,
) -> Solution:
    """Same greedy loop with every antenna fixed straight down."""
    grid = generate_grid(scenario.region) if grid is None else list(grid)
    return _solve(scenario, grid, uav_budget, 1, DOWN, "baseline")


# --- exhaustive oracle ----------------------------------------------------


@dataclass(frozen=True)
class _Option:
    grid_index: int
    candidate: OrientationCandidate
    covered: frozenset[int]


def _oracle_options(scenario, grid, n_samples, stats) -> list[_Option]:
    params = scenario.params
    options: list[_Option] = []
    for g in grid:
        feasible = [u for u in scenario.users if in_lov_region(g.center, u, params)]
        stats.lov_checks += len(scenario.users)
        per_grid: list[_Option] = []
        for anchor in feasible:
            if tuple(anchor.position) == tuple(g.center):
                cands = [OrientationCandidate(DOWN, anchor.id, 0.0)]
            else:
                cands = candidate_orientations(g.center, anchor.position, params.hpbw, n_samples, anchor.id)
            for cand in cands:
                pose = UavPose(g.center, cand.axis)
                covered = frozenset(u.id for u in scenario.users if f_los(pose, u, params))
                stats.flos_evals += len(scenario.users)
                per_grid.append(_Option(g.index, cand, covered))
        # keep maximal coverage sets only; SNR is a function of the cell, so a
        # subset option from the same cell can never beat its superset
        kept: list[_Option] = []
        for opt in per_grid:
            if not opt.covered or any(opt.covered < o.covered for o in per_grid):
                continue
            if all(opt.covered != o.covered for o in kept):
                kept.append(opt)
        options.extend(kept)
    return options


def oracle_solve(
    scenario: Scenario,
    grid: Sequence[GridCandidate] | None = None,
    uav_budget: int = 1,
    n_omega_samples: int = 8,
    max_combinations: int = ORACLE_LIMIT,
) -> Solution:
    """Exhaustive search over sets of at most ``uav_budget`` (cell, orientation) pairs.

    Maximizes covered users, then total assigned SNR per deployed UAV, with
    each covered user assigned to its best-SNR covering UAV. Candidate
    orientations are the same finite set the greedy draws from.
    """
    grid = generate_grid(scenario.region) if grid is None else list(grid)
    if uav_budget < 1:
        raise ValueError("uav_budget must be >= 1")
    t0 = time.perf_counter()
    stats = SolveStats()
    options = _oracle_options(scenario, grid, n_omega_samples, stats)
    n_opt = len(options)
    total = sum(comb(n_opt, b) for b in range(1, min(uav_budget, n_opt) + 1))
    if total > max_combinations:
        raise InstanceTooLarge(f"{total} combinations exceed the limit of {max_combinations}")

    users = scenario.users
    ids = [u.id for u in users]
    col = {uid: i for i, uid in enumerate(ids)}
    centers = {g.index: g.center for g in grid}
    snr_table = np.full((n_opt, len(users)), -np.inf)
    for r, opt in enumerate(options):
        c = centers[opt.grid_index]
        for uid in opt.covered:
            u = users[col[uid]]
            d = float(np.linalg.norm(np.subtract(u.position, c)))
            snr_table[r, col[uid]] = link_snr(scenario.params, d)

    best_key = (0, 0.0)
    best_combo: tuple[int, ...] = ()
    for size in range(1, min(uav_budget, n_opt) + 1):
        combos = itertools.combinations(range(n_opt), size)
        while True:
            chunk = np.array(list(itertools.islice(combos, 50_000)), dtype=np.int64)
            if len(chunk) == 0:
                break
            stats.anchor_evals += len(chunk)
            best_snr = snr_table[chunk].max(axis=1)
            hit = np.isfinite(best_snr)
            counts = hit.sum(axis=1)
            objective = np.where(hit, best_snr, 0.0).sum(axis=1) / size
            order = np.lexsort((-objective, -counts))
            i = int(order[0])
            key = (int(counts[i]), float(objective[i]))
            if key > best_key:
                best_key, best_combo = key, tuple(int(x) for x in chunk[i])

    deployments = []
    if best_combo:
        rows = np.array(best_combo)
        owner = np.argmax(snr_table[rows], axis=0)  # first max wins ties
        has = np.isfinite(snr_table[rows].max(axis=0))
        for pos, r in enumerate(best_combo):
            opt = options[r]
            mine = [j for j in range(len(users)) if has[j] and owner[j] == pos]
            avg = float(np.mean(snr_table[r, mine])) if mine else 0.0
            deployments.append(
                Deployment(
                    opt.grid_index,
                    UavPose(centers[opt.grid_index], opt.candidate.axis),
                    frozenset(ids[j] for j in mine),
                    avg,
                    opt.candidate.anchor_user,
                )
            )
    stats.iterations = len(deployments)
    stats.wall_time_s = time.perf_counter() - t0
    covered = frozenset().union(*(d.assigned_users for d in deployments))
    return Solution("oracle", uav_budget, deployments, frozenset(ids) - covered, stats)


# --- audit ----------------------------------------------------------------


def audit(solution: Solution, scenario: Scenario, grid: Sequence[GridCandidate] | None = None) -> None:
    """Recompute every assignment from scratch; raise :class:`AuditError` on any violation."""
    grid = generate_grid(scenario.region) if grid is None else list(grid)
    centers = {g.index: g.center for g in grid}
    users = scenario.user_by_id()
    if len(solution.deployments) > solution.budget:
        raise AuditError(f"{len(solution.deployments)} deployments exceed budget {solution.budget}")
    seen: dict[int, int] = {}
    snrs: list[list[float]] = []
    for i, d in enumerate(solution.deployments):
        if d.grid_index not in centers:
            raise AuditError(f"deployment {i}: unknown grid index {d.grid_index}")
        if not np.allclose(d.pose.position, centers[d.grid_index], rtol=0.0, atol=1e-9):
            raise AuditError(f"deployment {i}: position does not match grid cell {d.grid_index}")
        if not d.assigned_users:
            raise AuditError(f"deployment {i}: no assigned users")
        row = []
        for uid in sorted(d.assigned_users):
            if uid not in users:
                raise AuditError(f"deployment {i}: unknown user {uid}")
            if uid in seen:
                raise AuditError(f"user {uid} assigned to deployments {seen[uid]} and {i}")
            seen[uid] = i
            if f_los(d.pose, users[uid], scenario.params) != 1:
                raise AuditError(f"deployment {i}, user {uid}: no guaranteed LoS")
            dist = float(np.linalg.norm(np.subtract(d.pose.position, users[uid].position)))
            row.append(link_snr(scenario.params, dist))
        snrs.append(row)
    # summaries last, so a bad assignment is reported as such
    for i, (d, row) in enumerate(zip(solution.deployments, snrs)):
        if abs(sum(row) / len(row) - d.avg_snr) > 1e-9:
            raise AuditError(f"deployment {i}: avg_snr {d.avg_snr} != recomputed {sum(row) / len(row)}")
    expected_uncovered = set(users) - set(seen)
    if set(solution.uncovered_users) != expected_uncovered:
        raise AuditError("uncovered set does not match the assignments")


def evaluate(solution: Solution, scenario: Scenario, grid=None):
    """Audit ``solution`` and return its :class:`~uavlos.experiments.Metrics`."""
    from .experiments import compute_metrics

    audit(solution, scenario, grid)
    return compute_metrics(solution, scenario)
