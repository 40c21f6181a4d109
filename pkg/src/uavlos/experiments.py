"""Coverage metrics and AoV-interval sweeps with CSV output."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import RadioParams
from .coverage import link_snr
from .scenario import Region, Scenario, generate_grid, generate_users
from .solver import DEFAULT_OMEGA_SAMPLES, Solution, baseline_solve, evaluate, greedy_solve

AOV_INTERVALS: tuple[tuple[float, float], ...] = (
    (15.0, 45.0),
    (30.0, 90.0),
    (60.0, 120.0),
    (90.0, 150.0),
    (120.0, 180.0),
    (180.0, 180.0),
)
ALGORITHMS = ("greedy", "baseline")

CSV_COLUMNS = (
    "aov_lo_deg",
    "aov_hi_deg",
    "algorithm",
    "seed",
    "pct_covered",
    "n_uavs",
    "n_covered",
    "uavs_per_covered",
    "avg_snr_db",
    "flos_evals",
    "runtime_ms",
)
# Columns that vary between otherwise identical runs.
NONDETERMINISTIC_COLUMNS = ("runtime_ms",)


@dataclass(frozen=True)
class Metrics:
    """Per-solution summary.

    ``avg_snr_db`` averages over all users with uncovered users counted as
    0 dB; ``uavs_per_covered`` is 0 when no user is covered.
    """

    pct_covered: float
    uavs_per_covered: float
    avg_snr_db: float
    n_uavs: int
    n_covered: int
    n_users: int


def compute_metrics(solution: Solution, scenario: Scenario) -> Metrics:
    users = scenario.user_by_id()
    snrs = []
    for d in solution.deployments:
        for uid in d.assigned_users:
            dist = float(np.linalg.norm(np.subtract(d.pose.position, users[uid].position)))
            snrs.append(link_snr(scenario.params, dist))
    n_users = len(users)
    n_covered = len(snrs)
    n_uavs = len(solution.deployments)
    return Metrics(
        pct_covered=100.0 * n_covered / n_users if n_users else 0.0,
        uavs_per_covered=n_uavs / n_covered if n_covered else 0.0,
        # fsum keeps the result independent of deployment order
        avg_snr_db=math.fsum(snrs) / n_users if n_users else 0.0,
        n_uavs=n_uavs,
        n_covered=n_covered,
        n_users=n_users,
    )


@dataclass(frozen=True)
class SweepConfig:
    region: Region = field(default_factory=Region)
    params: RadioParams = field(default_factory=RadioParams)
    n_users: int = 100
    cluster_size_range: tuple[int, int] = (10, 15)
    cluster_radius: float = 50.0
    lov_mode: str = "sphere"
    uav_budget: int | None = None
    n_omega_samples: int = DEFAULT_OMEGA_SAMPLES

    def scenario(self, aov_interval, seed: int) -> Scenario:
        users = generate_users(
            self.region,
            self.n_users,
            self.cluster_size_range,
            aov_interval,
            seed,
            self.cluster_radius,
            self.lov_mode,
        )
        return Scenario(self.region, tuple(users), self.params, seed, tuple(aov_interval))


@dataclass(frozen=True)
class SweepRow:
    aov_interval: tuple[float, float]
    algorithm: str
    seed: int
    metrics: Metrics
    flos_evals: int
    runtime_ms: float

    def as_csv_dict(self) -> dict[str, object]:
        m = self.metrics
        return {
            "aov_lo_deg": repr(self.aov_interval[0]),
            "aov_hi_deg": repr(self.aov_interval[1]),
            "algorithm": self.algorithm,
            "seed": self.seed,
            "pct_covered": repr(m.pct_covered),
            "n_uavs": m.n_uavs,
            "n_covered": m.n_covered,
            "uavs_per_covered": repr(m.uavs_per_covered),
            "avg_snr_db": repr(m.avg_snr_db),
            "flos_evals": self.flos_evals,
            "runtime_ms": f"{self.runtime_ms:.1f}",
        }


@dataclass
class SweepResult:
    rows: list[SweepRow]
    solutions: dict[tuple, Solution] = field(default_factory=dict)

    def mean(self, interval, algorithm: str, attr: str) -> float:
        vals = [
            getattr(r.metrics, attr)
            for r in self.rows
            if r.aov_interval == tuple(interval) and r.algorithm == algorithm
        ]
        return float(np.mean(vals))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_csv_dict())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def digest(self) -> str:
        """SHA-256 of the CSV with nondeterministic columns removed."""
        keep = [c for c in CSV_COLUMNS if c not in NONDETERMINISTIC_COLUMNS]
        h = hashlib.sha256()
        for row in self.rows:
            d = row.as_csv_dict()
            h.update((",".join(str(d[c]) for c in keep) + "\n").encode())
        return h.hexdigest()


def solve(algorithm: str, scenario: Scenario, grid=None, uav_budget=None,
          n_omega_samples: int = DEFAULT_OMEGA_SAMPLES) -> Solution:
    if algorithm == "greedy":
        return greedy_solve(scenario, grid, uav_budget, n_omega_samples)
    if algorithm == "baseline":
        return baseline_solve(scenario, grid, uav_budget)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _run_cell(args):
    config, interval, seed, algorithms = args
    scenario = config.scenario(interval, seed)
    grid = generate_grid(config.region)
    out = []
    for algo in algorithms:
        t0 = time.perf_counter()
        sol = solve(algo, scenario, grid, config.uav_budget, config.n_omega_samples)
        runtime_ms = 1000.0 * (time.perf_counter() - t0)
        metrics = evaluate(sol, scenario, grid)
        row = SweepRow(tuple(interval), algo, seed, metrics, sol.stats.flos_evals, runtime_ms)
        out.append((row, sol))
    return out


def run_sweep(
    config: SweepConfig,
    intervals: Iterable[tuple[float, float]] = AOV_INTERVALS,
    seeds: Sequence[int] = tuple(range(10)),
    algorithms: Sequence[str] = ALGORITHMS,
    jobs: int = 1,
    keep_solutions: bool = False,
) -> SweepResult:
    """Solve every (interval, seed) scenario with each algorithm.

    Each algorithm sees the identical scenario. Every solution is audited.
    Rows come out ordered by interval, then seed, then algorithm, whatever
    ``jobs`` is.
    """
    intervals = [tuple(float(a) for a in iv) for iv in intervals]
    if not intervals:
        raise ValueError("need at least one interval")
    if not seeds:
        raise ValueError("need at least one seed")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}")
    tasks = [(config, iv, int(s), tuple(algorithms)) for iv in intervals for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    result = SweepResult([])
    for cell in results:
        for row, sol in cell:
            result.rows.append(row)
            if keep_solutions:
                result.solutions[(row.aov_interval, row.algorithm, row.seed)] = sol
    return result


TINY_REGION = Region(60.0, 60.0, 60.0, grid_size=20.0, boundary_margin=0.0)


def tiny_instance(seed: int):
    """Random desk-scale instance for oracle comparisons.

    Up to 8 users in a 60 m cube (27 grid cells), budget 1-3 and 1-8
    orientation samples. Returns ``(scenario, grid, budget, n_samples)``.
    """
    rng = np.random.Generator(np.random.PCG64([seed, 0xACE]))
    n_users = int(rng.integers(2, 9))
    lo = float(rng.uniform(10.0, 120.0))
    hi = float(min(180.0, lo + rng.uniform(0.0, 60.0)))
    budget = int(rng.integers(1, 4))
    n_samples = int(rng.integers(1, 9))
    hpbw = float(rng.uniform(20.0, 90.0))
    users = generate_users(TINY_REGION, n_users, (n_users, n_users), (lo, hi), seed, 30.0)
    scenario = Scenario(TINY_REGION, tuple(users), RadioParams(hpbw=hpbw), seed, (lo, hi))
    return scenario, generate_grid(TINY_REGION), budget, n_samples
