"""Acceptance criteria, one recorded pass/fail line each.

The lines are printed in the "acceptance criteria" section of the pytest
terminal summary. The full sweep behind criteria 4 to 6 takes a few minutes.
"""

import math
import time

import numpy as np
import pytest

from uavlos.channel import RadioParams, max_range
from uavlos.coverage import UavPose, User, f_los, in_lov_region, uav_covers, user_sees
from uavlos.experiments import AOV_INTERVALS, SweepConfig, run_sweep, tiny_instance
from uavlos.geometry import angle_between, orientation_circle
from uavlos.scenario import generate_grid
from uavlos.solver import audit, greedy_solve, oracle_solve

from .conftest import ACCEPTANCE_LINES

N_CHECKS = 10_000
ORACLE_INSTANCES = 50
ORACLE_MATCH_MIN = 40  # calibrated: 48/50 observed before freezing
SEEDS = tuple(range(10))

# Solves from criteria 3 and 4, re-checked under criterion 5.
SOLVES: list[tuple] = []


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_c1_max_range():
    d = max_range(RadioParams())
    record("1 link budget", abs(d - 79.4) <= 1.0, f"max_range = {d:.3f} m (target 79.4 +- 1.0)")


def test_c2_geometry_properties():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    failures = {"circle": 0, "boresight": 0, "conjunction": 0}

    # (a) every point on the orientation circle sits at phi/2 from the anchor line
    cks = rng.uniform(-500, 500, size=(N_CHECKS, 3))
    ujs = cks + random_unit(rng, N_CHECKS) * rng.uniform(1.0, 200.0, size=(N_CHECKS, 1))
    phis = rng.uniform(1.0, 179.0, N_CHECKS)
    omegas = rng.uniform(0.0, 360.0, N_CHECKS)
    for ck, uj, phi, w in zip(cks, ujs, phis, omegas):
        p = orientation_circle(ck, uj, phi).point(w)
        if abs(angle_between(p - ck, uj - ck) - math.radians(phi) / 2) > 1e-6:
            failures["circle"] += 1

    # (b) a grid point in the user's line-of-view region is served by boresight
    hits = draws = 0
    while hits < N_CHECKS:
        draws += 1
        user = User(0, tuple(rng.uniform(-100, 100, 3)), tuple(random_unit(rng, 1)[0]),
                    float(rng.uniform(1.0, 180.0)))
        c = np.add(user.position, random_unit(rng, 1)[0] * rng.uniform(0.01, 100.0))
        params = RadioParams(hpbw=float(rng.uniform(1.0, 179.0)))
        if not in_lov_region(c, user, params):
            continue
        hits += 1
        axis = np.subtract(user.position, c)
        if f_los(UavPose(tuple(c), tuple(axis / np.linalg.norm(axis))), user, params) != 1:
            failures["boresight"] += 1

    # (c) f_los is exactly the conjunction of its two sub-predicates
    for _ in range(N_CHECKS):
        user = User(0, tuple(rng.uniform(-100, 100, 3)), tuple(random_unit(rng, 1)[0]),
                    float(rng.uniform(1.0, 180.0)))
        pose = UavPose(tuple(rng.uniform(-100, 100, 3)), tuple(random_unit(rng, 1)[0]))
        params = RadioParams(hpbw=float(rng.uniform(1.0, 179.0)))
        expected = int(uav_covers(pose, user, params) and user_sees(user, pose, params))
        if f_los(pose, user, params) != expected:
            failures["conjunction"] += 1

    elapsed = time.perf_counter() - t0
    ok = sum(failures.values()) == 0 and elapsed < 10.0
    record("2 geometry properties", ok,
           f"3 x {N_CHECKS} checks, failures {failures}, {hits}/{draws} draws in LoV region, {elapsed:.1f} s")


def test_c3_oracle_equivalence():
    t0 = time.perf_counter()
    matches, problems = 0, []
    for seed in range(ORACLE_INSTANCES):
        scenario, grid, budget, n = tiny_instance(seed)
        assert len(scenario.users) <= 8 and len(grid) <= 27 and budget <= 3 and n <= 8
        greedy = greedy_solve(scenario, grid, budget, n)
        oracle = oracle_solve(scenario, grid, budget, n)
        SOLVES.append(("tiny", seed, "greedy", scenario, grid, greedy, n))
        SOLVES.append(("tiny", seed, "oracle", scenario, grid, oracle, n))
        try:
            audit(greedy, scenario, grid)
        except Exception as exc:  # recorded, not raised, so the line still prints
            problems.append(f"seed {seed}: {exc}")
        g, o = len(greedy.covered_users), len(oracle.covered_users)
        if g > o:
            problems.append(f"seed {seed}: greedy covers {g} > oracle {o}")
        matches += g == o
    elapsed = time.perf_counter() - t0
    ok = not problems and matches >= ORACLE_MATCH_MIN and elapsed < 300
    record("3 oracle equivalence", ok,
           f"greedy matches oracle on {matches}/{ORACLE_INSTANCES} (need {ORACLE_MATCH_MIN}), "
           f"{len(problems)} feasibility/dominance problems, {elapsed:.1f} s")


@pytest.fixture(scope="module")
def sweep():
    config = SweepConfig()
    t0 = time.perf_counter()
    result = run_sweep(config, AOV_INTERVALS, SEEDS, keep_solutions=True)
    elapsed = time.perf_counter() - t0
    for (iv, algo, seed), sol in result.solutions.items():
        SOLVES.append(("full", (iv, seed), algo, config.scenario(iv, seed), None, sol,
                       config.n_omega_samples if algo == "greedy" else 1))
    return config, result, elapsed


@pytest.mark.slow
def test_c4a_greedy_beats_baseline(sweep):
    _, res, elapsed = sweep
    g = [res.mean(iv, "greedy", "pct_covered") for iv in AOV_INTERVALS]
    b = [res.mean(iv, "baseline", "pct_covered") for iv in AOV_INTERVALS]
    ok = all(x >= y for x, y in zip(g, b)) and g[0] > b[0]
    pairs = ", ".join(f"{x:.1f}/{y:.1f}" for x, y in zip(g, b))
    record("4a coverage vs baseline", ok, f"greedy/baseline mean % per interval: {pairs}")


@pytest.mark.slow
def test_c4b_greedy_trend(sweep):
    _, res, _ = sweep
    g = [res.mean(iv, "greedy", "pct_covered") for iv in AOV_INTERVALS]
    worst = min(b - a for a, b in zip(g, g[1:]))
    record("4b coverage trend", worst >= -2.0, f"smallest step {worst:+.2f} points (tolerance -2)")


@pytest.mark.slow
def test_c4c_full_view(sweep):
    _, res, _ = sweep
    pcts = [r.metrics.pct_covered for r in res.rows
            if r.aov_interval == (180.0, 180.0) and r.algorithm == "greedy"]
    record("4c full view", len(pcts) == len(SEEDS) and min(pcts) >= 95.0,
           f"min greedy coverage at [180,180] over {len(pcts)} seeds = {min(pcts):.1f}%")


@pytest.mark.slow
def test_c4d_uav_efficiency(sweep):
    _, res, _ = sweep
    wide = AOV_INTERVALS[-3:]
    g = [res.mean(iv, "greedy", "uavs_per_covered") for iv in wide]
    b = [res.mean(iv, "baseline", "uavs_per_covered") for iv in wide]
    pairs = ", ".join(f"{x:.3f}/{y:.3f}" for x, y in zip(g, b))
    record("4d UAVs per covered user", all(x <= y for x, y in zip(g, b)),
           f"greedy/baseline on widest intervals: {pairs}")


@pytest.mark.slow
def test_c4e_snr(sweep):
    _, res, elapsed = sweep
    g = [res.mean(iv, "greedy", "avg_snr_db") for iv in AOV_INTERVALS]
    b = [res.mean(iv, "baseline", "avg_snr_db") for iv in AOV_INTERVALS]
    pairs = ", ".join(f"{x:.2f}/{y:.2f}" for x, y in zip(g, b))
    record("4e average SNR", all(x >= y for x, y in zip(g, b)) and elapsed < 1800,
           f"greedy/baseline dB: {pairs}; sweep took {elapsed:.0f} s")


@pytest.mark.slow
def test_c5_invariants(sweep):
    # depends on the sweep fixture so the full-scale solves are registered
    problems = []
    kinds = {"tiny": 0, "full": 0}
    for kind, key, algo, scenario, grid, sol, n in SOLVES:
        kinds[kind] += 1
        grid = generate_grid(scenario.region) if grid is None else grid
        try:
            audit(sol, scenario, grid)
        except Exception as exc:
            problems.append(f"{kind} {key} {algo}: {exc}")
        if len(sol.deployments) > sol.budget:
            problems.append(f"{kind} {key} {algo}: over budget")
        if algo != "oracle":
            bound = (n + 1) * len(scenario.users) ** 2 * len(grid)
            if sol.stats.flos_evals > bound:
                problems.append(f"{kind} {key} {algo}: {sol.stats.flos_evals} f_los evals > {bound}")
    ok = not problems and kinds["tiny"] > 0 and kinds["full"] > 0
    record("5 invariants", ok,
           f"{kinds['tiny']} desk-scale and {kinds['full']} full-scale solves audited, "
           f"{len(problems)} problems" + (f" (first: {problems[0]})" if problems else ""))


@pytest.mark.slow
def test_c6_determinism(sweep):
    config, res, _ = sweep
    iv, seed = (15.0, 45.0), 3
    again = run_sweep(config, [iv], [seed], keep_solutions=True)
    same_json = all(
        again.solutions[(iv, algo, seed)].to_json() == res.solutions[(iv, algo, seed)].to_json()
        for algo in ("greedy", "baseline")
    )
    strip = lambda row: {k: v for k, v in row.as_csv_dict().items() if k != "runtime_ms"}
    before = [strip(r) for r in res.rows if r.aov_interval == iv and r.seed == seed]
    after = [strip(r) for r in again.rows]
    record("6 determinism", same_json and before == after,
           f"cell {list(iv)} seed {seed}: solution JSON identical = {same_json}, "
           f"CSV rows identical = {before == after}")
