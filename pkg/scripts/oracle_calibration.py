"""Compare greedy against the exhaustive oracle on random tiny instances.

    python scripts/oracle_calibration.py --instances 50
"""

import argparse
import time

from uavlos.experiments import tiny_instance
from uavlos.solver import audit, greedy_solve, oracle_solve

ap = argparse.ArgumentParser()
ap.add_argument("--instances", type=int, default=50)
ap.add_argument("--first-seed", type=int, default=0)
args = ap.parse_args()

matched = 0
t0 = time.perf_counter()
for seed in range(args.first_seed, args.first_seed + args.instances):
    scenario, grid, budget, n = tiny_instance(seed)
    g = greedy_solve(scenario, grid, budget, n)
    o = oracle_solve(scenario, grid, budget, n)
    audit(g, scenario, grid)
    audit(o, scenario, grid)
    gc, oc = len(g.covered_users), len(o.covered_users)
    matched += gc == oc
    flag = "" if gc == oc else "  <-- gap"
    print(f"seed {seed:3d}: users {len(scenario.users)} budget {budget} samples {n} "
          f"greedy {gc} oracle {oc} obj {g.objective:7.2f} / {o.objective:7.2f}{flag}")
print(f"matched {matched}/{args.instances} in {time.perf_counter() - t0:.1f} s")
