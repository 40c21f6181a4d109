"""Full AoV sweep on the default scenario: CSV plus a per-interval summary.

    python scripts/run_full_sweep.py -o sweep.csv --seeds 10 --jobs 4
"""

import argparse
import time

from uavlos.experiments import ALGORITHMS, AOV_INTERVALS, SweepConfig, run_sweep

ap = argparse.ArgumentParser()
ap.add_argument("-o", "--output", default="sweep.csv")
ap.add_argument("--seeds", type=int, default=10)
ap.add_argument("--jobs", type=int, default=1)
ap.add_argument("--omega-samples", type=int, default=72)
args = ap.parse_args()

config = SweepConfig(n_omega_samples=args.omega_samples)
t0 = time.perf_counter()
result = run_sweep(config, AOV_INTERVALS, range(args.seeds), jobs=args.jobs)
result.write_csv(args.output)

cols = (("pct_covered", "% covered", "{:9.1f}"), ("uavs_per_covered", "UAV/user", "{:9.3f}"),
        ("avg_snr_db", "SNR dB", "{:9.2f}"))
head = f"{'AoV interval':>14} " + " ".join(f"{a} {label}".rjust(18) for _, label, _ in cols for a in ALGORITHMS)
print(head)
for iv in AOV_INTERVALS:
    cells = [fmt.format(result.mean(iv, a, attr)).rjust(18) for attr, _, fmt in cols for a in ALGORITHMS]
    print(f"{str(list(iv)):>14} " + " ".join(cells))
print(f"{len(result.rows)} rows -> {args.output} in {time.perf_counter() - t0:.0f} s, digest {result.digest()[:16]}")
