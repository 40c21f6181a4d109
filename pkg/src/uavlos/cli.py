"""Command line entry point: ``uavlos {generate,solve,sweep,verify}``.

Exit status is 0 on success, 1 when input validation or the solution
audit fails, and 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .channel import RadioParams
from .experiments import ALGORITHMS, AOV_INTERVALS, SweepConfig, compute_metrics, run_sweep, solve
from .scenario import LOV_MODES, Region, Scenario, ScenarioError, generate_users, load_scenario, save_scenario
from .solver import (
    DEFAULT_OMEGA_SAMPLES,
    AuditError,
    audit,
    load_solution,
    oracle_solve,
    save_solution,
)

log = logging.getLogger("uavlos")


def _interval(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(",")
    try:
        return float(lo), float(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI degrees, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavlos", description="Place and orient mmWave UAV base stations for guaranteed line-of-sight coverage.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random clustered scenario as JSON")
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--users", type=int, default=100)
    g.add_argument("--aov", type=_interval, default=(180.0, 180.0), metavar="LO,HI")
    g.add_argument("--cluster-size", type=int, nargs=2, default=(10, 15), metavar=("MIN", "MAX"))
    g.add_argument("--cluster-radius", type=float, default=50.0)
    g.add_argument("--lov-mode", choices=LOV_MODES, default="sphere")
    g.add_argument("--region", type=float, nargs=3, default=(1000.0, 1000.0, 100.0),
                   metavar=("LENGTH", "BREADTH", "ALTITUDE"))
    g.add_argument("--grid-size", type=float, default=20.0)
    g.add_argument("--margin", type=float, default=50.0)

    s = sub.add_parser("solve", help="place and orient UAVs for a scenario")
    s.add_argument("scenario")
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--algo", choices=("greedy", "baseline", "oracle"), default="greedy")
    s.add_argument("--budget", type=int, default=None, help="UAV budget (default: one per cell)")
    s.add_argument("--omega-samples", type=int, default=None,
                   help=f"orientation samples per anchor (default {DEFAULT_OMEGA_SAMPLES}, oracle 8)")

    w = sub.add_parser("sweep", help="run the AoV-interval sweep and write CSV")
    w.add_argument("-o", "--out", required=True)
    w.add_argument("--seeds", type=int, default=10, help="use seeds 0..N-1")
    w.add_argument("--first-seed", type=int, default=0)
    w.add_argument("--interval", type=_interval, action="append", metavar="LO,HI",
                   help="repeatable; default is the six standard intervals")
    w.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    w.add_argument("--scenario", help="take region and radio settings from this scenario file")
    w.add_argument("--users", type=int, default=100)
    w.add_argument("--cluster-radius", type=float, default=50.0)
    w.add_argument("--lov-mode", choices=LOV_MODES, default="sphere")
    w.add_argument("--budget", type=int, default=None)
    w.add_argument("--omega-samples", type=int, default=DEFAULT_OMEGA_SAMPLES)
    w.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("verify", help="audit a solution against its scenario")
    v.add_argument("scenario")
    v.add_argument("solution")
    return p


def _generate(args) -> int:
    region = Region(*args.region, grid_size=args.grid_size, boundary_margin=args.margin)
    users = generate_users(region, args.users, tuple(args.cluster_size), args.aov, args.seed,
                           args.cluster_radius, args.lov_mode)
    save_scenario(Scenario(region, tuple(users), RadioParams(), args.seed, args.aov), args.out)
    log.info("wrote %d users to %s", len(users), args.out)
    return 0


def _solve(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.algo == "oracle":
        samples = 8 if args.omega_samples is None else args.omega_samples
        sol = oracle_solve(scenario, None, args.budget or 1, samples)
    else:
        samples = DEFAULT_OMEGA_SAMPLES if args.omega_samples is None else args.omega_samples
        sol = solve(args.algo, scenario, None, args.budget, samples)
    audit(sol, scenario)
    save_solution(sol, args.out)
    m = compute_metrics(sol, scenario)
    print(f"{args.algo}: {m.n_covered}/{m.n_users} users covered by {m.n_uavs} UAVs, "
          f"avg SNR {m.avg_snr_db:.2f} dB")
    return 0


def _sweep(args) -> int:
    base = {}
    if args.scenario:
        sc = load_scenario(args.scenario)
        base = {"region": sc.region, "params": sc.params}
    config = SweepConfig(n_users=args.users, cluster_radius=args.cluster_radius,
                         lov_mode=args.lov_mode, uav_budget=args.budget,
                         n_omega_samples=args.omega_samples, **base)
    seeds = range(args.first_seed, args.first_seed + args.seeds)
    result = run_sweep(config, args.interval or AOV_INTERVALS, seeds, args.algorithms, args.jobs)
    result.write_csv(args.out)
    print(f"wrote {len(result.rows)} rows to {args.out} (digest {result.digest()[:12]})")
    return 0


def _verify(args) -> int:
    scenario = load_scenario(args.scenario)
    sol = load_solution(args.solution)
    audit(sol, scenario)
    m = compute_metrics(sol, scenario)
    print(f"ok: {len(sol.deployments)} deployments, {m.n_covered} users covered")
    return 0


COMMANDS = {"generate": _generate, "solve": _solve, "sweep": _sweep, "verify": _verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except AuditError as exc:
        print(f"audit failed: {exc}", file=sys.stderr)
        return 1
    except (ScenarioError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
