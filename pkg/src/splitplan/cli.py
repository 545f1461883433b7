"""``splitplan`` command line.

Exit codes: 0 success, 2 input error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

from .errors import InputError, InternalError
from .planner import load_plan, save_plan, solve_lscra
from .profile import load_profile, resnet18_profile
from .scenario import GHZ, load_scenario
from .simulator import simulate_round, simulate_training
from .sweeps import sweep_capacity, sweep_clients, write_sweep_csv

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3
AGREEMENT_RTOL = 1e-9


@contextmanager
def _output(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _profile_arg(args):
    return load_profile(args.profile) if args.profile else None


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario, _profile_arg(args))
    plan = solve_lscra(scenario)
    if args.out:
        save_plan(plan, args.out)
    else:
        json.dump(plan.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    a, b = plan.best_cuts.as_tuple()
    print(f"best cuts ({a},{b})  round latency {plan.round_latency:.6g} s  "
          f"clients {scenario.n_clients}  candidates {len(plan.search_table)}",
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _sweep_profile(args):
    return load_profile(args.profile) if args.profile else resnet18_profile()


def cmd_sweep_capacity(args) -> int:
    rows = sweep_capacity(_sweep_profile(args), n_clients=args.n, fs_min=args.fs_min,
                          fs_max=args.fs_max, steps=args.steps, seed=args.seed,
                          trials=args.trials)
    with _output(args.out) as fh:
        write_sweep_csv(rows, fh, "fs_hz")
    return EXIT_OK


def cmd_sweep_clients(args) -> int:
    rows = sweep_clients(_sweep_profile(args), n_min=args.n_min, n_max=args.n_max,
                         steps=args.steps, fs_hz=args.fs, seed=args.seed, trials=args.trials)
    with _output(args.out) as fh:
        write_sweep_csv(rows, fh, "n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario, _profile_arg(args))
    plan = load_plan(args.plan, scenario) if args.plan else solve_lscra(scenario)
    trace = simulate_round(scenario, plan.best_cuts, plan.allocation)
    analytic = plan.allocation.round_latency
    delta = abs(trace.round_makespan - analytic)
    rel = delta / analytic if analytic > 0 else delta
    with _output(args.out) as fh:
        trace.write_csv(fh)
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    makespans = simulate_training(scenario, plan, args.rounds)
    print(f"cuts {plan.best_cuts}  analytic {analytic!r} s  simulated {trace.round_makespan!r} s  "
          f"delta {delta:.3e} s (rel {rel:.3e})", file=stream)
    print("round makespans: " + " ".join(repr(m) for m in makespans), file=stream)
    print(f"cumulative time {sum(makespans)!r} s over {args.rounds} rounds", file=stream)
    if rel > AGREEMENT_RTOL:
        raise InternalError(f"simulated makespan differs from analytic latency by {rel:.3e}")
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitplan", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="optimal cuts and server allocation for one scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--profile", help="profile JSON overriding the scenario's profile")
    s.add_argument("--out", help="plan JSON path (default: stdout)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep-capacity", help="latency versus server capacity (CSV)")
    s.add_argument("--n", type=_positive_int, default=100, help="number of clients")
    s.add_argument("--fs-min", type=float, default=10 * GHZ)
    s.add_argument("--fs-max", type=float, default=50 * GHZ)
    s.add_argument("--steps", type=_positive_int, default=9)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=_positive_int, default=1, help="seeds averaged per point")
    s.add_argument("--profile", help="profile JSON (default: bundled ResNet-18)")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_sweep_capacity)

    s = sub.add_parser("sweep-clients", help="latency versus number of clients (CSV)")
    s.add_argument("--n-min", type=_positive_int, default=10)
    s.add_argument("--n-max", type=_positive_int, default=100)
    s.add_argument("--steps", type=_positive_int, default=10)
    s.add_argument("--fs", type=float, default=50 * GHZ, help="server capacity in Hz")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=_positive_int, default=1)
    s.add_argument("--profile")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep_clients)

    s = sub.add_parser("simulate", help="event-level simulation of a planned round")
    s.add_argument("--scenario", required=True)
    s.add_argument("--profile")
    s.add_argument("--plan", help="plan JSON from `solve` (default: solve now)")
    s.add_argument("--rounds", type=_positive_int, default=1)
    s.add_argument("--out", help="trace CSV path (default: stdout)")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"splitplan: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"splitplan: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
