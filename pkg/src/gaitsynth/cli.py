"""Command-line interface.

Subcommands: optimize (seeded optimizer runs), compare (HS vs GA on shared
seeds), trace (per-tick trajectory export for one genome), bench
(benchmark-function battery) and oscillate (raw oscillator run to CSV).
Exit status: 0 on success, 2 on validation errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from gaitsynth.experiments import (
    OPTIMIZERS,
    ConfigError,
    load_config,
    run_bench,
    run_compare,
    run_from_manifest,
    run_optimize,
    run_trace,
)
from gaitsynth.oscillator import (
    CANONICAL_PARAMS,
    OscillatorParams,
    ParameterError,
    analyze,
    series_to_csv,
    simulate,
)
from gaitsynth.optimize import BoundsError

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitsynth",
        description="Biped gait synthesis with a Matsuoka-oscillator CPG and "
                    "Harmony Search optimization.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the configured optimizer per seed")
    p.add_argument("--config", help="experiment config JSON (defaults used if omitted)")
    p.add_argument("--manifest", help="re-run a recorded manifest instead of a config")
    p.add_argument("--optimizer", choices=OPTIMIZERS, help="override the optimizer")
    p.add_argument("--seed", type=int, action="append",
                   help="override seeds (repeatable)")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("compare", help="HS vs GA on identical seeds")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--seed", type=int, action="append", help="override seeds")
    p.add_argument("--out", help="output directory")
    p.add_argument("--allow-unequal-budget", action="store_true",
                   help="permit different HS and GA evaluation budgets")

    p = sub.add_parser("trace", help="export one genome's walking trajectory")
    p.add_argument("--genome", required=True, help="best-genome JSON file")
    p.add_argument("--config", help="experiment config JSON (for the sim block)")
    p.add_argument("--out", default="trace_out", help="output directory")
    p.add_argument("--duration", type=float, help="episode length in seconds")
    p.add_argument("--noise-std", type=float, help="commanded-angle noise in degrees")
    p.add_argument("--seed", type=int, help="noise seed")

    p = sub.add_parser("bench", help="optimizer battery on benchmark functions")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--function", default="sphere",
                   help="sphere, rosenbrock or rastrigin")
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--budget", type=int, default=5010,
                   help="objective evaluations per seed")
    p.add_argument("--optimizer", choices=OPTIMIZERS, help="override the optimizer")
    p.add_argument("--seeds", type=int, default=20,
                   help="number of seeds (1..n)")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("oscillate", help="raw oscillator run to CSV")
    p.add_argument("--tau1", type=float, default=CANONICAL_PARAMS.tau1)
    p.add_argument("--tau2", type=float, default=CANONICAL_PARAMS.tau2)
    p.add_argument("--beta", type=float, default=CANONICAL_PARAMS.beta)
    p.add_argument("--gamma", type=float, default=CANONICAL_PARAMS.gamma)
    p.add_argument("--alpha", type=float, default=CANONICAL_PARAMS.alpha)
    p.add_argument("--c", type=float, default=CANONICAL_PARAMS.c)
    p.add_argument("--duration", type=float, default=15.0)
    p.add_argument("--dt", type=float, default=0.02)
    p.add_argument("--out", default="oscillator.csv", help="output CSV path")
    return parser


def _experiment_config(args):
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "optimizer", None):
        cfg = dataclasses.replace(cfg, optimizer=args.optimizer)
    if getattr(args, "seed", None):
        cfg = dataclasses.replace(cfg, seeds=tuple(args.seed))
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    if getattr(args, "allow_unequal_budget", False):
        cfg = dataclasses.replace(cfg, allow_unequal_budget=True)
    return cfg


def _cmd_optimize(args) -> int:
    if args.manifest:
        summary = run_from_manifest(args.manifest, args.out or "rerun")
    else:
        summary = run_optimize(_experiment_config(args))
    for seed, best, n in zip(summary["seeds"], summary["best_fitness"],
                             summary["n_evals"]):
        print(f"seed {seed}: best fitness {best:.6f} ({n} evaluations)")
    return 0


def _cmd_compare(args) -> int:
    report = run_compare(_experiment_config(args))
    for row in report["rows"]:
        print(f"seed {row['seed']}: HS {row['hs_best']:.6f}  GA {row['ga_best']:.6f}")
    print(f"medians: HS {report['hs_median']:.6f}  GA {report['ga_median']:.6f}  "
          f"(HS wins {report['hs_wins']}/{len(report['rows'])})")
    return 0


def _cmd_trace(args) -> int:
    cfg = load_config(args.config)
    sim = cfg.sim
    overrides = {}
    if args.duration is not None:
        overrides["duration"] = args.duration
    if args.noise_std is not None:
        overrides["noise_std"] = args.noise_std
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        sim = dataclasses.replace(sim, **overrides)
    summary = run_trace(args.genome, sim, args.out)
    print(f"x = {summary['x']:.4f} m, y = {summary['y']:.4f} m, "
          f"fitness = {summary['fitness']:.4f}, fell = {summary['fell']}"
          + (f" at t = {summary['fall_time']:.2f} s" if summary["fell"] else "")
          + f", steps = {summary['n_exchanges']}")
    return 0


def _cmd_bench(args) -> int:
    cfg = _experiment_config(args)
    if not getattr(args, "seed", None):
        cfg = dataclasses.replace(cfg, seeds=tuple(range(1, args.seeds + 1)))
    if args.out:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    elif not args.config:
        cfg = dataclasses.replace(cfg, out_dir="bench_out")
    report = run_bench(cfg, args.function, args.dim, args.budget)
    print(f"{args.function} d={args.dim} budget={args.budget} "
          f"{cfg.optimizer}: median best {report['median_best']:.6f} "
          f"over {len(report['rows'])} seeds")
    return 0


def _cmd_oscillate(args) -> int:
    params = OscillatorParams(tau1=args.tau1, tau2=args.tau2, beta=args.beta,
                              gamma=args.gamma, alpha=args.alpha, c=args.c)
    series = simulate(params, duration=args.duration, dt=args.dt)
    series_to_csv(args.out, series, args.dt)
    report = analyze(series, args.dt)
    if report.sustained:
        print(f"sustained oscillation: period {report.period:.3f} s, "
              f"amplitude {report.amplitude:.3f}, "
              f"phase difference {report.phase_difference:.3f}")
    else:
        print("no sustained oscillation detected")
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
    "trace": _cmd_trace,
    "bench": _cmd_bench,
    "oscillate": _cmd_oscillate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParameterError, BoundsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.exception("run failed")
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
