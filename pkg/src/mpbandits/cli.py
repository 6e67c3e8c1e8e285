"""Command-line entry point.

Subcommands: ``run`` (one experiment), ``scaling`` (horizon sweep plus a
log-log slope fit), ``verify`` (invariant suites; nonzero exit on any
violation), ``adversary`` (write a loss CSV).
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .adversaries import AdversarySpec
from .errors import ConfigurationError, InvariantViolation


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--print-schema", action="store_true",
                   help="print the config schema and exit")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--reps", type=int)
    p.add_argument("--model")
    p.add_argument("--adversary")
    p.add_argument("--means")
    p.add_argument("--loss-file")
    p.add_argument("--K", type=int)
    p.add_argument("--T", help="horizon, or comma list")
    p.add_argument("--m", type=int)
    p.add_argument("--shared")
    p.add_argument("--eta-scale", type=float, dest="eta_scale")
    p.add_argument("--diagnostics", action="store_true", default=None)


def _build_config(args) -> harness.ExperimentConfig:
    if args.config:
        with open(args.config) as f:
            cfg = harness.parse_config_text(f.read())
    else:
        cfg = harness.ExperimentConfig()
    for key in ("seed", "out", "reps", "model", "adversary", "K", "m",
                "shared", "eta_scale", "diagnostics"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "T", None):
        cfg.T = [int(x) for x in str(args.T).split(",")]
    if getattr(args, "means", None):
        cfg.means = [float(x) for x in args.means.split(",")]
    if getattr(args, "loss_file", None):
        cfg.loss_file = args.loss_file
    return cfg


def _emit(cfg, aggregates) -> None:
    csv_text = harness.results_csv(cfg, aggregates)
    if cfg.out:
        with open(cfg.out, "w") as f:
            f.write(csv_text)
    sys.stdout.write(csv_text)


def cmd_run(args) -> int:
    cfg = _build_config(args)
    aggregates = harness.run_experiment(cfg)
    _emit(cfg, aggregates)
    return 0


def cmd_scaling(args) -> int:
    cfg = _build_config(args)
    if len(cfg.T) < 3:
        raise ConfigurationError("scaling runs need at least 3 horizons (--T a,b,c)")
    aggregates = harness.run_experiment(cfg)
    _emit(cfg, aggregates)
    fit = harness.fit_slope([(a.T, a.mean_regret) for a in aggregates])
    sys.stdout.write(
        f"# slope fit: slope={fit.slope:.4f} intercept={fit.intercept:.4f} "
        f"r2={fit.r2:.4f}\n"
    )
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification

    cfg = _build_config(args)
    failures = run_verification(
        K=cfg.K, T=cfg.T[0], seed=cfg.seed, report=sys.stdout.write
    )
    return 1 if failures else 0


def cmd_adversary(args) -> int:
    if args.action != "gen":
        raise ConfigurationError("usage: adversary gen --adversary ... --out ...")
    cfg = _build_config(args)
    if not cfg.out:
        raise ConfigurationError("adversary gen needs --out")
    kind = "adaptive_prop1" if cfg.adversary == "adaptive" else cfg.adversary
    if kind == "adaptive_prop1":
        raise ConfigurationError("the adaptive adversary has no pre-computable table")
    spec = AdversarySpec(kind=kind, means=tuple(cfg.means), path=cfg.loss_file)
    seq = spec.table(cfg.K, cfg.T[0], cfg.seed)
    seq.to_csv(cfg.out)
    sys.stdout.write(f"wrote {cfg.out} (K={seq.K} T={seq.T})\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mpbandits",
        description="decentralized adversarial multi-armed bandit simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("scaling", cmd_scaling),
                     ("verify", cmd_verify)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
    p = sub.add_parser("adversary")
    p.add_argument("action", choices=["gen"])
    _add_common(p)
    p.set_defaults(fn=cmd_adversary)

    args = parser.parse_args(argv)
    if getattr(args, "print_schema", False):
        sys.stdout.write(harness.schema_text())
        return 0
    try:
        return args.fn(args)
    except (ConfigurationError, InvariantViolation) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
