"""Command line entry point: ``distbh run | oracle | bench``."""

import argparse
import os
import sys
import time

import numpy as np

from . import golden
from .datagen import AlternativeModel, SeedPolicy, gen_mixture_batch
from .estimators import StoreyConfig
from .harness import ConfigError, default_config, emit_csv, run_experiment
from .protocol import NodeState, StarTransport, run_round

SEED_ENV = "DISTBH_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(s):
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {s!r}") from exc


def build_parser():
    p = _Parser(prog="distbh", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one experiment and write CSV")
    r.add_argument("--experiment", type=int, choices=range(1, 6))
    r.add_argument("--config", help="flat key=value file with ExperimentConfig fields")
    r.add_argument("--alpha", type=float)
    r.add_argument("--nodes", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--estimator", choices=("storey", "spacing"))
    r.add_argument("--lambda", dest="lam", type=float)
    r.add_argument("--l", dest="l", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--n-grid", type=_floats)
    r.add_argument("--mu-grid", type=_floats)
    r.add_argument("--rho-grid", type=_floats)
    r.add_argument("--covariance", choices=("independent", "ar1", "block"))
    r.add_argument("--random-r1", action="store_true", default=None)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", default="results.csv")

    o = sub.add_parser("oracle", help="regenerate golden tau*/F fixtures")
    o.add_argument("--fixture", required=True)

    b = sub.add_parser("bench", help="time one protocol round")
    b.add_argument("--m", type=int, default=1_000_000, help="total p-values")
    b.add_argument("--nodes", type=int, default=50)
    b.add_argument("--seed", type=int, default=0)
    return p


_CONFIG_TYPES = {"experiment": int, "alpha": float, "nodes": int, "trials": int, "estimator": str,
                 "lam": float, "lambda": float, "l": float, "seed": int, "covariance": str,
                 "n_grid": _floats, "mu_grid": _floats, "rho_grid": _floats, "workers": int,
                 "random_r1": lambda s: s.strip().lower() in ("1", "true", "yes")}


def read_config_file(path):
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            k = k.replace("-", "_")
            if k not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {k!r}")
            try:
                out["lam" if k == "lambda" else k] = _CONFIG_TYPES[k](v)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {k}") from exc
    return out


def _cmd_run(args):
    opts = read_config_file(args.config) if args.config else {}
    for k in _CONFIG_TYPES:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    if "experiment" not in opts:
        raise ConfigError("--experiment is required")
    if opts.get("seed") is None and os.environ.get(SEED_ENV):
        opts["seed"] = int(os.environ[SEED_ENV])
    exp = opts.pop("experiment")
    grids = {k: opts.pop(k, None) for k in ("n_grid", "mu_grid", "rho_grid")}
    cfg = default_config(exp, **opts)
    for key, param in (("n_grid", "n"), ("mu_grid", "mu_base"), ("rho_grid", "rho")):
        if grids[key] is None:
            continue
        if param != cfg.grid_param:
            raise ConfigError(f"experiment {exp} varies {cfg.grid_param}, not {param}")
        cfg = default_config(exp, **opts, grid=grids[key])
    results = run_experiment(cfg)
    emit_csv(results, args.out)
    print(f"wrote {len(results)} rows to {args.out}")


def _cmd_oracle(args):
    n = golden.write_fixture(args.fixture)
    print(f"wrote {n} records to {args.fixture}")


def _cmd_bench(args):
    policy = SeedPolicy(args.seed)
    alt = AlternativeModel(3.0)
    per = args.m // args.nodes
    nodes = [NodeState(i, gen_mixture_batch(per, 0.8, alt, policy.stream(0, i)), StoreyConfig(0.5))
             for i in range(1, args.nodes + 1)]
    transport = StarTransport()
    t0 = time.perf_counter()
    out = run_round(nodes, 0.2, transport)
    dt = time.perf_counter() - t0
    rejected = sum(r.k_hat for r in out.values())
    print(f"nodes={args.nodes} m={per * args.nodes} round={dt * 1e3:.1f} ms "
          f"messages={transport.messages} bytes={transport.bytes} rejections={rejected}")
    print(f"alpha_i range: {np.min([n.alpha_i for n in nodes]):.5f}.."
          f"{np.max([n.alpha_i for n in nodes]):.5f}")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        {"run": _cmd_run, "oracle": _cmd_oracle, "bench": _cmd_bench}[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
