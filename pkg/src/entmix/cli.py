"""Command-line interface.

Exit codes: 0 success, 2 usage or malformed input, 3 mathematical
precondition violated (e.g. dependent states), 4 resource limit, 5 quadrature
did not converge.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import dimers, optimality, quadrature, sampling
from .concurrence import concurrence_mixed, concurrence_pure
from .errors import (DependentStates, EntmixError, InvalidEnsemble, NonConvergence,
                     TooLarge, UsageError)
from .qstate import density_from_ensemble, ensemble_from_json

EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_RESOURCE, EXIT_CONVERGENCE = 0, 2, 3, 4, 5

DEFAULT_SAMPLES = 10 ** 6
DEFAULT_SEED = 0
DEFAULT_TOL = 1e-5
DEFAULT_GRID = 101

ESTIMATES = ("f2", "f3", "rebit2", "rebit3", "rank4", "mu-moments", "r12-moments")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    threads: int = 1
    tol: float = DEFAULT_TOL
    input: str | None = None
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.samples < 1:
            raise UsageError("--samples must be at least 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be in [0, 2**64)")

    def metadata(self) -> dict:
        return {"seed": self.seed, "samples": self.samples, "tol": self.tol, "format": self.format}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--in", dest="input", default=None, help="input file (JSON)")
    p.add_argument("--out", dest="output", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify optimality of an ensemble read from --in")
    _common(p)

    p = sub.add_parser("estimate", help="Monte Carlo fraction and moment estimates")
    p.add_argument("which", choices=ESTIMATES)
    p.add_argument("--pairs", type=int, default=3, help="N for mu-moments")
    _common(p)

    p = sub.add_parser("dimer-sweep", help="concurrence sweep for a two-branch dimer superposition")
    p.add_argument("--pairs", type=int, default=4, help="number of dimers N (ignored with --in)")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="number of p grid points")
    _common(p)
    p.set_defaults(format="csv")

    p = sub.add_parser("quadrature", help="evaluate the angular integrals for the pair fraction")
    _common(p)
    return parser


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_json(path: str | None):
    if path is None:
        raise UsageError("--in is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidEnsemble(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidEnsemble(f"malformed JSON in {path}: {exc}") from exc


def cmd_certify(cfg: RunConfig) -> str:
    e = ensemble_from_json(_read_json(cfg.input))
    if not 2 <= e.k <= 4:
        raise InvalidEnsemble(f"certify needs 2 to 4 states, got {e.k}")
    if e.k == 2:
        out = optimality.certify_pair(*e.states).to_dict()
    elif e.k == 3:
        out = optimality.certify_triple(*e.states).to_dict()
    else:
        det = optimality.check_rank4(e.states)
        out = {"kind": "rank4", "det_r": det, "optimal": False}
    rho = density_from_ensemble(e)
    out["weights"] = [float(p) for p in e.weights]
    out["concurrence"] = concurrence_mixed(rho)
    out["weighted_sum"] = float(sum(p * concurrence_pure(s) for p, s in zip(e.weights, e.states)))
    out["config"] = cfg.metadata()
    return _dumps(out)


def cmd_estimate(cfg: RunConfig, which: str, pairs: int = 3) -> str:
    n, seed, th = cfg.samples, cfg.seed, cfg.threads
    if which == "f2":
        out = sampling.estimate_f2(n, seed, th).to_json()
    elif which == "f3":
        out = sampling.estimate_f3(n, seed, th).to_json()
    elif which == "rebit2":
        out = sampling.estimate_rebit_fraction(n, seed, 2, th).to_json()
    elif which == "rebit3":
        out = sampling.estimate_rebit_fraction(n, seed, 3, th).to_json()
    elif which == "rank4":
        out = sampling.estimate_rank4_violations(n, seed, th).to_json()
    elif which == "mu-moments":
        if pairs < 2:
            raise UsageError("--pairs must be at least 2")
        out = sampling.estimate_mu_moments(pairs, n, seed, th).to_json()
    else:
        out = sampling.r12_distribution_check(n, seed, th).to_json()
    out["which"] = which
    out["config"] = cfg.metadata()
    return _dumps(out)


def cmd_dimer_sweep(cfg: RunConfig, pairs: int, grid: int) -> str:
    if grid < 2:
        raise UsageError("--grid needs at least 2 points")
    if cfg.input is not None:
        s = dimers.DimerizedSuperposition.from_json(_read_json(cfg.input))
    else:
        if pairs < 1:
            raise UsageError("--pairs must be at least 1")
        if pairs > dimers.MAX_PAIRS:
            raise TooLarge(f"N={pairs} exceeds the limit of {dimers.MAX_PAIRS} pairs")
        s = dimers.random_superposition(pairs, 2, cfg.seed)
    if s.N > dimers.MAX_PAIRS:
        raise TooLarge(f"N={s.N} exceeds the limit of {dimers.MAX_PAIRS} pairs")
    rows = dimers.concurrence_sweep(s, np.linspace(0.0, 1.0, grid))
    if cfg.format == "csv":
        return dimers.sweep_to_csv(rows)
    return _dumps({"N": s.N, "rows": [r.__dict__ for r in rows], "config": cfg.metadata()})


def cmd_quadrature(cfg: RunConfig) -> str:
    if not 1e-8 <= cfg.tol <= 1e-3:
        raise UsageError("--tol must lie in [1e-8, 1e-3] for quadrature")
    res = quadrature.evaluate_appendix(cfg.tol)
    out = res.to_json()
    out["targets"] = {"f": math.pi / 4, "f2": (math.pi - 2) / 4,
                      "f_n_ll": (math.pi ** 2 - 8) / 16, "f_d_ll": (math.pi - 2) / 4, "f_ul": 0.5}
    out["config"] = cfg.metadata()
    return _dumps(out)


def _exit_code(exc: EntmixError) -> int:
    if isinstance(exc, (InvalidEnsemble, UsageError)):
        return EXIT_USAGE
    if isinstance(exc, TooLarge):
        return EXIT_RESOURCE
    if isinstance(exc, NonConvergence):
        return EXIT_CONVERGENCE
    return EXIT_MATH


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.seed, args.samples, args.threads, args.tol,
                        args.input, args.output, args.format)
        if args.command != "dimer-sweep" and cfg.format != "json":
            raise UsageError(f"{args.command} only writes JSON")
        if args.command == "certify":
            text = cmd_certify(cfg)
        elif args.command == "estimate":
            text = cmd_estimate(cfg, args.which, args.pairs)
        elif args.command == "dimer-sweep":
            text = cmd_dimer_sweep(cfg, args.pairs, args.grid)
        else:
            text = cmd_quadrature(cfg)
    except DependentStates as exc:
        print(f"entmix: {exc}", file=sys.stderr)
        return EXIT_MATH
    except EntmixError as exc:
        print(f"entmix: {exc}", file=sys.stderr)
        return _exit_code(exc)

    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
