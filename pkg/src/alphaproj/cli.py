"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 internal consistency failure,
4 infeasible constraints, 5 domain violation, 6 non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import errors as E
from .divergences import alpha_relative_entropy, alpha_relative_entropy_direct
from .fileio import dumps_report, loads_json, read_density, write_density
from .maxent import (
    GeneralizedGaussianSpec,
    covariance,
    generalized_gaussian,
    maxent_grid,
    normalizer,
)
from .measures import as_alpha, kl_divergence, renyi_entropy, shannon_entropy
from .projection import ConstraintSet, SolverOptions, project
from .verify import DEFAULT_TOLERANCES, SUITES, run_campaign

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONSISTENCY = 3
EXIT_INFEASIBLE = 4
EXIT_DOMAIN = 5
EXIT_NONCONVERGENCE = 6

PATH_AGREEMENT = 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


_EXIT_FOR = (
    (E.ParseError, EXIT_PARSE),
    (E.InfeasibleError, EXIT_INFEASIBLE),
    ((E.GridTooCoarseError, E.MomentDivergedError), EXIT_NONCONVERGENCE),
    (E.AlphaProjError, EXIT_DOMAIN),
)

TOLERANCE_NAMES = {
    "entropy": set(),
    "divergence": {"path_agreement"},
    "project": {"tol", "certificate"},
    "maxent": {"cov_tol"},
    "verify": set(DEFAULT_TOLERANCES),
}


@dataclass
class RunConfig:
    """Settings shared by all subcommands; loadable from a strict JSON file."""

    alpha: float | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise E.ParseError(f"format: expected 'json' or 'csv', got {self.format!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise E.ParseError("seed: expected an unsigned 64-bit integer")
        if not isinstance(self.tolerances, dict):
            raise E.ParseError("tolerances: expected an object")
        for k, v in self.tolerances.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise E.ParseError(f"tolerances.{k}: expected a finite number")
        if self.alpha is not None:
            if isinstance(self.alpha, bool) or not isinstance(self.alpha, (int, float)):
                raise E.ParseError("alpha: expected a number")

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = loads_json(text, "config")
        if not isinstance(data, dict):
            raise E.ParseError("config: top level must be an object")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise E.ParseError(f"config: unknown key(s) {sorted(extra)}")
        return cls(**data)


def _parse_tol(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise E.ParseError(f"--tol: expected name=value, got {item!r}")
        try:
            v = float(value)
        except ValueError:
            raise E.ParseError(f"--tol {name}: not a number: {value!r}") from None
        if not math.isfinite(v):
            raise E.ParseError(f"--tol {name}: must be finite")
        out[name] = v
    return out


def _config(args) -> RunConfig:
    if args.config:
        try:
            cfg = RunConfig.from_json(Path(args.config).read_text())
        except OSError as exc:
            raise E.ParseError(f"config: {exc.strerror}") from exc
    else:
        cfg = RunConfig()
    if args.alpha is not None:
        cfg.alpha = args.alpha
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise E.ParseError("--seed: expected an unsigned 64-bit integer")
        cfg.seed = args.seed
    if args.output is not None:
        cfg.output_path = args.output
    if args.format is not None:
        cfg.format = args.format
    cfg.tolerances = {**cfg.tolerances, **_parse_tol(args.tol)}
    unknown = set(cfg.tolerances) - TOLERANCE_NAMES[args.command]
    if unknown:
        raise E.ParseError(f"unknown tolerance name(s) for {args.command}: {sorted(unknown)}")
    return cfg


def _require(value, flag: str):
    if value is None:
        raise E.ParseError(f"{flag} is required")
    return value


def _alpha(cfg: RunConfig):
    return as_alpha(_require(cfg.alpha, "--alpha"))


# -- subcommands ------------------------------------------------------------

def cmd_entropy(args, cfg: RunConfig) -> tuple[dict, int]:
    a = _alpha(cfg)
    p = read_density(_require(args.input, "--input"), cfg.format)
    return {
        "alpha": a.alpha,
        "H_alpha": renyi_entropy(p, a),
        "H_shannon": shannon_entropy(p),
        "support_size": int(p.support.sum()),
    }, EXIT_OK


def cmd_divergence(args, cfg: RunConfig) -> tuple[dict, int]:
    a = _alpha(cfg)
    p = read_density(_require(args.input, "--input"), cfg.format)
    q = read_density(_require(args.ref, "--ref"), cfg.format)
    v1 = alpha_relative_entropy(p, q, a).value
    v2 = alpha_relative_entropy_direct(p, q, a).value
    if math.isfinite(v1) and math.isfinite(v2):
        delta = abs(v1 - v2)
    else:
        delta = 0.0 if v1 == v2 else math.inf
    limit = cfg.tolerances.get("path_agreement", PATH_AGREEMENT)
    report = {
        "alpha": a.alpha,
        "value": v2,
        "via_f_divergence": v1,
        "via_direct_formula": v2,
        "path_delta": delta,
        "kl": kl_divergence(p, q),
    }
    return report, EXIT_OK if delta <= limit else EXIT_CONSISTENCY


def cmd_project(args, cfg: RunConfig) -> tuple[dict, int]:
    a = _alpha(cfg)
    r = read_density(_require(args.ref, "--ref"), cfg.format)
    path = Path(_require(args.constraints, "--constraints"))
    try:
        text = path.read_text()
    except OSError as exc:
        raise E.ParseError(f"{path}: {exc.strerror}") from exc
    e = ConstraintSet.from_json(r.space, text)
    opts = SolverOptions(seed=cfg.seed)
    if "tol" in cfg.tolerances:
        opts.tol = cfg.tolerances["tol"]
    if args.samples is not None:
        opts.n_cert = args.samples
    res = project(r, e, a, opts)
    report = res.to_dict()
    report["alpha"] = a.alpha
    cert_limit = cfg.tolerances.get("certificate", -1e-6)
    report["certificate_ok"] = res.worst_certificate >= cert_limit
    if not res.converged:
        return report, EXIT_NONCONVERGENCE
    if not report["certificate_ok"]:
        return report, EXIT_CONSISTENCY
    return report, EXIT_OK


def _spec_from_json(text: str) -> GeneralizedGaussianSpec:
    data = loads_json(text, "spec")
    if not isinstance(data, dict):
        raise E.ParseError("spec: top level must be an object")
    extra = set(data) - {"n", "alpha", "C"}
    if extra:
        raise E.ParseError(f"spec: unknown key(s) {sorted(extra)}")
    for key in ("n", "alpha", "C"):
        if key not in data:
            raise E.ParseError(f"{key}: missing field")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise E.ParseError("n: expected a positive integer")
    if isinstance(data["alpha"], bool) or not isinstance(data["alpha"], (int, float)):
        raise E.ParseError("alpha: expected a number")
    try:
        C = np.array(data["C"], dtype=float)
    except (TypeError, ValueError):
        raise E.ParseError("C: expected a numeric matrix") from None
    if C.shape != (n, n) or not np.all(np.isfinite(C)):
        raise E.ParseError(f"C: expected a finite {n}x{n} matrix")
    try:
        return GeneralizedGaussianSpec(n, data["alpha"], C)
    except E.AlphaProjError:
        raise
    except ValueError as exc:
        raise E.AlphaProjError(f"C: {exc}") from exc


def cmd_maxent(args, cfg: RunConfig) -> tuple[dict, int]:
    path = Path(_require(args.input, "--input"))
    try:
        text = path.read_text()
    except OSError as exc:
        raise E.ParseError(f"{path}: {exc.strerror}") from exc
    spec = _spec_from_json(text)
    if cfg.alpha is not None and as_alpha(cfg.alpha).alpha != spec.alpha.alpha:
        raise E.ParseError("--alpha disagrees with alpha in the input file")
    h = args.cell_width if args.cell_width is not None else (1e-3 if spec.n == 1 else 0.02)
    grid = maxent_grid(spec, h, cover=args.extent)
    g = generalized_gaussian(spec, grid, cov_tol=cfg.tolerances.get("cov_tol", 0.01))
    cov = covariance(g)
    rel = float(np.linalg.norm(cov - spec.C) / np.linalg.norm(spec.C))
    support = spec.half_widths() if spec.compact else [math.inf] * spec.n
    if args.density:
        write_density(g, args.density)
    return {
        "n": spec.n,
        "alpha": spec.alpha.alpha,
        "b_alpha": spec.b,
        "Z": normalizer(spec, grid),
        "support_half_widths": list(support),
        "covariance": cov,
        "covariance_rel_err": rel,
        "H_alpha": renyi_entropy(g, spec.alpha),
        "grid_cells": len(grid),
        "cell_width": h,
        "density_file": args.density,
    }, EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> tuple[dict, int]:
    alphas = None if cfg.alpha is None else [cfg.alpha]
    report = run_campaign(
        args.suite,
        n_samples=args.samples,
        seed=cfg.seed,
        alphas=alphas,
        tolerances=cfg.tolerances,
    )
    return report, EXIT_OK if report["passed"] else EXIT_CONSISTENCY


COMMANDS = {
    "entropy": cmd_entropy,
    "divergence": cmd_divergence,
    "project": cmd_project,
    "maxent": cmd_maxent,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="order alpha (not 1)")
    common.add_argument("--seed", type=int, help="root seed (unsigned 64-bit)")
    common.add_argument("--output", help="write the JSON report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="input distribution format")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="named tolerance; repeatable")
    common.add_argument("--config", help="RunConfig JSON file; flags override it")

    parser = argparse.ArgumentParser(prog="alphaproj", description="alpha-relative entropy toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[common], help="Renyi and Shannon entropy of a distribution")
    p.add_argument("--input", help="distribution file")

    p = sub.add_parser("divergence", parents=[common], help="I_alpha(P, Q) by both formulas")
    p.add_argument("--input", help="distribution file for P")
    p.add_argument("--ref", help="distribution file for Q")

    p = sub.add_parser("project", parents=[common], help="I_alpha-projection onto a constraint set")
    p.add_argument("--ref", help="reference distribution R")
    p.add_argument("--constraints", help="constraint-set JSON file")
    p.add_argument("--samples", type=int, help="number of certificate samples (default 200)")

    p = sub.add_parser("maxent", parents=[common], help="covariance-constrained Renyi maximizer on a grid")
    p.add_argument("--input", help='spec JSON {"n":..., "alpha":..., "C":[[...]]}')
    p.add_argument("--cell-width", type=float, help="grid cell width")
    p.add_argument("--extent", type=float, help="grid must also cover [-extent, extent]")
    p.add_argument("--density", help="write the grid density to this file")

    p = sub.add_parser("verify", parents=[common], help="seeded randomized verification campaign")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=int, help="samples per alpha")
    return parser


def _exit_code(exc: Exception) -> int:
    for kinds, code in _EXIT_FOR:
        if isinstance(exc, kinds):
            return code
    return EXIT_DOMAIN


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        report, code = COMMANDS[args.command](args, cfg)
    except E.AlphaProjError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = dumps_report(report)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
