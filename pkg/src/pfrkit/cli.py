"""pfr command line: one subcommand per operation, one JSON document on stdout.

Exit codes: 0 success, 1 cover/verification failure, 2 usage or input error,
3 resource limit (enumeration truncated, sampling failed).
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from scipy.spatial import QhullError

from .core.config import Config, ConfigManager, setup_logging
from .core.errors import CoverError, DomainError, PfrError, SamplingError, TruncationError, VerificationError
from .modules.groups import AmbientGroup, CoordinateKind
from .modules.instances import (
    make_ap,
    make_gap,
    make_lovett_regev,
    make_random_convex_instance,
    search_radius,
)
from .modules.lattice import enumerate_lattice
from .modules.progressions import Frame, gaussian_correlation, gaussian_density, image_set, progression_size
from .modules.setops import doubling_constant, greedy_cover, sumset, verify_cover
from .modules.transfer import rbm_ratio, transfer_pipeline
from .utils import codec
from .utils import rational as rq

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

Result = Tuple[Dict[str, Any], int]


def _instance_doc(a_set, p, x_set=None) -> Dict[str, Any]:
    doc = {"A": a_set.to_dict(), "P": p.to_dict()}
    if x_set is not None:
        doc["X"] = x_set.to_dict()
    return doc


def cmd_enumerate(args, cfg: Config) -> Result:
    body = codec.load_body(args.body)
    center = rq.vector(args.center) if args.center else None
    points = enumerate_lattice(body, center, cfg.enumeration.limit, args.method)
    return points.to_dict(), EXIT_LIMIT if points.truncated else EXIT_OK


def cmd_size(args, cfg: Config) -> Result:
    p = codec.load_progression(args.prog)
    return {"size": progression_size(p, cfg.enumeration.limit)}, EXIT_OK


def cmd_image(args, cfg: Config) -> Result:
    p = codec.load_progression(args.prog)
    return image_set(p, cfg.enumeration.limit).to_dict(), EXIT_OK


def cmd_sumset(args, cfg: Config) -> Result:
    a_set = codec.load_set(args.set)
    b_set = codec.load_set(args.set2) if args.set2 else a_set
    result = sumset(a_set, b_set)
    return {"sumset": result.to_dict(), "size": len(result)}, EXIT_OK


def cmd_doubling(args, cfg: Config) -> Result:
    a_set = codec.load_set(args.set)
    k = doubling_constant(a_set)
    return {"K": rq.format_fraction(k), "size_A": len(a_set), "size_AA": int(k * len(a_set))}, EXIT_OK


def cmd_verify_cover(args, cfg: Config) -> Result:
    result = verify_cover(
        codec.load_set(args.set),
        codec.load_progression(args.prog),
        codec.load_set(args.cover),
        cfg.enumeration.limit,
    )
    return result.to_dict(), EXIT_OK if result.ok else EXIT_FAILED


def cmd_greedy_cover(args, cfg: Config) -> Result:
    x_set = greedy_cover(codec.load_set(args.set), codec.load_progression(args.prog), cfg.enumeration.limit)
    return {"X": x_set.to_dict(), "size": len(x_set)}, EXIT_OK


def cmd_transfer(args, cfg: Config) -> Result:
    report = transfer_pipeline(
        codec.load_set(args.set),
        codec.load_progression(args.prog),
        codec.load_set(args.cover),
        cfg,
    )
    return report.to_dict(), EXIT_OK if report.verified else EXIT_FAILED


def cmd_rbm(args, cfg: Config) -> Result:
    grid = [tuple(float(v) for v in pair.split(",")) for pair in args.grid] or cfg.transfer.rbm_grid
    if any(len(pair) != 2 for pair in grid):
        raise DomainError("Grid points are written t1,t2")
    mc = cfg.monte_carlo
    result = rbm_ratio(
        codec.load_body(args.body_c),
        codec.load_body(args.body_b),
        grid,
        mc.samples,
        mc.seed,
        cfg.minkowski.tol,
        cfg.minkowski.steps_per_dim,
        mc.block_size,
        mc.workers,
    )
    return result.to_dict(), EXIT_OK


def cmd_gauss_corr(args, cfg: Config) -> Result:
    p = codec.load_progression(args.prog)
    if not p.body.is_ellipsoid:
        raise DomainError("gauss-corr needs an ellipsoid progression (its Gram defines the density)")
    theta = gaussian_density(p.frame, p.body.gram, cfg.gaussian.tail_eps, cfg.enumeration.limit)
    rho = gaussian_correlation(codec.load_set(args.set), theta)
    return {
        "rho": rho,
        "truncation_bound": theta.truncation_bound,
        "total_dropped": theta.total_dropped,
        "total_mass": theta.total_mass,
        "support": len(theta.weights),
    }, EXIT_OK


def cmd_gen(args, cfg: Config) -> Result:
    limit = cfg.enumeration.limit
    seed = cfg.monte_carlo.seed
    if args.kind == "ap":
        return _instance_doc(*make_ap(args.N, args.step, args.base, limit)), EXIT_OK
    if args.kind == "gap":
        gens = [rq.vector(g.split(",")) for g in args.gens]
        m = len(gens[0]) if gens else 1
        integral = all(rq.is_integral(g) for g in gens)
        group = AmbientGroup(m, CoordinateKind.INTEGER if integral else CoordinateKind.RATIONAL)
        frame = Frame.of(group, [0] * m, gens)
        return _instance_doc(*make_gap(frame, args.lengths, limit)), EXIT_OK
    if args.kind == "random-convex":
        return _instance_doc(*make_random_convex_instance(args.d, args.k, seed, args.scale)), EXIT_OK
    radius = args.R
    if radius is None:
        radius = search_radius(args.m, args.h, seed, args.lo, args.hi, limit)
    a_set, p = make_lovett_regev(args.m, radius, args.h, seed, limit)
    doc = _instance_doc(a_set, p)
    doc["R"] = rq.format_fraction(radius)
    return doc, EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Path to configuration file")
    common.add_argument("--seed", type=int, default=None, help="Monte Carlo / generator seed")
    common.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    common.add_argument("--limit", type=int, default=None, help="Lattice enumeration limit")
    common.add_argument("--tol", type=float, default=None, help="Minkowski membership tolerance")
    common.add_argument("--tail-eps", type=float, default=None, help="Gaussian tail mass bound")
    common.add_argument("--workers", type=int, default=None, help="Threads for sample blocks / candidates")
    common.add_argument("--log-level", default=None, help="stderr log level (default from config)")
    common.add_argument("--out", type=Path, default=None, help="Also write the JSON document here")
    common.add_argument("--summary", action="store_true", help="Print a summary table to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="pfr", description="Progressions, lattice points and covers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="Lattice points of a body")
    p.add_argument("--body", required=True, type=Path)
    p.add_argument("--center", nargs="+", default=None, help="Center shift, e.g. 1/2 0")
    p.add_argument("--method", choices=["auto", "fincke_pohst", "box_scan"], default="auto")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("size", parents=[common], help="Size of a progression")
    p.add_argument("--prog", required=True, type=Path)
    p.set_defaults(handler=cmd_size)

    p = sub.add_parser("image", parents=[common], help="Image set, size and cardinality")
    p.add_argument("--prog", required=True, type=Path)
    p.set_defaults(handler=cmd_image)

    p = sub.add_parser("sumset", parents=[common], help="A + B")
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--set2", type=Path, default=None, help="Second summand (default: A)")
    p.set_defaults(handler=cmd_sumset)

    p = sub.add_parser("doubling", parents=[common], help="|A + A| / |A|")
    p.add_argument("--set", required=True, type=Path)
    p.set_defaults(handler=cmd_doubling)

    for name, handler in (("verify-cover", cmd_verify_cover), ("transfer", cmd_transfer)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--set", required=True, type=Path)
        p.add_argument("--prog", required=True, type=Path)
        p.add_argument("--cover", required=True, type=Path)
        if name == "transfer":
            p.add_argument("--target", choices=["ellipsoid", "skew"], default=None)
        p.set_defaults(handler=handler)

    p = sub.add_parser("greedy-cover", parents=[common], help="Build X with A ⊆ P + X")
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--prog", required=True, type=Path)
    p.set_defaults(handler=cmd_greedy_cover)

    p = sub.add_parser("rbm", parents=[common], help="Reverse Brunn-Minkowski ratio")
    p.add_argument("--body-c", required=True, type=Path)
    p.add_argument("--body-b", required=True, type=Path)
    p.add_argument("--grid", nargs="*", default=[], help="t1,t2 pairs (default from config)")
    p.set_defaults(handler=cmd_rbm)

    p = sub.add_parser("gauss-corr", parents=[common], help="Gaussian density correlation")
    p.add_argument("--set", required=True, type=Path)
    p.add_argument("--prog", required=True, type=Path)
    p.set_defaults(handler=cmd_gauss_corr)

    gen = sub.add_parser("gen", help="Generate instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g = gen_sub.add_parser("ap", parents=[common])
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--step", default="1")
    g.add_argument("--base", default="0")
    g = gen_sub.add_parser("gap", parents=[common])
    g.add_argument("--gens", nargs="+", required=True, help="Generators as comma lists, e.g. 1,0 0,10")
    g.add_argument("--lengths", nargs="+", type=int, required=True)
    g = gen_sub.add_parser("random-convex", parents=[common])
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--scale", default="1")
    g = gen_sub.add_parser("lovett-regev", parents=[common])
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--R", default=None, help="Ball radius (searched when omitted)")
    g.add_argument("--h", type=int, default=10)
    g.add_argument("--lo", type=int, default=50)
    g.add_argument("--hi", type=int, default=500)
    gen.set_defaults(handler=cmd_gen)

    p = sub.add_parser("init-config", help="Write a default configuration file")
    p.add_argument("--out", type=Path, default=Path("config.json"))
    p.set_defaults(handler=None)
    return parser


def _effective_config(args) -> Config:
    """CLI flag > environment > config file > defaults."""
    cfg = ConfigManager(args.config).load_or_default()
    overrides = {
        ("monte_carlo", "seed"): args.seed,
        ("monte_carlo", "samples"): args.samples,
        ("monte_carlo", "workers"): args.workers,
        ("enumeration", "limit"): args.limit,
        ("minkowski", "tol"): args.tol,
        ("gaussian", "tail_eps"): args.tail_eps,
        ("transfer", "target"): getattr(args, "target", None),
        ("logging", "level"): args.log_level.upper() if args.log_level else None,
    }
    data = cfg.model_dump()
    for (section, key), value in overrides.items():
        if value is not None:
            data[section][key] = value
    return Config(**data)


def _print_summary(command: str, document: Dict[str, Any]) -> None:
    table = Table(title=f"pfr {command}")
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    for key, value in document.items():
        if key == "config":
            continue
        if isinstance(value, (str, int, float, bool)) or value is None:
            table.add_row(key, str(value))
        elif isinstance(value, dict) and all(not isinstance(v, (dict, list)) for v in value.values()):
            for sub_key, sub_value in value.items():
                table.add_row(f"{key}.{sub_key}", str(sub_value))
    Console(stderr=True).print(table)


def run_command(argv: Optional[List[str]] = None, stdout=None) -> int:
    """Parse ``argv``, run one subcommand and print its JSON document.

    Returns:
        The process exit code.
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE

    if args.command == "init-config":
        ConfigManager.create_default_config(args.out)
        codec.write_document({"created": str(args.out)}, stream=stdout)
        return EXIT_OK

    try:
        cfg = _effective_config(args)
    except (ValidationError, FileNotFoundError, ValueError) as e:
        codec.write_document({"error": str(e), "type": type(e).__name__}, stream=stdout)
        return EXIT_USAGE
    setup_logging(cfg.logging)

    handler: Callable[..., Result] = args.handler
    try:
        document, code = handler(args, cfg)
    except (CoverError, VerificationError) as e:
        witness = [rq.format_fraction(c) for c in e.witness] if e.witness is not None else None
        document, code = {"error": str(e), "witness": witness}, EXIT_FAILED
    except (TruncationError, SamplingError) as e:
        document, code = {"error": str(e), "type": type(e).__name__}, EXIT_LIMIT
    except (np.linalg.LinAlgError, QhullError) as e:
        logger.error(f"Numerical failure: {e}")
        document, code = {"error": str(e), "type": type(e).__name__}, EXIT_USAGE
    except (DomainError, ValidationError, ValueError) as e:
        document, code = {"error": str(e), "type": type(e).__name__}, EXIT_USAGE
    except PfrError as e:
        logger.exception("Internal error")
        document, code = {"error": str(e), "type": type(e).__name__}, EXIT_USAGE

    document["config"] = cfg.model_dump()
    document["exit_code"] = code
    codec.write_document(document, args.out, stdout)
    if args.summary:
        _print_summary(args.command, document)
    return code


def main() -> None:
    """Console entry point."""
    sys.exit(run_command(sys.argv[1:]))
