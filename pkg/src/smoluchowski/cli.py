"""Command line entry point: ``smoluchowski {point,table,profile}``.

Exit codes: 0 success, 2 configuration error, 3 oracle divergence, 4 I/O error.
Settings are resolved as command-line flags > ``--config`` file > defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import benchmarks
from .direct import solve_fixed_point
from .errors import ConfigError, DivergenceError
from .fields import macroscopic_profile, wall_moments
from .kernels import DEFAULT_MU_NODES
from .neumann import (
    DEFAULT_K_NODES,
    DEFAULT_MAP_SCALE,
    DEFAULT_ORDER,
    MAX_ORDER,
    assemble_series,
    discretization,
)

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("smoluchowski")


@dataclass
class RunConfig:
    q: float = 1.0
    g_T: float = 1.0
    order: int = DEFAULT_ORDER
    mu_nodes: int = DEFAULT_MU_NODES
    k_nodes: int = DEFAULT_K_NODES
    map_scale: float = DEFAULT_MAP_SCALE
    tol: float = 1e-10
    oracle: bool = False
    output_format: str = "json"
    output_path: str | None = None

    def validate(self) -> None:
        if not 0.0 < self.q <= 1.0:
            raise ConfigError(f"q must lie in (0, 1], got {self.q}")
        if not math.isfinite(self.g_T):
            raise ConfigError("g_T must be finite")
        if not 0 <= self.order <= MAX_ORDER:
            raise ConfigError(f"order must lie in 0..{MAX_ORDER}, got {self.order}")
        if self.mu_nodes < 2 or self.k_nodes < 2:
            raise ConfigError("node counts must be >= 2")
        if not (self.map_scale > 0 and math.isfinite(self.map_scale)):
            raise ConfigError("map_scale must be positive")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigError("tol must be positive")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.output_format!r}")


# config-file key -> (RunConfig field, parser)
_CONFIG_KEYS = {
    "q": ("q", float),
    "g_t": ("g_T", float),
    "g-t": ("g_T", float),
    "order": ("order", int),
    "mu_nodes": ("mu_nodes", int),
    "mu-nodes": ("mu_nodes", int),
    "k_nodes": ("k_nodes", int),
    "k-nodes": ("k_nodes", int),
    "map_scale": ("map_scale", float),
    "map-scale": ("map_scale", float),
    "tol": ("tol", float),
    "oracle": ("oracle", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
    "format": ("output_format", str),
    "out": ("output_path", str),
}


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.lower() not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        name, parse = _CONFIG_KEYS[key.lower()]
        try:
            settings[name] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return settings


def fmt(value: float) -> str:
    return f"{value:.15g}"


def _num(value):
    if value is None:
        return None
    if isinstance(value, (bool, int, np.integer)):
        return int(value)
    return float(fmt(float(value)))


def _round_tree(obj):
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def _csv_text(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(c) is None else
                         (fmt(row[c]) if isinstance(row[c], float) else row[c]) for c in columns])
    return buf.getvalue()


def _json_text(config: RunConfig, results, diagnostics: dict) -> str:
    cfg = asdict(config)
    payload = {"config": cfg, "results": results, "diagnostics": diagnostics}
    return json.dumps(_round_tree(payload), indent=2, sort_keys=False) + "\n"


def run_point(config: RunConfig) -> tuple[str, int]:
    disc = discretization(config.mu_nodes, config.k_nodes, config.map_scale)
    result = assemble_series(config.q, config.g_T, config.order, disc)
    record = {
        "q": config.q,
        "g_T": config.g_T,
        "order": config.order,
        "eps_n": result.eps_n,
        "eps_T": result.eps_T,
    }
    coefficients = [{"m": c.m, "eps_n": float(c.eps[0]), "eps_T": float(c.eps[1])}
                    for c in result.coefficients]
    diagnostics = dict(result.diagnostics)
    if config.oracle:
        sol = solve_fixed_point(config.q, config.g_T, config.tol, disc=disc)
        record["oracle_eps_n"] = float(sol.eps[0])
        record["oracle_eps_T"] = float(sol.eps[1])
        record["oracle_deviation"] = float(np.max(np.abs(sol.eps - result.eps)))
        diagnostics.update(oracle_iterations=sol.iterations, oracle_residual=sol.final_residual)
    if config.output_format == "json":
        return _json_text(config, {**record, "coefficients": coefficients}, diagnostics), EXIT_OK
    flat = dict(record)
    for c in coefficients:
        flat[f"eps_n_{c['m']}"] = c["eps_n"]
        flat[f"eps_T_{c['m']}"] = c["eps_T"]
    return _csv_text(list(flat), [flat]), EXIT_OK


def run_table(config: RunConfig, q_list) -> tuple[str, int]:
    """One row per q at unit gradient, with the discrete-ordinates comparison."""
    q_list = list(q_list)
    if not q_list:
        raise ConfigError("q list must not be empty")
    disc = discretization(config.mu_nodes, config.k_nodes, config.map_scale)
    rows = []
    for q in q_list:
        if not 0.0 < q <= 1.0:
            raise ConfigError(f"q must lie in (0, 1], got {q}")
        result = assemble_series(q, 1.0, config.order, disc)
        ref = benchmarks.reference_eps_T(q)
        rows.append({
            "q": float(q),
            "eps_T": result.eps_T,
            "eps_n": result.eps_n,
            "reference_eps_T": ref,
            "error_percent": None if ref is None else 100.0 * (ref - result.eps_T) / ref,
        })
    columns = ["q", "eps_T", "eps_n", "reference_eps_T", "error_percent"]
    if config.output_format == "json":
        diagnostics = {**disc.sizes, "order": config.order,
                       "reference": "discrete-ordinates benchmark, external data"}
        return _json_text(config, rows, diagnostics), EXIT_OK
    return _csv_text(columns, rows), EXIT_OK


def run_profile(config: RunConfig, x_max: float, points: int) -> tuple[str, int]:
    if not (x_max > 0 and math.isfinite(x_max)):
        raise ConfigError("x_max must be positive")
    if points < 2:
        raise ConfigError("points must be >= 2")
    disc = discretization(config.mu_nodes, config.k_nodes, config.map_scale)
    if config.oracle:
        sol = solve_fixed_point(config.q, config.g_T, config.tol, disc=disc)
        density, eps, source = sol.density, sol.eps, "fixed-point"
    else:
        result = assemble_series(config.q, config.g_T, config.order, disc)
        density, eps, source = result.density(), result.eps, f"series-order-{config.order}"
    x = np.linspace(0.0, x_max, points)
    profile = macroscopic_profile(x, density)
    wall = wall_moments(density, eps, config.q, config.g_T)
    rows = [{"x": float(xi), "dn_c": float(v[0]), "dT_c": float(v[1])}
            for xi, v in zip(x, profile.values)]
    diagnostics = {
        **disc.sizes,
        "density_source": source,
        "eps_n": float(eps[0]),
        "eps_T": float(eps[1]),
        "wall_moment_check": [float(w) for w in wall],
        "wall_moment_mismatch": float(np.max(np.abs(wall - profile.values[0]))),
        "wall_temperature": float(eps[1] + profile.values[0, 1]),
    }
    if config.output_format == "json":
        return _json_text(config, rows, diagnostics), EXIT_OK
    return _csv_text(["x", "dn_c", "dT_c"], rows), EXIT_OK


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--q", type=float, help="accommodation coefficient in (0, 1]")
    p.add_argument("--g-t", dest="g_T", type=float, help="logarithmic temperature gradient (default 1)")
    p.add_argument("--order", type=int, help=f"series truncation order, 0..{MAX_ORDER} (default {DEFAULT_ORDER})")
    p.add_argument("--mu-nodes", type=int, help=f"velocity quadrature nodes (default {DEFAULT_MU_NODES})")
    p.add_argument("--k-nodes", type=int, help=f"wavenumber quadrature nodes (default {DEFAULT_K_NODES})")
    p.add_argument("--map-scale", type=float, help="scale s of the map k = s t / (1 - t)")
    p.add_argument("--tol", type=float, help="fixed-point tolerance for --oracle")
    p.add_argument("--oracle", action="store_const", const=True, help="also run the direct fixed-point solver")
    p.add_argument("--format", dest="output_format", choices=("csv", "json"))
    p.add_argument("--out", dest="output_path", help="write output here instead of stdout")
    p.add_argument("--config", help="file of key=value lines")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="smoluchowski", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("point", parents=[common], help="jump coefficients at one q")
    table = sub.add_parser("table", parents=[common], help="coefficients over a list of q")
    table.add_argument("--q-list", type=lambda s: [float(v) for v in s.split(",") if v.strip()],
                       help="comma-separated q values (default: the benchmark set)")
    profile = sub.add_parser("profile", parents=[common], help="density/temperature profile near the wall")
    profile.add_argument("--x-max", type=float, default=20.0)
    profile.add_argument("--points", type=int, default=101)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = read_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            settings[f.name] = value
    config = RunConfig(**settings)
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        if args.command == "point":
            text, code = run_point(config)
        elif args.command == "table":
            text, code = run_table(config, args.q_list or benchmarks.DEFAULT_Q_LIST)
        else:
            text, code = run_profile(config, args.x_max, args.points)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if config.output_path:
            Path(config.output_path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
