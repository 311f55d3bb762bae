"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 out-of-model,
4 simulation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .geometry import LAYOUTS, sample_placement
from .model import ConfigError, OutOfModelError, load_config, read_config_document
from .optimizer import ObjectiveProfile, analytic_p, numeric_p, optimize
from .simulator import RATE_DEFINITIONS, SimulationError, rate_ratio_experiment

EXIT_OK, EXIT_USAGE, EXIT_OUT_OF_MODEL, EXIT_SIM = 0, 2, 3, 4

ENV_PREFIX = "FOGNODES_"
DEFAULT_A = 50.0
DEFAULT_R_OVER_A = 0.0765
TABLE_NS = (200, 400, 800)
TABLE_ALPHAS = (1, 2, 4)

# flag name -> config key; these may also come from FOGNODES_<FLAG> env vars
_CONFIG_FLAGS = {"a": "half_side_a", "R": "fog_radius_R", "n": "total_nodes_n", "alpha": "alpha"}


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class TableRow:
    alpha: int
    n: int
    p_analytic: float
    p_numeric: float
    avg_end_devices: float
    avg_fog_nodes: float


def reference_tables(a: float = DEFAULT_A, R: float | None = None, ns=TABLE_NS, alphas=TABLE_ALPHAS,
                 p_decimals: int | None = 4) -> dict[int, list[TableRow]]:
    """Optimum ``p`` and node counts for every ``(alpha, n)`` pair.

    The analytic ``p`` is reported to ``p_decimals`` decimals (``None`` keeps
    full precision) and the two count columns are derived from the reported
    value, which is how the published tables were produced.
    """
    if R is None:
        R = DEFAULT_R_OVER_A * a
    out = {}
    for alpha in alphas:
        rows = []
        for n in ns:
            p = analytic_p(alpha, a, R, n)
            if p_decimals is not None:
                p = round(p, p_decimals)
            p_num = numeric_p(ObjectiveProfile(alpha, a, R, n))
            rows.append(TableRow(alpha, n, p, p_num, (1.0 - p) / p, n * p))
        out[alpha] = rows
    return out


def tables_to_csv(rows: list[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "n", "p_analytic", "p_numeric", "avg_end_devices", "avg_fog_nodes"])
    for r in rows:
        w.writerow([r.alpha, r.n, _fmt(r.p_analytic), _fmt(r.p_numeric), _fmt(r.avg_end_devices), _fmt(r.avg_fog_nodes)])
    return buf.getvalue()


def tables_from_csv(text: str) -> list[TableRow]:
    return [
        TableRow(int(r["alpha"]), int(r["n"]), float(r["p_analytic"]), float(r["p_numeric"]),
                 float(r["avg_end_devices"]), float(r["avg_fog_nodes"]))
        for r in csv.DictReader(io.StringIO(text))
    ]


def objective_sweep(alpha: int, ns, p_grid, a: float = DEFAULT_A, R: float | None = None) -> list[tuple[int, int, float, float]]:
    """Rows ``(alpha, n, p, J)`` for plotting the objective against ``p``."""
    if R is None:
        R = DEFAULT_R_OVER_A * a
    p_grid = np.asarray(p_grid, dtype=float)
    if p_grid.size == 0 or np.any(p_grid <= 0) or np.any(p_grid >= 1):
        raise UsageError("p grid must be non-empty and lie inside (0, 1)")
    rows = []
    for n in ns:
        J = ObjectiveProfile(alpha, a, R, n).value_at(p_grid)
        rows.extend((alpha, n, float(p), float(j)) for p, j in zip(p_grid, J))
    return rows


def parse_range(text: str) -> np.ndarray:
    """Parse ``start:stop:step`` (stop inclusive) or a single number."""
    parts = text.split(":")
    try:
        vals = [float(v) for v in parts]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}; expected start:stop:step") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3 or vals[2] <= 0 or vals[1] < vals[0]:
        raise UsageError(f"bad range {text!r}; expected start:stop:step with step > 0 and stop >= start")
    start, stop, step = vals
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _config_from_args(args, default_fallback: bool = False):
    """Merge config file < environment < flags, then validate."""
    doc = read_config_document(args.config) if args.config else {}
    env = {}
    for flag, key in _CONFIG_FLAGS.items():
        raw = os.environ.get(ENV_PREFIX + flag.upper())
        if raw is not None:
            env[key] = int(raw) if key in ("total_nodes_n", "alpha") else float(raw)
    flags = {key: getattr(args, flag) for flag, key in _CONFIG_FLAGS.items() if getattr(args, flag, None) is not None}

    merged = {**doc, **env, **flags}
    merged = {{"a": "half_side_a", "R": "fog_radius_R", "n": "total_nodes_n"}.get(k, k): v for k, v in merged.items()}
    if args.standard_geometry or default_fallback:
        merged.setdefault("half_side_a", DEFAULT_A)
        merged.setdefault("fog_radius_R", DEFAULT_R_OVER_A * merged["half_side_a"])
    if default_fallback:
        merged.setdefault("alpha", 1)
    return load_config(merged)


def _env_default(name, cast):
    raw = os.environ.get(ENV_PREFIX + name)
    return cast(raw) if raw is not None else None


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_optimize(args) -> int:
    cfg = _config_from_args(args)
    res = optimize(cfg)
    if args.format == "json":
        _write(json.dumps(res.to_dict(), indent=2) + "\n", args.out)
    elif args.format == "csv":
        d = res.to_dict()
        _write(",".join(d) + "\n" + ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in d.values()) + "\n", args.out)
    else:
        _write(
            f"alpha={res.alpha} n={res.total_nodes_n}\n"
            f"  p (analytic)      {res.p_analytic:.4g}\n"
            f"  p (numeric)       {res.p_numeric:.4g}\n"
            f"  fog nodes n1      {res.fog_count_n1:.4g}\n"
            f"  end devices n0    {res.device_count_n0:.4g}\n"
            f"  devices per fog   {res.devices_per_fog:.4g}\n"
            f"  J at optimum      {res.objective_at_optimum:.4g}\n",
            args.out,
        )
    return EXIT_OK


def cmd_tables(args) -> int:
    a = args.a if args.a is not None else DEFAULT_A
    R = args.R if args.R is not None else DEFAULT_R_OVER_A * a
    tables = reference_tables(a, R)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for alpha, rows in tables.items():
            ext = "json" if args.format == "json" else "csv"
            text = json.dumps([asdict(r) for r in rows], indent=2) if ext == "json" else tables_to_csv(rows)
            (out / f"table_alpha{alpha}.{ext}").write_text(text)
    elif args.format == "json":
        sys.stdout.write(json.dumps({str(k): [asdict(r) for r in v] for k, v in tables.items()}, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(tables_to_csv(rows) for rows in tables.values()))
    return EXIT_OK


def cmd_objective_sweep(args) -> int:
    alpha = args.alpha if args.alpha is not None else 1
    if alpha not in TABLE_ALPHAS:
        raise ConfigError("alpha", f"unsupported path-loss exponent {alpha}")
    a = args.a if args.a is not None else DEFAULT_A
    R = args.R if args.R is not None else DEFAULT_R_OVER_A * a
    ns = [int(v) for v in args.ns.split(",")] if args.ns else ([args.n] if args.n else list(TABLE_NS))
    rows = objective_sweep(alpha, ns, parse_range(args.p_grid), a, R)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "n", "p", "J"])
    for al, n, p, J in rows:
        w.writerow([al, n, _fmt(p), _fmt(J)])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    grid = parse_range(args.snr)
    report = rate_ratio_experiment(cfg, grid, args.trials, args.seed, layout=args.layout,
                                   definition=args.rate_definition, fading=args.fading)
    summary = (f"alpha={report.alpha} n={report.n} n1_opt={report.n1_opt} ratio "
               f"min={report.ratio.min():.4g} mean={report.ratio.mean():.4g} max={report.ratio.max():.4g}\n")
    if args.out:
        prefix = Path(args.out)
        prefix.with_suffix(".csv").write_text(report.to_csv())
        prefix.with_suffix(".json").write_text(report.metadata_json() + "\n")
        sys.stdout.write(summary)
    else:
        sys.stdout.write(report.to_csv())
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_place(args) -> int:
    cfg = _config_from_args(args, default_fallback=True)
    placement = sample_placement(cfg, args.n1, args.seed, layout=args.layout)
    text = placement.to_json() + "\n" if args.format == "json" else placement.to_csv()
    _write(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML file with flat config keys")
    common.add_argument("--a", type=float, help="half side of the square, km")
    common.add_argument("--R", type=float, help="fog network radius, km")
    common.add_argument("--n", type=int, help="total number of nodes")
    common.add_argument("--alpha", type=int, choices=TABLE_ALPHAS, help="path-loss exponent")
    common.add_argument("--standard-geometry", action="store_true", help="use a=50 km and R=0.0765a when not given")
    common.add_argument("--out", help="output file (or directory / file prefix, per command)")

    parser = argparse.ArgumentParser(
        prog="fognodes",
        description="Optimum number of fog nodes in a cloud-fog-thing network.",
        epilog=(f"Environment: {ENV_PREFIX}A, {ENV_PREFIX}R, {ENV_PREFIX}N, {ENV_PREFIX}ALPHA, "
                f"{ENV_PREFIX}SEED and {ENV_PREFIX}TRIALS override the config file; flags override both."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", parents=[common], help="analytic and numeric optimum for one config")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("tables", parents=[common], help="optimum p and counts for alpha in {1,2,4}, n in {200,400,800}")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("objective-sweep", parents=[common], help="objective J over a grid of p")
    p.add_argument("--ns", help="comma-separated list of n (default 200,400,800)")
    p.add_argument("--p-grid", default="0.001:0.2:0.001", help="start:stop:step inside (0, 1)")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.set_defaults(func=cmd_objective_sweep)

    seed_default = _env_default("SEED", _seed)
    trials_default = _env_default("TRIALS", _positive_int)

    p = sub.add_parser("simulate", parents=[common], help="optimized vs unoptimized average data rate")
    p.add_argument("--snr", default="0:30:5", help="SNR grid in dB, start:stop:step")
    p.add_argument("--trials", type=_positive_int, default=trials_default or 1000)
    p.add_argument("--seed", type=_seed, default=seed_default if seed_default is not None else 0)
    p.add_argument("--layout", choices=LAYOUTS, default="fog_range")
    p.add_argument("--rate-definition", choices=tuple(RATE_DEFINITIONS), default="round")
    p.add_argument("--fading", choices=("nakagami",), default=None)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("place", parents=[common], help="sample and export one node placement")
    p.add_argument("--n1", type=_positive_int, required=True, help="number of fog nodes")
    p.add_argument("--seed", type=_seed, default=seed_default if seed_default is not None else 0)
    p.add_argument("--layout", choices=LAYOUTS, default="uniform")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_place)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OutOfModelError as exc:
        print(f"out of model: {exc}", file=sys.stderr)
        return EXIT_OUT_OF_MODEL
    except (ConfigError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
