"""Batch command-line front end.

Subcommands: pattern, visibility, oracle-compare, sweep.  Input is a flat
key=value config file with unit-suffixed keys (three modes below); output is
CSV (17 significant digits, LF endings) plus a JSON sidecar, byte-identical
across reruns except the created_utc field.

Config modes::

    mode = si          # full physical parameters
    mass_kg, slit_separation_m, packet_width_m, de_broglie_wavelength_m,
    path_length_m, coupling_rate_per_s, temperature_K

    mode = ratio       # geometry + decoherence strength t_L/tau_D
    slit_separation_m, packet_width_m, de_broglie_wavelength_m,
    path_length_m, t_ratio

    mode = natural     # hbar = m = packet_width = kB = 1 (oracle-compare)
    theta, beta, kappa, dtilde

Optional in any mode: grid_span (half-span; meters in si/ratio, packet widths
in natural), grid_points.  Command-line flags override config values.

Exit codes: 0 success, 2 config error, 3 I/O error, 4 solver convergence
failure, 5 internal numerical error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .closedform import (
    DEFAULT_GRID_POINTS,
    DEFAULT_SPAN_SIGMA,
    VARIANTS,
    InternalNumericError,
    NoFringeError,
    PatternProfile,
    make_grid,
    pattern_exact,
    pattern_exact_groups,
    pattern_weak,
    visibility_formula,
    visibility_numeric,
)
from .oracle import ConvergenceError, diagonal_profile, free_pattern
from .params import (
    DimensionlessGroups,
    PhysicalParams,
    RatioParams,
    ValidationError,
    derive_scales,
    dimensionless,
    natural_params,
    ratio_groups,
    ratio_scales,
    t_ratio_of,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CONVERGENCE = 4
EXIT_NUMERIC = 5

SWEEPABLE = ("mass", "temperature", "coupling_rate", "slit_separation", "t_ratio")

_MODE_KEYS = {
    "si": {
        "mass_kg",
        "slit_separation_m",
        "packet_width_m",
        "de_broglie_wavelength_m",
        "path_length_m",
        "coupling_rate_per_s",
        "temperature_K",
    },
    "ratio": {
        "slit_separation_m",
        "packet_width_m",
        "de_broglie_wavelength_m",
        "path_length_m",
        "t_ratio",
    },
    "natural": {"theta", "beta", "kappa", "dtilde"},
}
_OPTIONAL_KEYS = {"grid_span", "grid_points"}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings: parsed config plus flag overrides."""

    mode: str
    params: PhysicalParams | RatioParams
    groups: DimensionlessGroups | None  # natural mode only
    grid_span: float | None  # None = command default
    grid_points: int
    variant: str
    method: str
    fringes: int
    fringe_index: int


def parse_config_text(text: str) -> dict[str, str]:
    """key = value lines; '#' comments; duplicate keys rejected."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _float(cfg: dict[str, str], key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}") from None


def build_params(cfg: dict[str, str]):
    """(mode, params, groups) from a parsed config dict; strict keys."""
    mode = cfg.get("mode")
    if mode not in _MODE_KEYS:
        raise ConfigError(f"config must set mode = si | ratio | natural, got {mode!r}")
    required = _MODE_KEYS[mode]
    present = set(cfg) - {"mode"}
    missing = required - present
    unknown = present - required - _OPTIONAL_KEYS
    if missing:
        raise ConfigError(f"mode {mode}: missing keys: {', '.join(sorted(missing))}")
    if unknown:
        raise ConfigError(f"mode {mode}: unknown keys: {', '.join(sorted(unknown))}")
    if mode == "si":
        params = PhysicalParams(
            mass=_float(cfg, "mass_kg"),
            slit_separation=_float(cfg, "slit_separation_m"),
            packet_width=_float(cfg, "packet_width_m"),
            de_broglie_wavelength=_float(cfg, "de_broglie_wavelength_m"),
            path_length=_float(cfg, "path_length_m"),
            coupling_rate=_float(cfg, "coupling_rate_per_s"),
            temperature=_float(cfg, "temperature_K"),
        )
        return mode, params, None
    if mode == "ratio":
        params = RatioParams(
            slit_separation=_float(cfg, "slit_separation_m"),
            packet_width=_float(cfg, "packet_width_m"),
            de_broglie_wavelength=_float(cfg, "de_broglie_wavelength_m"),
            path_length=_float(cfg, "path_length_m"),
            t_ratio=_float(cfg, "t_ratio"),
        )
        return mode, params, None
    groups = DimensionlessGroups(
        theta=_float(cfg, "theta"),
        beta=_float(cfg, "beta"),
        kappa=_float(cfg, "kappa"),
        dtilde=_float(cfg, "dtilde"),
    )
    params = natural_params(groups.theta, groups.beta, groups.kappa, groups.dtilde)
    return mode, params, groups


def make_run_config(cfg: dict[str, str], args: argparse.Namespace) -> RunConfig:
    mode, params, groups = build_params(cfg)
    grid_span = args.grid_span
    if grid_span is None and "grid_span" in cfg:
        grid_span = _float(cfg, "grid_span")
    grid_points = args.grid_points
    if grid_points is None:
        grid_points = int(_float(cfg, "grid_points")) if "grid_points" in cfg else DEFAULT_GRID_POINTS
    if grid_span is not None and not (grid_span > 0 and math.isfinite(grid_span)):
        raise ConfigError(f"grid_span must be finite and > 0, got {grid_span}")
    if grid_points < 16:
        raise ConfigError(f"grid_points must be >= 16, got {grid_points}")
    return RunConfig(
        mode=mode,
        params=params,
        groups=groups,
        grid_span=grid_span,
        grid_points=int(grid_points),
        variant=args.variant,
        method=getattr(args, "method", "weak"),
        fringes=getattr(args, "fringes", 3),
        fringe_index=getattr(args, "fringe_index", 0),
    )


def config_echo(rc: RunConfig) -> dict:
    """Flat effective-settings dict; parsing it back rebuilds the RunConfig."""
    echo: dict = {"mode": rc.mode}
    p = rc.params
    if rc.mode == "si":
        echo.update(
            mass_kg=p.mass,
            slit_separation_m=p.slit_separation,
            packet_width_m=p.packet_width,
            de_broglie_wavelength_m=p.de_broglie_wavelength,
            path_length_m=p.path_length,
            coupling_rate_per_s=p.coupling_rate,
            temperature_K=p.temperature,
        )
    elif rc.mode == "ratio":
        echo.update(
            slit_separation_m=p.slit_separation,
            packet_width_m=p.packet_width,
            de_broglie_wavelength_m=p.de_broglie_wavelength,
            path_length_m=p.path_length,
            t_ratio=p.t_ratio,
        )
    else:
        g = rc.groups
        echo.update(theta=g.theta, beta=g.beta, kappa=g.kappa, dtilde=g.dtilde)
    if rc.grid_span is not None:
        echo["grid_span"] = rc.grid_span
    echo["grid_points"] = rc.grid_points
    echo["variant"] = rc.variant
    echo["method"] = rc.method
    echo["fringes"] = rc.fringes
    echo["fringe_index"] = rc.fringe_index
    return echo


def config_from_echo(echo: dict) -> RunConfig:
    """Inverse of config_echo (sidecar round-trip contract)."""
    cfg = {k: str(v) for k, v in echo.items() if k not in
           ("variant", "method", "fringes", "fringe_index")}
    ns = argparse.Namespace(
        grid_span=None,
        grid_points=None,
        variant=echo["variant"],
        method=echo.get("method", "weak"),
        fringes=int(echo.get("fringes", 3)),
        fringe_index=int(echo.get("fringe_index", 0)),
    )
    return make_run_config(cfg, ns)


# ---------------------------------------------------------------- output ---


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _status(msg: str) -> str:
    # status cells must stay comma-free: the CSV writer does not quote
    return msg.replace(",", ";")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_sidecar(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    payload["created_utc"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _derived_block(rc: RunConfig) -> dict:
    p = rc.params
    if isinstance(p, PhysicalParams):
        scales = derive_scales(p)
        groups = dimensionless(p, scales)
        t_ratio = t_ratio_of(p, scales)
    else:
        scales = ratio_scales(p)
        groups = ratio_groups(p)
        t_ratio = p.t_ratio
    return {
        "derived": asdict(scales),
        "groups": asdict(groups),
        "t_ratio": t_ratio,
    }


def _resolve_grid(rc: RunConfig) -> np.ndarray:
    if rc.grid_span is not None:
        return make_grid(rc.grid_span, rc.grid_points)
    p = rc.params
    if rc.mode == "natural":
        from .closedform import exact_pattern_params

        c = exact_pattern_params(rc.groups, rc.variant)
        span = DEFAULT_SPAN_SIGMA * max(math.sqrt(c.omega_sq), rc.groups.dtilde)
    else:
        scales = derive_scales(p) if isinstance(p, PhysicalParams) else ratio_scales(p)
        span = DEFAULT_SPAN_SIGMA * scales.envelope_width
    return make_grid(span, rc.grid_points)


def _position_header(rc: RunConfig) -> tuple[str, str]:
    if rc.mode == "natural":
        return "x_natural", "intensity_natural"
    return "x_m", "intensity_per_m"


def _compute_pattern(rc: RunConfig, grid: np.ndarray) -> PatternProfile:
    if rc.method == "weak":
        return pattern_weak(rc.params, grid)
    return pattern_exact(rc.params, grid, rc.variant)


# -------------------------------------------------------------- commands ---


def run_pattern(rc: RunConfig, out_dir: Path | None) -> int:
    grid = _resolve_grid(rc)
    prof = _compute_pattern(rc, grid)
    peak = float(prof.intensities.max())
    print(f"pattern: {len(prof)} points, method={rc.method}, peak intensity {peak:.6g}")
    if out_dir is not None:
        xh, ih = _position_header(rc)
        write_csv(
            out_dir / "pattern.csv",
            [xh, ih],
            zip(prof.positions.tolist(), prof.intensities.tolist()),
        )
        sidecar = {
            "command": "pattern",
            "config": config_echo(rc),
            "source": prof.meta.get("source"),
            "variant": rc.variant if rc.method == "exact" else None,
        }
        sidecar.update(_derived_block(rc))
        write_sidecar(out_dir / "pattern.json", sidecar)
        print(f"wrote {out_dir / 'pattern.csv'}")
    return EXIT_OK


def _visibility_rows(rc: RunConfig, indices) -> list[list]:
    grid = _resolve_grid(rc)
    prof = _compute_pattern(rc, grid)
    rows = []
    for n in indices:
        vf = visibility_formula(rc.params, n)
        try:
            vn = visibility_numeric(prof, n)
            rows.append([n, vf, vn, abs(vf - vn), "ok"])
        except NoFringeError as e:
            rows.append([n, vf, "", "", _status(f"no-fringe: {e}")])
    return rows


def run_visibility(rc: RunConfig, out_dir: Path | None) -> int:
    rows = _visibility_rows(rc, range(rc.fringes))
    header = ["fringe_index", "visibility_formula", "visibility_numeric", "discrepancy", "status"]
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    if out_dir is not None:
        write_csv(out_dir / "visibility.csv", header, rows)
        sidecar = {"command": "visibility", "config": config_echo(rc)}
        sidecar.update(_derived_block(rc))
        write_sidecar(out_dir / "visibility.json", sidecar)
        print(f"wrote {out_dir / 'visibility.csv'}")
    return EXIT_OK


def run_oracle_compare(rc: RunConfig, out_dir: Path | None) -> int:
    if rc.mode != "natural":
        raise ConfigError("oracle-compare requires a natural-mode config (theta/beta/kappa/dtilde)")
    p, g = rc.params, rc.groups
    t = derive_scales(p).flight_time  # = beta in these units
    grid = _resolve_grid(rc)
    oracle_prof = diagonal_profile(p, t, grid)
    peak = float(np.abs(oracle_prof.intensities).max())
    report: dict = {
        "command": "oracle-compare",
        "config": config_echo(rc),
        "flight_time": t,
        "doubling_drift": oracle_prof.meta["doubling_drift"],
        "variants": {},
    }
    columns = {"oracle": oracle_prof.intensities}
    for variant in VARIANTS:
        prof = pattern_exact_groups(g, 1.0, grid, variant)
        dev = np.abs(prof.intensities - oracle_prof.intensities)
        report["variants"][variant] = {
            "max_abs_deviation": float(dev.max()),
            "max_rel_deviation": float(dev.max()) / peak,
        }
        columns[variant] = prof.intensities
    rel = {v: report["variants"][v]["max_rel_deviation"] for v in VARIANTS}
    winner = min(rel, key=rel.get)
    report["winner"] = winner
    report["matched_1e-6"] = sorted(v for v in VARIANTS if rel[v] < 1e-6)
    if g.theta == 0.0 and g.kappa == 0.0:
        free_prof = free_pattern(p, t, grid)
        free_dev = {
            v: float(np.abs(columns[v] - free_prof.intensities).max()) / peak
            for v in VARIANTS
        }
        report["free_case"] = {
            "deviations": free_dev,
            "matched_1e-8": sorted(v for v in VARIANTS if free_dev[v] < 1e-8),
        }
        columns["free"] = free_prof.intensities
    for v in VARIANTS:
        print(f"{v}: max rel deviation {rel[v]:.3e}")
    print(f"winner: {winner}")
    if out_dir is not None:
        header = ["x_natural"] + list(columns)
        rows = zip(grid.tolist(), *(c.tolist() for c in columns.values()))
        write_csv(out_dir / "oracle_compare.csv", header, rows)
        write_sidecar(out_dir / "oracle_compare.json", report)
        print(f"wrote {out_dir / 'oracle_compare.csv'}")
    return EXIT_OK


def _apply_sweep_value(p, name: str, value: float):
    if name == "t_ratio":
        if not isinstance(p, RatioParams):
            raise ConfigError("sweep over t_ratio requires a ratio-mode config")
        return replace(p, t_ratio=value)
    if isinstance(p, RatioParams):
        if name == "slit_separation":
            return replace(p, slit_separation=value)
        raise ConfigError(f"sweep over {name} requires an si-mode config")
    if name == "mass":
        # fixed beam velocity: lambda_d scales as 1/m, flight time unchanged
        lam = p.de_broglie_wavelength * p.mass / value
        return replace(p, mass=value, de_broglie_wavelength=lam)
    return replace(p, **{name: value})


def run_sweep(rc: RunConfig, args: argparse.Namespace, out_dir: Path | None) -> int:
    names = args.param or []
    value_lists = args.values or []
    if not names:
        raise ConfigError("sweep requires at least one --param NAME --values LIST pair")
    if len(names) != len(value_lists):
        raise ConfigError("each --param needs a matching --values list")
    if len(names) > 2:
        raise ConfigError("at most two swept parameters are supported")
    if len(set(names)) != len(names):
        raise ConfigError("swept parameter names must be distinct")
    for name in names:
        if name not in SWEEPABLE:
            raise ConfigError(f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEPABLE)}")
    parsed: list[list[float]] = []
    for name, text in zip(names, value_lists):
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--values for {name}: not a number list: {text!r}") from None
        if not vals or not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"--values for {name}: must be non-empty and finite")
        parsed.append(vals)

    header = list(names) + ["visibility_formula", "visibility_numeric", "status"]
    rows: list[list] = []
    profiles: list[tuple[int, PatternProfile | None]] = []
    for i, combo in enumerate(itertools.product(*parsed)):
        try:
            q = rc.params
            for name, value in zip(names, combo):
                q = _apply_sweep_value(q, name, value)
            point = replace(rc, params=q)
            vf = visibility_formula(q, rc.fringe_index)
            grid = _resolve_grid(point)
            prof = _compute_pattern(point, grid)
            try:
                vn = visibility_numeric(prof, rc.fringe_index)
                rows.append(list(combo) + [vf, vn, "ok"])
            except NoFringeError as e:
                rows.append(list(combo) + [vf, "", _status(f"no-fringe: {e}")])
            profiles.append((i, prof))
        except (ValidationError,) as e:
            rows.append(list(combo) + ["", "", _status(f"invalid: {e}")])
            profiles.append((i, None))
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    if out_dir is not None:
        write_csv(out_dir / "sweep.csv", header, rows)
        sidecar = {
            "command": "sweep",
            "config": config_echo(rc),
            "swept": {name: vals for name, vals in zip(names, parsed)},
        }
        sidecar.update(_derived_block(rc))
        write_sidecar(out_dir / "sweep.json", sidecar)
        if args.profiles:
            xh, ih = _position_header(rc)
            for i, prof in profiles:
                if prof is None:
                    continue
                write_csv(
                    out_dir / f"profile_{i:04d}.csv",
                    [xh, ih],
                    zip(prof.positions.tolist(), prof.intensities.tolist()),
                )
        print(f"wrote {out_dir / 'sweep.csv'}")
    return EXIT_OK


# ------------------------------------------------------------------ main ---


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="key=value config file")
    common.add_argument("--out", default=None, help="output directory (created if missing)")
    common.add_argument("--grid-span", type=float, default=None, dest="grid_span",
                        help="half-span of the screen grid (m; natural units in natural mode)")
    common.add_argument("--grid-points", type=int, default=None, dest="grid_points",
                        help="number of screen grid points (default 4096)")
    common.add_argument("--variant", choices=list(VARIANTS), default="calibrated",
                        help="constant convention for the exact pattern")

    parser = argparse.ArgumentParser(
        prog="decofringe",
        description="Double-slit interference of massive particles under collisional decoherence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pattern", parents=[common], help="screen intensity profile -> CSV")
    sp.add_argument("--method", choices=["weak", "exact"], default="weak",
                    help="far-field form or exact closed form (default: weak)")

    sv = sub.add_parser("visibility", parents=[common], help="fringe visibility table")
    sv.add_argument("--method", choices=["weak", "exact"], default="weak")
    sv.add_argument("--fringes", type=int, default=3,
                    help="number of fringe indices to tabulate, starting at 0")

    sub.add_parser("oracle-compare", parents=[common],
                   help="adjudicate exact-pattern constants against the transport solver")

    sw = sub.add_parser("sweep", parents=[common], help="visibility over parameter grids")
    sw.add_argument("--method", choices=["weak", "exact"], default="weak")
    sw.add_argument("--param", action="append",
                    help=f"swept parameter ({', '.join(SWEEPABLE)}); repeatable, max 2")
    sw.add_argument("--values", action="append",
                    help="comma-separated values, one list per --param")
    sw.add_argument("--fringe-index", type=int, default=0, dest="fringe_index",
                    help="fringe index for the visibility columns (default 0)")
    sw.add_argument("--profiles", action="store_true",
                    help="also write one profile CSV per sweep point")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(f"config error: cannot read {args.config}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rc = make_run_config(parse_config_text(text), args)
    except (ConfigError, ValidationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = None
    if args.out is not None:
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            probe = out_dir / ".write_probe"
            probe.touch()
            probe.unlink()
        except OSError as e:
            print(f"io error: output directory {out_dir}: {e}", file=sys.stderr)
            return EXIT_IO

    try:
        if args.command == "pattern":
            return run_pattern(rc, out_dir)
        if args.command == "visibility":
            return run_visibility(rc, out_dir)
        if args.command == "oracle-compare":
            return run_oracle_compare(rc, out_dir)
        return run_sweep(rc, args, out_dir)
    except (ConfigError, ValidationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as e:
        print(f"convergence error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except InternalNumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
