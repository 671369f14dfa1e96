"""Command-line front end.

    jacobi-density <bands|density|spectrum|moments|validate|plot> --config run.json [options]

Config files are JSON, e.g.::

    {"t": 2, "a": [0, 0], "b": [1, 2], "phi": {"kind": "power", "gamma": 1},
     "grid": {"zmin": -3, "zmax": 3, "points": 301}, "n": 2000}

Exit status is 0 on success, 1 when ``validate`` thresholds fail and 2 on any
error; errors are also printed to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .bands import BandStructure, band_edges, discriminant
from .coeffs import PeriodicCoefficients
from .density import rho_curve, support_hull
from .errors import BandStructureError, ConfigError, NonConvergedQuadrature, UnsupportedForEmpirical
from .moments import moment_report
from .scaling import ScalingSpec
from .spectrum import histogram, ks_distance, scaled_spectrum

SUBCOMMANDS = ("bands", "density", "spectrum", "validate", "moments", "plot")
DEFAULT_POINTS = 512
DEFAULT_MAX_ORDER = 8
DEFAULT_KS_THRESHOLD = 0.05
DEFAULT_MOMENT_TOLERANCE = 0.02
HIST_BINS = 80


@dataclass(frozen=True)
class RunConfig:
    coeffs: PeriodicCoefficients
    scaling: ScalingSpec
    grid: tuple[float | None, float | None, int] | None = None
    n: int | None = None
    moments_max: int | None = None
    format: str = "csv"
    output: str | None = None
    ks_threshold: float | None = None
    moment_tolerance: float | None = None


def _number(obj, path: str, *, integer: bool = False):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(path, f"expected a number, got {obj!r}")
    if integer and (not float(obj).is_integer()):
        raise ConfigError(path, f"expected an integer, got {obj!r}")
    if not math.isfinite(obj):
        raise ConfigError(path, "must be finite")
    return int(obj) if integer else float(obj)


def _number_list(obj, path: str) -> list[float]:
    if not isinstance(obj, list):
        raise ConfigError(path, "expected a list of numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(obj)]


def _parse_scaling(obj) -> ScalingSpec:
    if not isinstance(obj, dict):
        raise ConfigError("phi", "expected an object with a 'kind' field")
    kind = obj.get("kind")
    if kind == "constant":
        return ScalingSpec.constant()
    if kind == "power":
        gamma = _number(obj.get("gamma"), "phi.gamma")
        if gamma <= 0:
            raise ConfigError("phi.gamma", "must be positive")
        return ScalingSpec.power(gamma)
    if kind == "table":
        pts = obj.get("points")
        if not isinstance(pts, list) or not all(isinstance(p, list) and len(p) == 2 for p in pts):
            raise ConfigError("phi.points", "expected a list of [omega, g] pairs")
        parsed = [[_number(v, f"phi.points[{i}][{j}]") for j, v in enumerate(p)] for i, p in enumerate(pts)]
        try:
            return ScalingSpec.tabulated(parsed)
        except ValueError as exc:
            raise ConfigError("phi.points", str(exc)) from None
    raise ConfigError("phi.kind", f"expected 'constant', 'power' or 'table', got {kind!r}")


def parse_config(text: str) -> RunConfig:
    """Validate a JSON run configuration."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("$", "expected a JSON object")
    a = _number_list(obj.get("a"), "a")
    b = _number_list(obj.get("b"), "b")
    t = _number(obj.get("t", len(a)), "t", integer=True)
    if t < 1:
        raise ConfigError("t", "period must be at least 1")
    if len(a) != t:
        raise ConfigError("a", f"expected {t} entries, got {len(a)}")
    if len(b) != t:
        raise ConfigError("b", f"expected {t} entries, got {len(b)}")
    for i, v in enumerate(b):
        if v == 0:
            raise ConfigError(f"b[{i}]", "off-diagonal limits must be nonzero")
    coeffs = PeriodicCoefficients(t, tuple(a), tuple(b))
    scaling = _parse_scaling(obj.get("phi", {"kind": "constant"}))

    grid = None
    if obj.get("grid") is not None:
        g = obj["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid", "expected an object with zmin, zmax, points")
        # a missing end is filled in from the support hull at run time
        zmin = None if g.get("zmin") is None else _number(g["zmin"], "grid.zmin")
        zmax = None if g.get("zmax") is None else _number(g["zmax"], "grid.zmax")
        points = _number(g.get("points", DEFAULT_POINTS), "grid.points", integer=True)
        if points < 2:
            raise ConfigError("grid.points", "need at least 2 points")
        if zmin is not None and zmax is not None and not zmin < zmax:
            raise ConfigError("grid.zmax", "must exceed grid.zmin")
        grid = (zmin, zmax, points)
    n = obj.get("n")
    if n is not None:
        n = _number(n, "n", integer=True)
        if n < 1:
            raise ConfigError("n", "must be at least 1")
    moments_max = obj.get("moments_max")
    if moments_max is not None:
        moments_max = _number(moments_max, "moments_max", integer=True)
        if moments_max < 0:
            raise ConfigError("moments_max", "must be nonnegative")
    fmt = obj.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", "expected 'csv' or 'json'")
    output = obj.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")
    thresholds = {}
    for key in ("ks_threshold", "moment_tolerance"):
        val = obj.get(key)
        if val is not None:
            val = _number(val, key)
            if val <= 0:
                raise ConfigError(key, "must be positive")
        thresholds[key] = val
    return RunConfig(coeffs, scaling, grid, n, moments_max, fmt, output, **thresholds)


def emit_config(cfg: RunConfig) -> str:
    """Canonical JSON for ``cfg``; ``parse_config`` inverts it."""
    obj = {
        "t": cfg.coeffs.t,
        "a": list(cfg.coeffs.a),
        "b": list(cfg.coeffs.b),
        "phi": cfg.scaling.to_json(),
        "format": cfg.format,
    }
    if cfg.grid is not None:
        grid = {"zmin": cfg.grid[0], "zmax": cfg.grid[1], "points": cfg.grid[2]}
        obj["grid"] = {k: v for k, v in grid.items() if v is not None}
    for key in ("n", "moments_max", "output", "ks_threshold", "moment_tolerance"):
        val = getattr(cfg, key)
        if val is not None:
            obj[key] = val
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# Output helpers.  Floats are written with repr so files are byte-stable.


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _bands(cfg: RunConfig) -> BandStructure:
    return band_edges(discriminant(cfg.coeffs), cfg.coeffs.t)


def _grid(cfg: RunConfig, bands: BandStructure) -> tuple[float, float, int]:
    lo, hi = support_hull(bands, cfg.scaling)
    if cfg.grid is None:
        return lo, hi, DEFAULT_POINTS
    zmin, zmax, points = cfg.grid
    zmin = lo if zmin is None else zmin
    zmax = hi if zmax is None else zmax
    if not zmin < zmax:
        raise ConfigError("grid", f"empty grid range [{zmin!r}, {zmax!r}] after filling from the support")
    return zmin, zmax, points


def _need_n(cfg: RunConfig, what: str) -> int:
    if cfg.n is None:
        raise ConfigError("n", f"the {what} subcommand needs a block count n")
    return cfg.n


def _moment_threshold(cfg: RunConfig, bands: BandStructure, M: int) -> float:
    # scale by the spectral radius of L so the tolerance is relative across orders
    radius = max(abs(bands.edges[0]), abs(bands.edges[-1]))
    tol = cfg.moment_tolerance if cfg.moment_tolerance is not None else DEFAULT_MOMENT_TOLERANCE
    return tol * radius**M


def cmd_bands(cfg: RunConfig, threads: int) -> int:
    bands = _bands(cfg)
    rows = [(i + 1, mu, nu) for i, (mu, nu) in enumerate(bands.bands)]
    coef = [float(c) for c in bands.S.coef]
    if cfg.format == "json":
        _write(
            _json_text({"bands": [{"band": i, "mu": mu, "nu": nu} for i, mu, nu in rows], "S": coef}),
            cfg.output,
        )
        return 0
    table = _csv_text(["band", "mu", "nu"], rows)
    s_table = _csv_text(["degree", "coefficient"], enumerate(coef))
    if cfg.output is None:
        _write(table + "\n" + s_table, None)
    else:
        _write(table, cfg.output)
        out = Path(cfg.output)
        _write(s_table, str(out.with_name(out.stem + "_S" + out.suffix)))
    return 0


def _density_text(cfg: RunConfig, bands: BandStructure, threads: int) -> str:
    zmin, zmax, points = _grid(cfg, bands)
    curve = rho_curve(bands, cfg.scaling, zmin, zmax, points, threads=threads)
    if cfg.format == "json":
        rows = [{"z": z, "rho": None if s else r, "singular": s} for z, r, s in curve.rows()]
        return _json_text({"density": rows})
    return _csv_text(["z", "rho", "singular"], curve.rows())


def cmd_density(cfg: RunConfig, threads: int) -> int:
    _write(_density_text(cfg, _bands(cfg), threads), cfg.output)
    return 0


def cmd_spectrum(cfg: RunConfig, threads: int) -> int:
    spec = scaled_spectrum(cfg.coeffs, cfg.scaling, _need_n(cfg, "spectrum"), threads=threads)
    vals = [float(v) for v in spec.values]
    if cfg.format == "json":
        _write(_json_text({"n": spec.n, "t": spec.t, "eigenvalues": vals}), cfg.output)
    else:
        _write(_csv_text(["index", "z"], enumerate(vals, start=1)), cfg.output)
    return 0


MOMENT_COLUMNS = ["M", "K_M", "omega_factor", "m_theory", "m_empirical", "abs_error"]


def _moment_reports(cfg: RunConfig, spec):
    top = cfg.moments_max if cfg.moments_max is not None else DEFAULT_MAX_ORDER
    return [moment_report(cfg.coeffs, cfg.scaling, M, spec) for M in range(top + 1)]


def cmd_moments(cfg: RunConfig, threads: int) -> int:
    spec = None
    if cfg.n is not None:
        spec = scaled_spectrum(cfg.coeffs, cfg.scaling, cfg.n, threads=threads)
    reports = _moment_reports(cfg, spec)
    if cfg.format == "json":
        rows = [dict(zip(MOMENT_COLUMNS, r.row())) for r in reports]
        _write(_json_text({"moments": rows}), cfg.output)
    else:
        _write(_csv_text(MOMENT_COLUMNS, (r.row() for r in reports)), cfg.output)
    return 0


def cmd_validate(cfg: RunConfig, threads: int) -> int:
    n = _need_n(cfg, "validate")
    bands = _bands(cfg)
    spec = scaled_spectrum(cfg.coeffs, cfg.scaling, n, threads=threads)
    ks = ks_distance(spec, bands, cfg.scaling)
    ks_thr = cfg.ks_threshold if cfg.ks_threshold is not None else DEFAULT_KS_THRESHOLD
    checks = [("ks_distance", ks, ks_thr, ks <= ks_thr)]
    reports = _moment_reports(cfg, spec)
    for r in reports:
        thr = _moment_threshold(cfg, bands, r.M)
        checks.append((f"moment_{r.M}", r.abs_error, thr, r.abs_error <= thr))
    ok = all(c[3] for c in checks)
    if cfg.format == "json":
        obj = {
            "n": n,
            "pass": ok,
            "checks": [{"check": c, "value": v, "threshold": t, "pass": p} for c, v, t, p in checks],
            "moments": [dict(zip(MOMENT_COLUMNS, r.row())) for r in reports],
        }
        _write(_json_text(obj), cfg.output)
    else:
        _write(_csv_text(["check", "value", "threshold", "pass"], checks), cfg.output)
    return 0 if ok else 1


GNUPLOT_TEMPLATE = """\
# gnuplot script; run with: gnuplot {script}
set datafile separator ','
set datafile missing 'inf'
set terminal pngcairo size 960,600
set output '{png}'
set xlabel 'z'
set ylabel 'rho(z)'
set key top right
set style fill transparent solid 0.35 noborder
plot {plots}
"""


def cmd_plot(cfg: RunConfig, threads: int) -> int:
    bands = _bands(cfg)
    out = Path(cfg.output or "density.csv")
    if out.suffix != ".csv":
        out = out.with_suffix(".csv")
    plot_cfg = replace(cfg, format="csv")
    _write(_density_text(plot_cfg, bands, threads), str(out))
    plots = [f"'{out.name}' every ::1 using 1:2 with lines lw 2 title 'limit density'"]
    if cfg.n is not None:
        spec = scaled_spectrum(cfg.coeffs, cfg.scaling, cfg.n, threads=threads)
        zmin, zmax, _ = _grid(cfg, bands)
        hist = histogram(spec, HIST_BINS, zmin, zmax)
        hist_path = out.with_name(out.stem + "_hist.csv")
        _write(_csv_text(["z", "density"], ((float(c), float(d)) for c, d in hist)), str(hist_path))
        plots.insert(0, f"'{hist_path.name}' every ::1 using 1:2 with boxes title 'eigenvalues, n={cfg.n}'")
    script = out.with_suffix(".gp")
    text = GNUPLOT_TEMPLATE.format(script=script.name, png=out.with_suffix(".png").name, plots=", \\\n     ".join(plots))
    _write(text, str(script))
    return 0


COMMANDS = {
    "bands": cmd_bands,
    "density": cmd_density,
    "spectrum": cmd_spectrum,
    "validate": cmd_validate,
    "moments": cmd_moments,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacobi-density", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--output", help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--n", type=int, help="block count of the truncated matrix")
    p.add_argument("--zmin", type=float)
    p.add_argument("--zmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--max-order", type=int, dest="max_order", help="highest moment order")
    p.add_argument("--ks-threshold", type=float, dest="ks_threshold")
    p.add_argument("--threads", type=int, help="worker threads (default: $JACOBI_DENSITY_THREADS or 1)")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    obj = json.loads(emit_config(cfg))
    if args.output is not None:
        obj["output"] = args.output
    if args.format is not None:
        obj["format"] = args.format
    if args.n is not None:
        obj["n"] = args.n
    if args.max_order is not None:
        obj["moments_max"] = args.max_order
    if args.ks_threshold is not None:
        obj["ks_threshold"] = args.ks_threshold
    if args.zmin is not None or args.zmax is not None or args.points is not None:
        grid = dict(obj.get("grid") or {})
        for key, val in (("zmin", args.zmin), ("zmax", args.zmax), ("points", args.points)):
            if val is not None:
                grid[key] = val
        grid.setdefault("points", DEFAULT_POINTS)
        obj["grid"] = grid
    return parse_config(json.dumps(obj))


def _threads(args) -> int:
    if args.threads is not None:
        val = args.threads
    else:
        env = os.environ.get("JACOBI_DENSITY_THREADS")
        try:
            val = int(env) if env else 1
        except ValueError:
            raise ConfigError("JACOBI_DENSITY_THREADS", f"expected an integer, got {env!r}") from None
    if val < 1:
        raise ConfigError("threads", "must be at least 1")
    return val


def _error(kind: str, exc: Exception, **extra) -> int:
    obj = {"error": kind, "message": str(exc), **extra}
    sys.stderr.write(json.dumps(obj, sort_keys=True) + "\n")
    return 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(parse_config(Path(args.config).read_text()), args)
        return COMMANDS[args.subcommand](cfg, _threads(args))
    except ConfigError as exc:
        return _error("CONFIG_ERROR", exc, path=exc.path)
    except NonConvergedQuadrature as exc:
        return _error("NONCONVERGED_QUADRATURE", exc, z=exc.z)
    except UnsupportedForEmpirical as exc:
        return _error("UNSUPPORTED_FOR_EMPIRICAL", exc)
    except BandStructureError as exc:
        return _error("BAND_STRUCTURE_ERROR", exc)
    except OSError as exc:
        return _error("IO_ERROR", exc)


if __name__ == "__main__":
    sys.exit(main())
