"""Command-line entry point ``spr``.

    spr <spectrum|polar|inclination|validate|selftest> --config run.json [--out path] [--plot]

Exit status: 0 success, 1 failed validity/self-test, 2 malformed config,
3 physics-domain error.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from .geometry import (GeometryError, GratingSpec, Observation, critical_angle, regime_report,
                       resonance_frequency)
from .packets import Gaussian, LaguerreGauss, PacketError, PacketSpec
from .scans import IntegrationError, ScanRequest, ScanResult, run_scan

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_PHYSICS = 0, 1, 2, 3

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["packet", "grating"],
    "properties": {
        "packet": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "beta"],
            "properties": {
                "type": {"enum": ["lg", "gauss"]},
                "rho0_nm": _POS,
                "ell": {"type": "integer"},
                "sigma_perp_nm": _POS,
                "sigma_z_nm": _POS,
                "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "grating": {
            "type": "object",
            "additionalProperties": False,
            "required": ["d_um", "a_um", "n", "h_um"],
            "properties": {
                "d_um": _POS,
                "a_um": _POS,
                "n": {"oneOf": [{"type": "integer", "minimum": 1}, {"const": "infinite"}]},
                "phi_deg": _NUM,
                "phi_over_phic": _NUM,
                "h_um": _POS,
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["spectrum", "polar", "inclination"]},
                "grid": {"type": "array", "prefixItems": [_NUM, _NUM, {"type": "integer", "minimum": 2}],
                         "minItems": 3, "maxItems": 3},
                "g": {"type": "integer", "minimum": 1},
                "window": _POS,
                "tol": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-2},
                "theta_deg": _NUM,
                "phi_deg": _NUM,
                "formation": {"enum": ["collision", "grating"]},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "format": {"enum": ["csv", "json"]},
                "plot": {"type": "boolean"},
                "gauss_q2_sign": {"enum": ["+1", "-1"]},
            },
        },
    },
}

DEFAULT_GRIDS = {"spectrum": [0.998, 1.002, 401], "polar": [30.0, 150.0, 61], "inclination": [0.0, 1.5, 16]}
SCAN_DEFAULTS = {"g": 1, "window": 10.0, "tol": 1e-6, "theta_deg": 90.0, "phi_deg": 90.0, "formation": "collision"}
OUTPUT_DEFAULTS = {"format": "csv", "plot": False, "gauss_q2_sign": "-1"}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _path(parts) -> str:
    return ".".join(str(p) for p in parts) or "<root>"


def resolve_config(raw: dict, kind: str | None = None) -> dict:
    """Validate ``raw`` and fill every default; the result is echoed into outputs."""
    errors = sorted(Draft202012Validator(SCHEMA).iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(_path(e.absolute_path), e.message)
    cfg = copy.deepcopy(raw)
    pk = cfg["packet"]
    lg_keys, gauss_keys = {"rho0_nm", "ell"}, {"sigma_perp_nm", "sigma_z_nm"}
    present = set(pk) - {"type", "beta"}
    want, other = (lg_keys, gauss_keys) if pk["type"] == "lg" else (gauss_keys, lg_keys)
    if present & other:
        raise ConfigError(f"packet.{sorted(present & other)[0]}", f"not allowed for packet type {pk['type']!r}")
    missing = sorted(want - present)
    if missing:
        raise ConfigError(f"packet.{missing[0]}", f"required for packet type {pk['type']!r}")
    gr = cfg["grating"]
    if "phi_deg" in gr and "phi_over_phic" in gr:
        raise ConfigError("grating.phi_over_phic", "phi_deg and phi_over_phic are mutually exclusive")
    if "phi_deg" not in gr and "phi_over_phic" not in gr:
        gr["phi_deg"] = 0.0
    if gr["a_um"] > gr["d_um"]:
        raise ConfigError("grating.a_um", "strip width must not exceed the period")
    scan = cfg.setdefault("scan", {})
    if kind is not None:
        scan["kind"] = kind
    scan.setdefault("kind", "spectrum")
    for k, v in SCAN_DEFAULTS.items():
        scan.setdefault(k, v)
    scan.setdefault("grid", list(DEFAULT_GRIDS[scan["kind"]]))
    out = cfg.setdefault("output", {})
    for k, v in OUTPUT_DEFAULTS.items():
        out.setdefault(k, v)
    return cfg


def build_packet(cfg: dict) -> PacketSpec:
    pk = cfg["packet"]
    sign = int(cfg["output"]["gauss_q2_sign"])
    if pk["type"] == "lg":
        variant = LaguerreGauss(pk["rho0_nm"] * 1e-7, pk["ell"])
    else:
        variant = Gaussian(pk["sigma_perp_nm"] * 1e-7, pk["sigma_z_nm"] * 1e-7)
    return PacketSpec(variant, pk["beta"], gauss_q2_sign=sign)


def build_grating(cfg: dict, packet: PacketSpec) -> GratingSpec:
    gr = cfg["grating"]
    if "phi_over_phic" in gr:
        phic = critical_angle(packet)
        if phic == 0:
            raise GeometryError("phi_over_phic needs a spreading packet (finite critical angle)")
        phi = gr["phi_over_phic"] * phic
    else:
        phi = math.radians(gr["phi_deg"])
    n = math.inf if gr["n"] == "infinite" else int(gr["n"])
    return GratingSpec(gr["d_um"] * 1e-4, gr["a_um"] * 1e-4, n, phi, gr["h_um"] * 1e-4)


def build_request(cfg: dict) -> ScanRequest:
    packet = build_packet(cfg)
    grating = build_grating(cfg, packet)
    s = cfg["scan"]
    return ScanRequest(s["kind"], packet, grating, tuple(s["grid"]), math.radians(s["theta_deg"]),
                       math.radians(s["phi_deg"]), s["g"], s["window"], s["tol"], s["formation"])


# --- output --------------------------------------------------------------


def format_number(x: float) -> str:
    return f"{x:.11e}"


def write_csv(result: ScanResult, cfg: dict, path) -> None:
    lines = ["# spr scan output", "# config: " + json.dumps(cfg, sort_keys=True)]
    lines.append(",".join(result.columns))
    for x, row in zip(result.axis, result.rows):
        lines.append(",".join(format_number(v) for v in (x, *row)))
    _write_text(path, "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items() if k != "request"}
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(result: ScanResult, cfg: dict, path) -> None:
    doc = {
        "config": cfg,
        "columns": list(result.columns),
        "rows": [[float(x), *map(float, row)] for x, row in zip(result.axis, result.rows)],
        "errors": result.errors.tolist(),
        "metadata": _jsonable(result.metadata),
    }
    _write_text(path, json.dumps(doc, indent=1) + "\n")


def _write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_plot(result: ScanResult, path: Path) -> Path | None:
    """Best-effort SVG line chart of every breakdown column; never raises."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except Exception:
        return None
    try:
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in ("w_ee", "w_total", "w_eq0", "w_eq2", "w_qq"):
            y = np.abs(result.column(name))
            if np.any(y > 0):
                ax.plot(result.axis, y, label=name)
        ax.set_yscale("log")
        ax.set_xlabel(result.axis_name)
        ax.set_ylabel("|w| (arb. units)")
        ax.legend(fontsize="small")
        fig.tight_layout()
        svg = path.with_suffix(".svg")
        fig.savefig(svg, format="svg")
        plt.close(fig)
        return svg
    except Exception:
        return None


# --- subcommands ---------------------------------------------------------


def _report_lines(packet: PacketSpec, grating: GratingSpec, cfg: dict):
    s = cfg["scan"]
    theta, phi = math.radians(s["theta_deg"]), math.radians(s["phi_deg"])
    omega = resonance_frequency(s["g"], theta, grating.phi_i, packet.beta, grating.d)
    rep = regime_report(packet, grating, Observation(theta, phi, omega))
    rows = [
        ("phi_c_deg", math.degrees(rep.phi_c)),
        ("phi_i_deg", math.degrees(grating.phi_i)),
        ("t_max_cm", rep.t_max),
        ("n_max", rep.n_max),
        ("n_max_estimate", rep.n_max_estimate),
        ("n_eff", rep.n_eff),
        ("h_eff_um", rep.h_eff * 1e4),
        ("wavelength_um", rep.wavelength * 1e4),
        ("eta_q", rep.eta_q),
        ("eta_q0", rep.eta_q0),
        ("eta_q1", rep.eta_q1),
        ("eta_q2", rep.eta_q2),
        ("multipole_valid", rep.multipole_valid),
        ("spread_valid", rep.spread_valid),
        ("near_critical", rep.near_critical),
    ]
    return rep, [f"{k} = {v:.6g}" if isinstance(v, float) else f"{k} = {v}" for k, v in rows]


def cmd_validate(cfg: dict) -> int:
    packet = build_packet(cfg)
    grating = build_grating(cfg, packet)
    rep, lines = _report_lines(packet, grating, cfg)
    print("\n".join(lines))
    return EXIT_OK if rep.multipole_valid else EXIT_FAIL


def cmd_scan(cfg: dict, out: str | None, plot: bool) -> int:
    req = build_request(cfg)
    result = run_scan(req)
    path = out if out is not None else cfg["output"].get("path")
    fmt = cfg["output"]["format"]
    if path is not None and str(path).endswith(".json"):
        fmt = "json"
    (write_json if fmt == "json" else write_csv)(result, cfg, path)
    if (plot or cfg["output"]["plot"]) and path not in (None, "-"):
        svg = write_plot(result, Path(path))
        if svg is None:
            print("plot skipped (matplotlib unavailable or failed)", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(skip_fields: bool = False) -> int:
    from .validation import selftest_checks

    results = []
    for check in selftest_checks(include_field_grid=not skip_fields):
        print(check.line(), flush=True)
        results.append(check)
    failed = sum(not c.passed for c in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def load_config(path: str, kind: str | None) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    return resolve_config(raw, kind)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spr", description="Smith-Purcell radiation of electron wave packets")
    ap.add_argument("command", choices=["spectrum", "polar", "inclination", "validate", "selftest"])
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output path ('-' for stdout); .json selects JSON output")
    ap.add_argument("--plot", action="store_true", help="also write an SVG next to the output")
    ap.add_argument("--quick", action="store_true", help="selftest: skip the brute-force field grid")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args.quick)
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        kind = args.command if args.command != "validate" else None
        cfg = load_config(args.config, kind)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_scan(cfg, args.out, args.plot)
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeometryError, PacketError, IntegrationError, ValueError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
