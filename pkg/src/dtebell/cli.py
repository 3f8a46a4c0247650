"""Command-line front end producing machine-readable artifacts.

Subcommands: validate, derive, spectrum, fringes, bell, sweep.  Artifacts
are deterministic: fixed float formatting, sorted JSON keys, no
timestamps, and every JSON document embeds the config hash and tool
version.  CSV column layouts are documented in docs/csv_schema.md.

Exit codes: 0 success; 1 configuration error; 2 numeric/convergence error;
3 feasibility hard-failure under --strict.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, interferometer, scenario, spectrum
from .quadrature import ConvergenceError
from .scenario import ConfigError, ScenarioConfig
from .spectrum import WindowError
from .units import UnitError, parse_quantity

_OUT_ENV = "DTEBELL_OUT"
_FLOAT_FMT = "{:.12e}"


def _config_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, payload: Dict) -> None:
    payload = dict(payload)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = len(columns[0])
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_FLOAT_FMT.format(float(c[i])) for c in columns) + "\n")


def _meta(args, extra: Optional[Dict] = None) -> Dict:
    meta = {
        "tool_version": __version__,
        "config_hash": _config_hash(Path(args.config)),
        "config_path": str(args.config),
    }
    if extra:
        meta.update(extra)
    return meta


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(_OUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> ScenarioConfig:
    return scenario.load_config(args.config)


def _maybe_strict(args, config: ScenarioConfig) -> Optional[int]:
    if getattr(args, "strict", False):
        report = scenario.audit(config)
        if not report.overall:
            print("feasibility audit failed under --strict:", file=sys.stderr)
            print(report.table(), file=sys.stderr)
            return 3
    return None


def _length(text: str) -> float:
    q = parse_quantity(text)
    return q.value


def _build_grid(config: ScenarioConfig, args):
    return spectrum.build_grid(
        config.scales(), config.trap_ground_state(),
        window_sigmas=tuple(args.window_sigmas), points=tuple(args.points))


def cmd_validate(args) -> int:
    config = _load(args)
    report = scenario.audit(config)
    out = _out_dir(args)
    _write_json(out / "feasibility.json", {**_meta(args), "report": report.as_dict()})
    print(report.table())
    return 0 if report.overall else 1


def cmd_derive(args) -> int:
    config = _load(args)
    rc = _maybe_strict(args, config)
    if rc:
        return rc
    out = _out_dir(args)
    doc = scenario.derived_report(config)
    _write_json(out / "derived.json", {**_meta(args), "derived": doc})
    sc = doc["scales"]
    print(f"p0/m = {sc['velocity_p0_over_m'] * 1e3:.3f} mm/s   "
          f"dp/p0 = {sc['delta_p_over_p0']:.4f}   "
          f"sigma_p/p0 = {sc['sigma_p_over_p0']:.4f}")
    print(f"lambda_rel = {sc['lambda_rel'] * 1e6:.2f} um   "
          f"ell_0 = {sc['ell_0'] * 1e3:.2f} mm   "
          f"|C_bg|^2 = {doc['dissociation_probability']:.4f}")
    return 0


def cmd_spectrum(args) -> int:
    config = _load(args)
    rc = _maybe_strict(args, config)
    if rc:
        return rc
    out = _out_dir(args)
    grid = _build_grid(config, args)
    pc, pr = np.meshgrid(grid.p_cm_axis, grid.p_rel_axis, indexing="ij")
    dens = grid.density
    _write_csv(out / "spectrum.csv", ["p_cm", "p_rel", "density"],
               [pc.ravel(), pr.ravel(), dens.ravel()])
    i, j = grid.peak_indices
    norms = spectrum.norm_cross_check(grid.scales, grid.trap)
    _write_json(out / "spectrum_summary.json", {**_meta(args), "spectrum": {
        "p0": grid.scales.p0,
        "delta_p": grid.scales.delta_p,
        "sigma_p_trap": grid.trap.sigma_p,
        "lambda_rel": grid.scales.lambda_rel,
        "points": list(dens.shape),
        "window_sigmas": list(grid.window),
        "window_deficit": grid.deficit,
        "norm_check": {"numeric": norms.numeric, "closed_form": norms.closed_form,
                       "relative_difference": norms.relative_difference},
        "peak": {"p_cm": float(grid.p_cm_axis[i]), "p_rel": float(grid.p_rel_axis[j]),
                 "density": float(dens[i, j])},
        "grid_norm_error": float(abs(dens.sum() * grid.cell_area - 1.0)),
    }})
    print(f"grid {dens.shape[0]}x{dens.shape[1]}, peak at "
          f"(p_cm, p_rel) = ({grid.p_cm_axis[i]:.2e}, {grid.p_rel_axis[j]:.2e}), "
          f"deficit {grid.deficit:.1e}")
    return 0


def _plan(args):
    from .quadrature import IntegrationPlan
    return IntegrationPlan(order=args.order, oscillation_guard=args.guard)


def _scan(config: ScenarioConfig, args) -> "interferometer.FringeScan":
    grid = _build_grid(config, args)
    lo, hi = (_length(args.range[0]), _length(args.range[1]))
    return interferometer.fringe_scan(
        grid, grid.scales, delta_ell_range=(lo, hi), samples=args.samples,
        phi_tau=args.phi_tau, plan=_plan(args))


def cmd_fringes(args) -> int:
    config = _load(args)
    rc = _maybe_strict(args, config)
    if rc:
        return rc
    out = _out_dir(args)
    scan = _scan(config, args)
    _write_csv(out / "fringes.csv",
               ["delta_ell", "P_pp", "P_pm", "P_mp", "P_mm", "envelope"],
               [scan.delta_ell, scan.port(1, 1), scan.port(1, -1),
                scan.port(-1, 1), scan.port(-1, -1), scan.envelope])
    metrics = interferometer.fringe_metrics(scan)
    _write_json(out / "fringes_summary.json", {**_meta(args), "fringes": {
        **metrics,
        "phi_tau": scan.phi_tau,
        "lambda_rel": scan.lambda_rel,
        "ell_0": scan.ell_0,
        "samples": int(scan.delta_ell.size),
        "range": [float(scan.delta_ell[0]), float(scan.delta_ell[-1])],
        "bell_threshold": interferometer.BELL_THRESHOLD,
    }})
    print(f"max visibility {metrics['max_visibility']:.4f}, "
          f"fringe period {metrics['fringe_period'] * 1e6:.2f} um, "
          f"{metrics['periods_above_threshold']:.1f} periods above 1/sqrt(2)")
    return 0


def cmd_bell(args) -> int:
    config = _load(args)
    rc = _maybe_strict(args, config)
    if rc:
        return rc
    out = _out_dir(args)
    grid = _build_grid(config, args)
    best = interferometer.chsh_scan(grid, grid.scales, phi_tau=args.phi_tau,
                                    plan=_plan(args))
    scan = interferometer.fringe_scan(grid, grid.scales,
                                      delta_ell_range=(-30e-6, 30e-6),
                                      samples=121, phi_tau=args.phi_tau,
                                      plan=_plan(args))
    vmax = float(scan.envelope.max())
    _write_json(out / "bell.json", {**_meta(args), "bell": {
        "settings": {"a": best.a, "a_prime": best.a_prime,
                     "b": best.b, "b_prime": best.b_prime},
        "correlations": best.correlations,
        "S_max": best.S,
        "tsirelson_bound": interferometer.TSIRELSON_BOUND,
        "max_visibility_local": vmax,
        "phi_tau": args.phi_tau,
    }})
    print(f"S_max = {best.S:.4f} (classical bound 2, quantum bound "
          f"{interferometer.TSIRELSON_BOUND:.4f})")
    return 0


_SWEEP_SETTERS = ("tau", "pulse_duration", "pulse_height", "trap_depth")


def _sweep_point(config: ScenarioConfig, args, value: float) -> Dict[str, float]:
    import dataclasses

    from .feshbach import PulseSequence

    pulse = config.pulses.pulses[0]
    if args.param == "tau":
        cfg = dataclasses.replace(config, pulses=PulseSequence.double_square(
            config.pulses.base_field, pulse.height, pulse.duration, value))
    elif args.param == "pulse_duration":
        cfg = dataclasses.replace(config, pulses=PulseSequence.double_square(
            config.pulses.base_field, pulse.height, value,
            config.pulses.separation_tau))
    elif args.param == "pulse_height":
        cfg = dataclasses.replace(config, pulses=PulseSequence.double_square(
            config.pulses.base_field, value, pulse.duration,
            config.pulses.separation_tau))
    elif args.param == "trap_depth":
        cfg = dataclasses.replace(
            config, offsets=dataclasses.replace(config.offsets, trap_depth=value))
    else:
        raise ConfigError(f"unknown sweep parameter '{args.param}' "
                          f"(known: {sorted(_SWEEP_SETTERS)})")
    grid = _build_grid(cfg, args)
    scan = interferometer.fringe_scan(
        grid, grid.scales,
        delta_ell_range=(_length(args.range[0]), _length(args.range[1])),
        samples=args.samples, phi_tau=args.phi_tau, plan=_plan(args))
    metrics = interferometer.fringe_metrics(scan)
    row = {"value": value,
           "max_visibility": metrics["max_visibility"],
           "periods_above_threshold": metrics["periods_above_threshold"],
           "fringe_period": metrics["fringe_period"]}
    if args.bell:
        best = interferometer.chsh_scan(grid, grid.scales, phi_tau=args.phi_tau,
                                        plan=_plan(args))
        row["s_max"] = best.S
    else:
        row["s_max"] = math.nan
    return row


def cmd_sweep(args) -> int:
    config = _load(args)
    rc = _maybe_strict(args, config)
    if rc:
        return rc
    out = _out_dir(args)
    lo, hi = _length(args.sweep_range[0]), _length(args.sweep_range[1])
    values = np.linspace(lo, hi, args.sweep_steps)
    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        rows = list(pool.map(lambda v: _sweep_point(config, args, float(v)), values))
    cols = ["value", "max_visibility", "s_max", "periods_above_threshold",
            "fringe_period"]
    _write_csv(out / "sweep.csv", [args.param] + cols[1:],
               [np.array([r[c] for r in rows]) for c in cols])
    _write_json(out / "sweep_summary.json", {**_meta(args), "sweep": {
        "param": args.param, "values": [r["value"] for r in rows],
        "max_visibility": [r["max_visibility"] for r in rows],
        "s_max": [r["s_max"] for r in rows],
    }})
    print(f"swept {args.param} over {len(rows)} points -> sweep.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtebell",
        description="Dissociation-time-entanglement Bell test simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scans: bool = False):
        p.add_argument("--config", default=str(scenario.baseline_path()),
                       help="TOML scenario config (default: bundled li6_baseline)")
        p.add_argument("--out", default=None,
                       help=f"output directory (default: ${_OUT_ENV} or cwd)")
        p.add_argument("--strict", action="store_true",
                       help="exit 3 when a non-advisory feasibility check fails")
        p.add_argument("--window-sigmas", nargs=2, type=float, default=(6.0, 16.0),
                       metavar=("CM", "REL"),
                       help="grid half-widths in units of sigma_p (cm axis) "
                            "and delta_p (rel axis)")
        p.add_argument("--points", nargs=2, type=int, default=(257, 1025),
                       metavar=("N_CM", "N_REL"), help="grid resolution")
        if scans:
            p.add_argument("--phi-tau", dest="phi_tau", type=float, default=0.0,
                           help="early/late relative phase (rad) applied to fringes")
            p.add_argument("--range", nargs=2, default=("-300 um", "300 um"),
                           metavar=("LO", "HI"),
                           help="path-offset scan range, unit strings")
            p.add_argument("--samples", type=int, default=601,
                           help="scan sample count")
            p.add_argument("--guard", type=float, default=math.pi / 4,
                           help="max phase advance per quadrature panel, rad "
                                "(<= pi/4)")
            p.add_argument("--order", type=int, default=10,
                           help="Gauss-Legendre order per panel")

    common(sub.add_parser("validate", help="run the feasibility audit"))
    common(sub.add_parser("derive", help="emit derived scales and optics summary"))
    common(sub.add_parser("spectrum", help="sample the momentum spectrum grid"))
    common(sub.add_parser("fringes", help="joint-detection fringe scan"), scans=True)
    common(sub.add_parser("bell", help="CHSH optimization at optimum overlap"),
           scans=True)
    p_sweep = sub.add_parser("sweep", help="scan one parameter, CSV per point")
    common(p_sweep, scans=True)
    p_sweep.add_argument("--param", required=True, choices=sorted(_SWEEP_SETTERS),
                         help="swept parameter")
    p_sweep.add_argument("--sweep-range", nargs=2, required=True,
                         metavar=("LO", "HI"), help="sweep bounds, unit strings")
    p_sweep.add_argument("--sweep-steps", type=int, default=8)
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="concurrent sweep points")
    p_sweep.add_argument("--bell", action="store_true",
                         help="also optimize CHSH per sweep point (slow)")
    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "derive": cmd_derive,
    "spectrum": cmd_spectrum,
    "fringes": cmd_fringes,
    "bell": cmd_bell,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConvergenceError, WindowError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, UnitError, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:  # console-script wrapper
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
