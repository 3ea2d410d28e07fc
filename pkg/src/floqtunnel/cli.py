"""Command-line front end.

One JSON config document describes a run:

    {
      "barrier":  {"V": 1.0, "L": 5.375},
      "drive":    {"beta": 1.74, "omega": 0.0075, "eta": 0.0},
      "incident": {"omega0": 0.625}                      # or
      "incident": {"range": {"min": 0.78, "max": 0.88, "steps": 400}},
      "solver":   {"tol_edge": 1e-12, "tol_conv": 1e-10, "n_cap": 65536},
      "output":   {"dir": "out"}
    }

Subcommands: spectrum, scan, resonances, compare, validate, oracle.
Outputs are deterministic: fixed row order, shortest round-trip float
formatting, no timestamps (JSON carries only a generated_by version tag).

Exit codes: 0 success, 1 validation-suite failure, 2 configuration error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, airyapprox, observables, timedomain
from .errors import FloqtunnelError, NonConvergenceError, ParameterError, ScanError
from .floquet import SolverOptions, flux_balance, solve
from .model import BarrierSpec, DriveSpec, IncidentSpec
from .observables import find_resonances, scan, spectrum

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


def _need(cfg: dict, section: str, key: str, default=None, required=True):
    sec = cfg.get(section)
    if sec is None:
        if required:
            raise ConfigError(f"missing config section '{section}'")
        return default
    if key not in sec:
        if required:
            raise ConfigError(f"missing config key '{section}.{key}'")
        return default
    return sec[key]


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not text.strip():
        raise ConfigError("config file is empty")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def parse_physics(cfg: dict):
    try:
        barrier = BarrierSpec(
            height=float(_need(cfg, "barrier", "V")),
            half_length=float(_need(cfg, "barrier", "L")),
        )
        drive = DriveSpec(
            beta=float(_need(cfg, "drive", "beta")),
            omega=float(_need(cfg, "drive", "omega")),
            eta=float(_need(cfg, "drive", "eta", default=0.0, required=False)),
        )
    except (TypeError, ValueError, ParameterError) as exc:
        raise ConfigError(str(exc)) from exc
    return barrier, drive


def parse_incident_single(cfg: dict) -> IncidentSpec:
    inc = cfg.get("incident") or {}
    if "range" in inc:
        raise ConfigError("incident.range given but this command needs incident.omega0")
    try:
        return IncidentSpec(float(_need(cfg, "incident", "omega0")))
    except (TypeError, ValueError, ParameterError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_incident_range(cfg: dict) -> np.ndarray:
    inc = cfg.get("incident") or {}
    if "omega0" in inc and "range" not in inc:
        raise ConfigError("incident.omega0 given but this command needs incident.range")
    rng = inc.get("range")
    if rng is None:
        raise ConfigError("missing config key 'incident.range'")
    try:
        lo, hi, steps = float(rng["min"]), float(rng["max"]), int(rng["steps"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"incident.range needs min, max, steps: {exc}") from exc
    if not (hi > lo):
        raise ConfigError("incident.range.max: must exceed incident.range.min")
    if steps < 2:
        raise ConfigError("incident.range.steps: must be >= 2")
    return np.linspace(lo, hi, steps)


def parse_solver(cfg: dict) -> SolverOptions:
    sec = cfg.get("solver") or {}
    try:
        return SolverOptions(
            tol_edge=float(sec.get("tol_edge", 1e-12)),
            tol_conv=float(sec.get("tol_conv", 1e-10)),
            n_cap=int(sec.get("n_cap", 2**16)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver options: {exc}") from exc


def output_dir(cfg: dict, override: str | None) -> Path:
    d = override or _need(cfg, "output", "dir", default=".", required=False)
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["generated_by"] = f"floqtunnel {__version__}"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_spectrum(cfg: dict, args) -> int:
    barrier, drive = parse_physics(cfg)
    incident = parse_incident_single(cfg)
    options = parse_solver(cfg)
    out = output_dir(cfg, args.out)
    sol = solve(barrier, drive, incident, options)
    spec = spectrum(sol)
    rows = [
        (int(n), float(e), float(a), float(w))
        for n, e, a, w in zip(spec.ns, spec.energy, spec.abs_s, spec.flux_weight)
    ]
    _write_csv(out / "spectrum.csv", ["n", "E", "abs_s", "flux_weight"], rows)
    print(f"wrote {out / 'spectrum.csv'} ({len(rows)} channels, "
          f"flux deficit {flux_balance(sol):.2e})")
    return EXIT_OK


def cmd_scan(cfg: dict, args, refine: bool) -> int:
    barrier, drive = parse_physics(cfg)
    omegas = parse_incident_range(cfg)
    options = parse_solver(cfg)
    out = output_dir(cfg, args.out)
    result = scan(barrier, drive, omegas, options, jobs=args.jobs)
    rows = [
        (float(om), float(oa), float(fl), int(cv))
        for om, oa, fl, cv in zip(
            result.omega0, result.omega_act, result.total_flux, result.converged
        )
    ]
    _write_csv(out / "scan.csv", ["omega0", "omega_act", "total_flux", "converged"], rows)

    found = find_resonances(result, barrier, drive, refine=refine, options=options)
    with warnings.catch_warnings():
        # deliberately over-ask; out-of-range orders are dropped
        warnings.simplefilter("ignore")
        predictions = airyapprox.nonactivated_energies(barrier, drive, range(0, 200))
    entries = []
    for res in found:
        if predictions:
            m_pred, om_pred = min(predictions, key=lambda t: abs(t[1] - res.omega0))
        else:
            m_pred, om_pred = -1, math.nan
        entries.append(
            {
                "m": m_pred,
                "omega_m_numeric": res.omega0,
                "omega_m_eq21": om_pred,
                "depth": res.depth,
            }
        )
    _write_json(out / "resonances.json", {"resonances": entries})
    print(f"wrote {out / 'scan.csv'} ({len(rows)} points) and "
          f"{out / 'resonances.json'} ({len(entries)} minima)")
    return EXIT_OK


def cmd_compare(cfg: dict, args) -> int:
    barrier, drive = parse_physics(cfg)
    incident = parse_incident_single(cfg)
    options = parse_solver(cfg)
    out = output_dir(cfg, args.out)
    rep = observables.compare_exact_analytic(barrier, drive, incident, options)
    rows = [
        (int(n), float(incident.omega0 + drive.omega * n), float(s), float(g))
        for n, s, g in zip(rep.ns, rep.abs_s, rep.abs_g)
    ]
    _write_csv(out / "compare.csv", ["n", "E", "abs_s", "abs_g_scaled"], rows)
    print(
        f"wrote {out / 'compare.csv'}; lobe correlation {rep.shape_corr:.3f}, "
        f"median high-side ratio {rep.magnitude_ratio:.3f}"
    )
    return EXIT_OK


def cmd_validate(cfg: dict, args) -> int:
    barrier, drive = parse_physics(cfg)
    options = parse_solver(cfg)
    inc_sec = cfg.get("incident") or {}
    if "omega0" in inc_sec:
        incident = parse_incident_single(cfg)
    else:
        incident = IncidentSpec(0.8 * barrier.height)
    out = output_dir(cfg, args.out)

    checks = []

    def record(name: str, residual: float, bound: float):
        checks.append(
            {"name": name, "residual": residual, "bound": bound, "pass": residual <= bound}
        )

    # flux balance of a converged solve
    try:
        sol = solve(barrier, drive, incident, options)
        record("flux_balance", flux_balance(sol), 1e-8)
    except NonConvergenceError:
        checks.append(
            {"name": "flux_balance", "residual": math.inf, "bound": 1e-8, "pass": False}
        )
        sol = None

    # banded vs dense on the solved system
    if sol is not None:
        from .floquet import assemble

        ab, rhs = assemble(sol.grid, sol.channels, drive)
        n = len(rhs)
        dense = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        dense[idx, idx] = ab[1]
        dense[idx[:-1], idx[1:]] = ab[0, 1:]
        dense[idx[1:], idx[:-1]] = ab[2, :-1]
        s_dense = np.linalg.solve(dense, rhs)
        rel = float(np.abs(s_dense - sol.s).max() / np.abs(sol.s).max())
        record("dense_oracle_equivalence", rel, 1e-10)

    # xi0 dual formula identity
    if incident.omega0 < barrier.height and drive.beta > 0:
        params = airyapprox.regime_params(barrier, drive, incident)
        a = airyapprox.xi(0.0, params)
        b = airyapprox.xi0_closed_form(barrier, drive, incident)
        rel = abs(a - b) / max(abs(b), 1e-30)
        record("xi0_identity", rel, 1e-12)

    # Airy Wronskian on a grid
    from .airyfn import airy

    xs = np.linspace(-20.0, 20.0, 641)
    vals = airy(xs)
    wr = vals.wronskian()
    record("airy_wronskian", float(np.abs(wr * math.pi - 1.0).max()), 1e-10)

    payload = {"checks": checks, "all_pass": all(c["pass"] for c in checks)}
    _write_json(out / "validate.json", payload)
    for c in checks:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: "
              f"residual {c['residual']:.3e} (bound {c['bound']:.1e})")
    return EXIT_OK if payload["all_pass"] else EXIT_VALIDATION


def cmd_oracle(cfg: dict, args) -> int:
    barrier, drive = parse_physics(cfg)
    incident = parse_incident_single(cfg)
    out = output_dir(cfg, args.out)
    osec = cfg.get("oracle") or {}
    k0 = math.sqrt(incident.omega0)
    width = float(osec.get("packet_width", 8.0 / (drive.omega * k0) ** 0.5))
    t_record = float(osec.get("record_time", 10.0 * 2.0 * math.pi / drive.omega))
    center = float(osec.get("packet_center", -(barrier.half_length + 5.0 * width)))
    t_total = float(osec.get("total_time", abs(center) / (2.0 * k0) + t_record))
    # both walls placed out of echo range of the fastest driven sidebands
    v_fast = 2.0 * (math.sqrt(barrier.height + 0.25 * drive.beta**2) + 2.0 / width)
    detector_x = float(osec.get("detector_x", barrier.half_length + 5.0))
    x_max = float(osec.get("x_max", detector_x + 2.0 + 0.5 * v_fast * t_total))
    x_min = float(
        osec.get("x_min", min(center - 6.0 * width, -0.5 * v_fast * t_total - 2.0))
    )
    grid = timedomain.GridConfig(
        x_min=x_min,
        x_max=x_max,
        dx=float(osec.get("dx", 0.05)),
        dt=float(osec.get("dt", 0.1)),
        total_time=t_total,
        delta_width=float(osec.get("delta_width", 0.1)),
    )
    packet = timedomain.WavepacketSpec(center=center, width=width, k0=k0)
    series = timedomain.propagate(grid, packet, barrier, drive, detector_x)
    peaks = timedomain.sideband_spectrum(series, min_resolution=drive.omega / 4.0)
    rows = [(float(f), float(p)) for f, p in peaks[: int(osec.get("max_peaks", 12))]]
    _write_csv(out / "oracle_peaks.csv", ["omega", "power"], rows)
    chans = timedomain.channel_powers(series, incident.omega0, drive.omega)
    _write_csv(out / "oracle_channels.csv", ["n", "E", "power"],
               [(int(n), float(e), float(p)) for n, e, p in chans])
    if args.dump:
        timedomain.write_dump(series, out / "oracle_series.bin")
    print(f"wrote {out / 'oracle_peaks.csv'} and {out / 'oracle_channels.csv'} "
          f"(norm drift {series.norm_drift:.2e})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="floqtunnel",
        description="Sideband solver for tunneling through an oscillating-delta barrier",
    )
    p.add_argument("--version", action="version", version=f"floqtunnel {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, hlp in [
        ("spectrum", "sideband spectrum at one incident energy"),
        ("scan", "activation energy over a range of incident energies"),
        ("resonances", "scan plus golden-section refinement of the minima"),
        ("compare", "exact spectrum against the analytic Airy overlay"),
        ("validate", "run the built-in invariant suite"),
        ("oracle", "time-domain wavepacket cross-check"),
    ]:
        q = sub.add_parser(name, help=hlp)
        q.add_argument("--config", required=(name != "validate"), help="JSON config path")
        q.add_argument("--out", default=None, help="output directory (overrides config)")
        q.add_argument("--jobs", type=int, default=1, help="parallel solves for scans")
        if name == "oracle":
            q.add_argument("--dump", action="store_true", help="write raw detector record")
    return p


_DEFAULT_VALIDATE_CFG = {
    "barrier": {"V": 1.0, "L": 5.0},
    "drive": {"beta": 1.5, "omega": 0.01, "eta": 0.0},
    "incident": {"omega0": 0.8},
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate" and not args.config:
            cfg = _DEFAULT_VALIDATE_CFG
        else:
            cfg = load_config(args.config)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args)
        if args.command == "scan":
            return cmd_scan(cfg, args, refine=False)
        if args.command == "resonances":
            return cmd_scan(cfg, args, refine=True)
        if args.command == "compare":
            return cmd_compare(cfg, args)
        if args.command == "validate":
            return cmd_validate(cfg, args)
        if args.command == "oracle":
            return cmd_oracle(cfg, args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, ScanError) as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except FloqtunnelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
