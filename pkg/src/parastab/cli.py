"""Command-line entry point: ``parastab run <config>`` and ``parastab validate <config>``."""

import argparse
import datetime
import json
import os
import sys

import numpy as np

from . import circuitq
from . import experiments as ex
from .config import load_config, serialize_config
from .errors import ConfigError, ParastabError
from .hamiltonians import DriveSettings
from .output import write_result

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def _quantize(cfg):
    m = circuitq.quantize(cfg.circuit)
    cols = ["phi_ext", "omega_q", "omega_r", "g_L", "g_C", "g_r", "g_b", "Z1", "Z2", "L_g",
            "error"]
    row = {"phi_ext": cfg.circuit.phi_ext, "omega_q": m.omega_q, "omega_r": m.omega_r,
           "g_L": m.g_L, "g_C": m.g_C, "g_r": m.g_r, "g_b": m.g_b, "Z1": m.Z1, "Z2": m.Z2,
           "L_g": m.L_g, "error": ""}
    units = {c: "rad/s" for c in cols[1:7]}
    units.update(Z1="Ohm", Z2="Ohm", L_g="H")
    return ex.SweepResult(cols, [row], units)


def _flux_sweep(cfg):
    cols = ["phi_ext", "omega_q", "omega_r", "g_r", "g_b", "error"]
    rows = []
    for phi in cfg.grids["phi_ext"].values():
        try:
            m = circuitq.quantize(cfg.circuit.with_flux(float(phi)))
            rows.append({"phi_ext": float(phi), "omega_q": m.omega_q, "omega_r": m.omega_r,
                         "g_r": m.g_r, "g_b": m.g_b, "error": ""})
        except ParastabError as exc:
            row = dict.fromkeys(cols)
            row.update(phi_ext=float(phi), error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
    return ex.SweepResult(cols, rows, {c: "rad/s" for c in cols[1:5]})


def _stabilize(cfg, workers):
    d = cfg.drive
    drv = DriveSettings(omega_x=d["omega_x"], omega_b=d["omega_b"], phase_phi=d["phase"])
    return ex.stabilization_sweep(cfg.system, drv, cfg.grids["theta"].values(), workers)


def _compare(cfg, workers):
    d = cfg.drive
    kinds = tuple(k.strip() for k in d["interactions"].split(",") if k.strip())
    return ex.interaction_comparison(cfg.system, d["omega_R"], d["coupling"],
                                     cfg.grids["theta"].values(), kinds, d["phase"], workers)


def _spectroscopy(cfg, workers):
    s = cfg.system
    probe = s.omega_r + cfg.grids["probe"].values()
    mod = s.omega_q + s.omega_r + s.chi + cfg.grids["modulation"].values()
    spec = ex.spectroscopy_map(s, cfg.drive["omega_b"], probe, mod, cfg.drive["probe_eps"],
                               method=cfg.solver["method"], workers=workers)
    return spec.to_sweep()


def _vacuum_rabi(cfg):
    s = cfg.system
    times = cfg.grids["time"].values()
    res = ex.vacuum_rabi_trace(s, cfg.drive["g_eff"], times)
    e0, g1 = s.n_fock, 1
    cols = ["time", "P_e0", "P_g1", "sigma_x", "sigma_y", "sigma_z", "n_photon", "error"]
    rows = []
    for k, t in enumerate(res.times):
        x, y, z = res.bloch[k]
        rows.append({"time": float(t), "P_e0": float(res.populations[k, e0]),
                     "P_g1": float(res.populations[k, g1]), "sigma_x": float(x),
                     "sigma_y": float(y), "sigma_z": float(z),
                     "n_photon": float(res.n_photon[k]), "error": ""})
    return ex.SweepResult(cols, rows, {"time": "s"})


def run_experiment(cfg, workers=None):
    workers = cfg.workers if workers is None else workers
    kind = cfg.experiment
    if kind == "quantize":
        return _quantize(cfg)
    if kind == "flux-sweep":
        return _flux_sweep(cfg)
    if kind == "stabilize":
        return _stabilize(cfg, workers)
    if kind == "compare":
        return _compare(cfg, workers)
    if kind == "spectroscopy":
        return _spectroscopy(cfg, workers)
    if kind == "vacuum-rabi":
        return _vacuum_rabi(cfg)
    if kind == "rates":
        return ex.rates_table(cfg.system.gamma, cfg.system.gamma_phi,
                              cfg.grids["theta"].values())
    raise ConfigError(f"unknown experiment {kind!r}")


def _report(exc, path):
    info = {"error": type(exc).__name__, "message": getattr(exc, "message", str(exc)),
            "config": path}
    if getattr(exc, "line", None) is not None:
        info["line"] = exc.line
    print(json.dumps(info), file=sys.stderr)


def _build_parser():
    p = argparse.ArgumentParser(prog="parastab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the experiment described by a config file")
    r.add_argument("config")
    r.add_argument("--out", default=".", help="output directory (default: current)")
    r.add_argument("--workers", type=int, default=None, help="override [run] workers")
    r.add_argument("--reproducible", action="store_true",
                   help="omit the timestamp so identical inputs give identical bytes")
    v = sub.add_parser("validate", help="parse and check a config file")
    v.add_argument("config")
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError, UnicodeDecodeError) as exc:
        _report(exc, args.config)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"ok: {cfg.experiment}")
        return EXIT_OK

    if args.workers is not None and args.workers < 1:
        _report(ConfigError("--workers must be >= 1"), args.config)
        return EXIT_CONFIG

    try:
        with np.errstate(all="ignore"):
            result = run_experiment(cfg, args.workers)
    except ConfigError as exc:
        _report(exc, args.config)
        return EXIT_CONFIG
    except (ParastabError, ValueError, np.linalg.LinAlgError) as exc:
        _report(exc, args.config)
        return EXIT_SOLVER

    stamp = None
    if not args.reproducible:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, cfg.output_name)
    write_result(path, result, serialize_config(cfg), cfg.format, stamp)

    failed = [r for r in result.rows if r["error"]]
    if failed:
        _report(ParastabError(f"{len(failed)} of {len(result.rows)} rows failed; see the "
                              f"error column in {path}"), args.config)
        return EXIT_SOLVER
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
