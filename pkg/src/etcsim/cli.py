"""Command-line front end: ``design``, ``simulate``, ``replay`` and ``sweep``.

Exit codes: 0 success, 2 usage/configuration error, 3 infeasible design,
4 runtime invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from . import io as etc_io
from .codec import build_design
from .design import (
    J_RULES, datarate_threshold, max_trigger_rate, min_inter_event, min_J,
    packet_size_bound, packet_size_bound_int, rate_curve_point, resolve_j_rule, sufficient_rate,
)
from .errors import ConfigError, InfeasibleDesignError, InvariantViolation
from .model import PlantParams
from .simulator import (
    SCENARIOS, PendulumConfig, SimConfig, pendulum_design, run_pendulum, run_scalar,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4
OUT_DIR_ENV = "ETCSIM_OUT_DIR"

FLOAT_KEYS = {
    "plant.A", "plant.B", "plant.M", "plant.L", "design.rho0", "design.b", "design.J",
    "gain.K", "sim.T", "sim.h", "delay.gamma", "init.x0", "init.xhat0",
}
INT_KEYS = {"seed", "delay.seed", "disturbance.seed"}

DEFAULTS = {
    "scenario": None,
    "plant.A": 5.5651, "plant.B": 2.2513, "plant.M": 0.05, "plant.L": 1.0,
    "design.rho0": 0.9, "design.b": 1.0001, "design.J": None, "design.J_rule": "narrow",
    "design.bound": "transformed",
    "gain.K": None,
    "sim.T": 5.0, "sim.h": 0.005,
    "delay.kind": "uniform-random", "delay.gamma": 0.1, "delay.seed": None,
    "disturbance.policy": "uniform", "disturbance.seed": None, "disturbance.frame": "modal",
    "init.x0": None, "init.xhat0": None,
    "seed": 0,
}

# flag dest -> config key
FLAG_KEYS = {
    "scenario": "scenario", "A": "plant.A", "B": "plant.B", "M": "plant.M", "L": "plant.L",
    "rho0": "design.rho0", "b": "design.b", "J": "design.J", "J_rule": "design.J_rule",
    "design_bound": "design.bound", "K": "gain.K", "T": "sim.T", "h": "sim.h",
    "delay_kind": "delay.kind", "gamma": "delay.gamma", "delay_seed": "delay.seed",
    "disturbance": "disturbance.policy", "disturbance_seed": "disturbance.seed",
    "frame": "disturbance.frame", "x0": "init.x0", "xhat0": "init.xhat0", "seed": "seed",
}


def _coerce(key: str, value):
    if value is None or value == "" or value == "None":
        return None
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return str(value)


def resolve_config(file_values: dict | None = None, flag_values: dict | None = None) -> dict:
    """Defaults, then scenario preset, then config file, then flags; seeds materialized."""
    layered = dict(file_values or {})
    layered.update({k: v for k, v in (flag_values or {}).items() if v is not None})
    unknown = set(layered) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = dict(DEFAULTS)
    scenario = _coerce("scenario", layered.get("scenario"))
    if scenario is not None:
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}; use one of {sorted(SCENARIOS)}")
        cfg["plant.M"] = SCENARIOS[scenario]["M"]
        cfg["delay.gamma"] = SCENARIOS[scenario]["gamma"]
    for key, value in layered.items():
        cfg[key] = _coerce(key, value)
    if cfg["delay.seed"] is None:
        cfg["delay.seed"] = cfg["seed"]
    if cfg["disturbance.seed"] is None:
        cfg["disturbance.seed"] = cfg["seed"] + 1
    return cfg


def build_run_config(cfg: dict) -> PendulumConfig | SimConfig:
    rule = resolve_j_rule(cfg["design.J_rule"])
    if cfg["scenario"] is not None:
        if cfg["design.J"] is not None:
            raise ConfigError("pendulum scenarios derive J from the J rule; drop design.J")
        return PendulumConfig(
            M=cfg["plant.M"], gamma=cfg["delay.gamma"], rho0=cfg["design.rho0"], b=cfg["design.b"],
            J_offset=rule.offset, T=cfg["sim.T"], h=cfg["sim.h"], delay_kind=cfg["delay.kind"],
            delay_seed=cfg["delay.seed"], disturbance=cfg["disturbance.policy"],
            disturbance_seed=cfg["disturbance.seed"], frame=cfg["disturbance.frame"],
            design_bound=cfg["design.bound"], scenario=cfg["scenario"],
        )
    return SimConfig.build(
        A=cfg["plant.A"], B=cfg["plant.B"], M=cfg["plant.M"], L=cfg["plant.L"],
        rho0=cfg["design.rho0"], b=cfg["design.b"], gamma=cfg["delay.gamma"], J=cfg["design.J"],
        J_rule=rule, K=cfg["gain.K"], T=cfg["sim.T"], h=cfg["sim.h"],
        delay_kind=cfg["delay.kind"], delay_seed=cfg["delay.seed"],
        disturbance=cfg["disturbance.policy"], disturbance_seed=cfg["disturbance.seed"],
        x0=cfg["init.x0"], xhat0=cfg["init.xhat0"],
    )


def default_out_dir(name: str) -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "etcsim-out")) / name


# --------------------------------------------------------------------------- design

def design_report(p: PlantParams, J: float, rho0: float, b: float, gamma: float) -> dict:
    d = build_design(p, J, rho0, b, gamma)
    return {
        "A": p.A, "M": p.M, "rho0": rho0, "b": b, "gamma": gamma,
        "min_J": min_J(p, rho0, gamma), "J": J, "delta": d.delta, "N": d.N, "P": d.P,
        "g_constructive": d.g,
        "g_paper_real": packet_size_bound(p, J, rho0, b, gamma),
        "g_paper_int": packet_size_bound_int(p, J, rho0, b, gamma),
        "tau_min": min_inter_event(p, J, rho0),
        "Rtr_bound": max_trigger_rate(p, J, rho0),
        "Rs_bound": sufficient_rate(p, J, rho0, b, gamma),
        "datarate_threshold": datarate_threshold(p),
    }


def cmd_design(args) -> int:
    if args.scenario is not None:
        cfg = resolve_config(flag_values={"scenario": args.scenario, "rho0": args.rho0,
                                          "b": args.b, "J_rule": args.J_rule,
                                          "gamma": args.gamma, "M": args.M})
        pcfg = build_run_config({**cfg, "design.J": None})
        plant, d = pendulum_design(pcfg)
        report = design_report(plant, d.J, d.rho0, d.b, d.gamma)
    else:
        missing = [f"--{n}" for n in ("A", "gamma") if getattr(args, n) is None]
        if missing:
            args.parser.error(f"missing required flag(s): {', '.join(missing)} (or use --scenario)")
        p = PlantParams(A=args.A, B=args.B if args.B is not None else 1.0,
                        M=args.M if args.M is not None else 0.0)
        rho0 = args.rho0 if args.rho0 is not None else 0.9
        b = args.b if args.b is not None else 1.0001
        J = args.J if args.J is not None else resolve_j_rule(args.J_rule or "narrow")(p, rho0, args.gamma)
        report = design_report(p, J, rho0, b, args.gamma)
    for key, value in report.items():
        print(f"{key}={etc_io.fmt(value)}")
    return EXIT_OK


# --------------------------------------------------------------------------- simulate

def execute(cfg: dict, out_dir: Path, command: str = "simulate") -> int:
    run_cfg = build_run_config(cfg)
    result = run_pendulum(run_cfg) if isinstance(run_cfg, PendulumConfig) else run_scalar(run_cfg)
    trace = result.trace
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"trace": "trace.csv", "events": "events.csv", "stats": "stats.txt"}
    etc_io.write_trace_csv(trace, out_dir / files["trace"])
    etc_io.write_events_csv(trace, out_dir / files["events"])
    d = trace.design
    summary = {
        **result.stats.as_dict(),
        "J": d.J, "rho0": d.rho0, "gamma": d.gamma, "delta": d.delta, "N": d.N, "g": d.g,
        "tau_min": min_inter_event(trace.plant, d.J, d.rho0),
        "A_mode": trace.plant.A, "M_design": trace.plant.M,
        "T0": result.certificate.T0,
        **{f"kappa_{i + 1}": v for i, v in enumerate(result.certificate.kappa)},
        "violations": len(result.violations),
    }
    etc_io.write_kv(summary, out_dir / files["stats"])
    manifest = {
        "command": command, "config": cfg, "outputs": files, "version": __version__,
        "seeds": {"delay": cfg["delay.seed"], "disturbance": cfg["disturbance.seed"]},
        "backend": _kernels.BACKEND,
    }
    etc_io.write_manifest(manifest, out_dir / "manifest.json")
    print(f"wrote {out_dir}: {trace.n_triggers} triggers, g={d.g} bits, "
          f"R_s={result.stats.R_s:.4g} bit/s")
    if result.violations:
        first = result.violations[0]
        print(f"error: {first}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _flag_values(args) -> dict:
    return {key: getattr(args, dest, None) for dest, key in FLAG_KEYS.items()}


def cmd_simulate(args) -> int:
    file_values = etc_io.read_kv(args.config) if args.config else {}
    cfg = resolve_config(file_values, _flag_values(args))
    name = f"scenario-{cfg['scenario']}" if cfg["scenario"] else "scalar"
    out = Path(args.out) if args.out else default_out_dir(name)
    return execute(cfg, out)


def cmd_replay(args) -> int:
    manifest = etc_io.read_manifest(args.manifest)
    if manifest.get("command") == "sweep":
        return run_sweep(manifest["config"], Path(args.out) if args.out else Path(args.manifest).parent)
    out = Path(args.out) if args.out else Path(args.manifest).parent
    return execute(resolve_config(manifest["config"]), out, manifest.get("command", "simulate"))


# --------------------------------------------------------------------------- sweep

def parse_grid(text: str) -> list[float]:
    """``start:stop:num`` (inclusive, evenly spaced) or a comma-separated list."""
    text = text.strip()
    if not text:
        raise ConfigError("empty gamma grid")
    if ":" in text:
        start, stop, num = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(num))]
    return [float(v) for v in text.split(",") if v.strip()]


MEASURED_COLUMNS = ("measured_R_s", "measured_R_tr", "g_sim", "n_triggers", "error")


def _measure_point(job: tuple) -> dict:
    cfg, gamma = job
    try:
        point = {**cfg, "delay.gamma": gamma}
        run_cfg = build_run_config(point)
        result = run_pendulum(run_cfg) if isinstance(run_cfg, PendulumConfig) else run_scalar(run_cfg)
    except (ConfigError, InfeasibleDesignError) as exc:
        return {"error": str(exc)}
    s = result.stats
    row = {"measured_R_s": s.R_s, "measured_R_tr": s.R_tr, "g_sim": result.trace.design.g,
           "n_triggers": s.n_triggers}
    if result.violations:
        row["error"] = str(result.violations[0])
    return row


def run_sweep(cfg: dict, out_dir: Path) -> int:
    grid = cfg["gamma_grid"]
    if not grid:
        raise ConfigError("empty gamma grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("gamma grid must be strictly increasing")
    rule = resolve_j_rule(cfg["design.J_rule"])
    rho0, b = cfg["design.rho0"], cfg["design.b"]
    pendulum = cfg["system"] == "pendulum"
    rows = []
    for gamma in grid:
        row = {"gamma": gamma}
        try:
            if pendulum:
                pcfg = build_run_config({**cfg, "scenario": "c", "delay.gamma": gamma})
                plant, d = pendulum_design(pcfg)
                J = d.J
            else:
                plant = PlantParams(A=cfg["plant.A"], B=cfg["plant.B"], M=cfg["plant.M"])
                J = rule(plant, rho0, gamma) if cfg["design.J"] is None else cfg["design.J"]
            row.update(rate_curve_point(plant, rho0, b, J, gamma).as_row())
        except (ConfigError, InfeasibleDesignError) as exc:
            row["error"] = str(exc)
        rows.append(row)
    extra = ("error",)
    if cfg["measured"]:
        sim_cfg = {k: v for k, v in cfg.items() if k in DEFAULTS}
        if pendulum:
            sim_cfg["scenario"] = "c"
        jobs = [(sim_cfg, g) for g in grid]
        if cfg["jobs"] > 1:
            with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
                measured = list(pool.map(_measure_point, jobs))
        else:
            measured = [_measure_point(j) for j in jobs]
        for row, meas in zip(rows, measured):
            err = "; ".join(e for e in (row.get("error"), meas.pop("error", None)) if e)
            row.update(meas)
            row["error"] = err or None
        extra = MEASURED_COLUMNS
    path = etc_io.write_sweep_csv(rows, out_dir / "sweep.csv", extra_columns=extra)
    manifest = {"command": "sweep", "config": cfg, "outputs": {"sweep": "sweep.csv"},
                "version": __version__, "seeds": {"seed": cfg["seed"]},
                "backend": _kernels.BACKEND}
    etc_io.write_manifest(manifest, out_dir / "manifest.json")
    print(f"wrote {path} ({len(rows)} points)")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = parse_grid(args.gamma_grid)
    except ValueError:
        args.parser.error(f"cannot parse --gamma-grid {args.gamma_grid!r}")
    if not grid:
        args.parser.error("--gamma-grid is empty")
    cfg = resolve_config(flag_values=_flag_values(args))
    cfg.update({"gamma_grid": grid, "measured": bool(args.measured), "system": args.system,
                "jobs": args.jobs})
    out = Path(args.out) if args.out else default_out_dir("sweep")
    return run_sweep(cfg, out)


# --------------------------------------------------------------------------- parser

def _add_model_flags(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--A", type=float, help="unstable pole (1/s)")
    p.add_argument("--B", type=float, help="input gain")
    p.add_argument("--M", type=float, help="disturbance bound")
    p.add_argument("--L", type=float, help="initial-state bound")
    p.add_argument("--rho0", type=float, help="post-jump contraction in (0, 1)")
    p.add_argument("--b", type=float, help="slack factor (> 1) of the packet-size bound")
    p.add_argument("--J-rule", dest="J_rule",
                   help=f"J = min_J + offset; one of {sorted(J_RULES)} or a numeric offset")
    p.add_argument("--J", type=float, help="triggering threshold (overrides --J-rule)")
    if not sweep:
        p.add_argument("--gamma", type=float, help="worst-case channel delay (s)")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--K", type=float, help="scalar feedback gain (default 2A/B)")
    p.add_argument("--T", type=float, help="horizon (s)")
    p.add_argument("--h", type=float, help="grid step (s)")
    p.add_argument("--delay-kind", choices=("constant", "uniform-random", "adversarial-max"))
    p.add_argument("--delay-seed", type=int)
    p.add_argument("--disturbance", choices=("zero", "uniform", "adversarial", "opposing"))
    p.add_argument("--disturbance-seed", type=int)
    p.add_argument("--frame", choices=("modal", "physical"),
                   help="pendulum: bound the modal or the physical disturbance components")
    p.add_argument("--design-bound", choices=("transformed", "raw"),
                   help="pendulum: design the unstable mode with the tight modal bound or raw M")
    p.add_argument("--x0", type=float)
    p.add_argument("--xhat0", type=float)
    p.add_argument("--seed", type=int, help="master seed (delay seed; disturbance seed + 1)")
    p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV}/<run>)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etcsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="print the trigger/codec design and rate bounds")
    _add_model_flags(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="pendulum scenario preset")
    p.set_defaults(func=cmd_design, parser=p)

    p = sub.add_parser("simulate", help="run one closed-loop simulation and write CSVs")
    _add_model_flags(p)
    _add_sim_flags(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="pendulum scenario preset")
    p.add_argument("--config", help="key=value config file (flags take precedence)")
    p.set_defaults(func=cmd_simulate, parser=p)

    p = sub.add_parser("replay", help="re-run a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="output directory (default: the manifest's directory)")
    p.set_defaults(func=cmd_replay, parser=p)

    p = sub.add_parser("sweep", help="evaluate design formulas (and optionally runs) over gamma")
    _add_model_flags(p, sweep=True)
    _add_sim_flags(p)
    p.add_argument("--gamma-grid", required=True,
                   help="start:stop:num or comma-separated list of delay bounds")
    p.add_argument("--measured", action="store_true", help="also simulate each grid point")
    p.add_argument("--system", choices=("scalar", "pendulum"), default="scalar")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep, parser=p, scenario=None)
    return parser


SWEEP_DEFAULTS = {"A": 5.5651, "M": 0.2, "rho0": 0.1, "b": 1.0001, "J_rule": "wide"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.system == "scalar":
        for key, value in SWEEP_DEFAULTS.items():
            if getattr(args, key) is None:
                setattr(args, key, value)
    try:
        return args.func(args)
    except InfeasibleDesignError as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
