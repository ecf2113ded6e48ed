"""Command-line front end.

Subcommands wire the config file to the pipeline and write deterministic
artifacts (no timestamps, fixed float formats):

    assemble  -> model dimension report + JSON matrix dump
    reduce    -> reduction report JSON + Hankel singular value CSV
    synth     -> component table JSON + netlist per requested topology
    bode      -> frequency response CSV per requested system/circuit
    simulate  -> time-domain trajectory CSV
    track     -> circuit-parameter trace CSV

Exit codes: 0 ok, 2 configuration error, 3 model/numerics error,
4 synthesis error.  Errors print one machine-parsable line
"<category>: <message>" on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CircSynthError, ConfigError, ModelError, SynthesisError
from .freqsim import bode, default_omega_grid, simulate, track_parameters
from .linearize import linearize
from .model import assemble_cell, build_ode
from .mor import reduce as mor_reduce
from .netsynth import (
    cauer_expand,
    circuit_impedance,
    export_netlist,
    synth_classical,
    synth_dynamic,
)
from .params import ModelParams, load_params

TOPOLOGY_ALIASES = {
    "classical": "classical",
    "dynamic": "dynamic",
    "ladder": "ladder_cauer1",
    "ladder_cauer1": "ladder_cauer1",
    "ladder_cauer2": "ladder_cauer2",
}


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    variant: str = "baseline"
    r_stable: int = 3
    topologies: tuple[str, ...] = ("classical", "dynamic", "ladder_cauer1")
    omega_min: float = 1e-4
    omega_max: float = 1e2
    omega_points: int = 200
    profile_kind: str = "constant"  # constant | sinusoid | file
    profile_constant: float = 10.0
    profile_offset: float = 10.0
    profile_amplitude: float = 10.0
    profile_omega: float = 0.1
    profile_path: str | None = None
    t_end: float = 100.0
    sample_interval: float = 10.0
    dt_ctrl: float = 1e-8
    out_dir: Path = Path(".")


def _parse_run_keys(cfg: RunConfig, items: dict) -> RunConfig:
    for key, value in items.items():
        try:
            if key == "variant":
                cfg.variant = value
            elif key == "order":
                cfg.r_stable = int(value)
            elif key == "topology":
                cfg.topologies = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key == "omega_min":
                cfg.omega_min = float(value)
            elif key == "omega_max":
                cfg.omega_max = float(value)
            elif key == "omega_points":
                cfg.omega_points = int(value)
            elif key == "profile":
                cfg.profile_kind = value
            elif key == "profile_constant":
                cfg.profile_constant = float(value)
            elif key == "profile_offset":
                cfg.profile_offset = float(value)
            elif key == "profile_amplitude":
                cfg.profile_amplitude = float(value)
            elif key == "profile_omega":
                cfg.profile_omega = float(value)
            elif key == "profile_path":
                cfg.profile_path = value
            elif key == "t_end":
                cfg.t_end = float(value)
            elif key == "sample_interval":
                cfg.sample_interval = float(value)
            elif key == "dt_ctrl":
                cfg.dt_ctrl = float(value)
            else:
                raise ConfigError(f"unknown [run] key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for [run] key {key}: {value!r}") from exc
    return cfg


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        params, run_items = load_params(args.config)
        cfg.params = params
        cfg = _parse_run_keys(cfg, run_items)
    if args.out:
        cfg.out_dir = Path(args.out)
    if args.order is not None:
        cfg.r_stable = args.order
    if args.variant:
        cfg.variant = args.variant
    if args.topology:
        cfg.topologies = tuple(v.strip() for v in args.topology.split(",") if v.strip())
    if cfg.variant not in ("baseline", "kappa_of_c", "aC_of_phi"):
        raise ConfigError(f"unknown variant {cfg.variant!r}")
    if cfg.r_stable < 0:
        raise ConfigError("reduction order must be >= 0")
    if not cfg.topologies:
        raise ConfigError("topology list must not be empty")
    for t in cfg.topologies:
        if t not in TOPOLOGY_ALIASES:
            raise ConfigError(f"unknown topology {t!r}")
    return cfg


def _profile(cfg: RunConfig):
    if cfg.profile_kind == "constant":
        return cfg.profile_constant
    if cfg.profile_kind == "sinusoid":
        off, amp, w = cfg.profile_offset, cfg.profile_amplitude, cfg.profile_omega
        return lambda t: off + amp * np.sin(w * t)
    if cfg.profile_kind == "file":
        if not cfg.profile_path:
            raise ConfigError("profile = file requires profile_path")
        try:
            data = np.loadtxt(cfg.profile_path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"cannot read profile file: {exc}") from exc
        tt, ii = data[:, 0], data[:, 1]
        return lambda t: float(np.interp(t, tt, ii))
    raise ConfigError(f"unknown profile kind {cfg.profile_kind!r}")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def cmd_assemble(cfg: RunConfig) -> None:
    sys_full = assemble_cell(cfg.params, cfg.variant)
    lay = sys_full.layout
    report = {
        "variant": cfg.variant,
        "N_electrode": cfg.params.N_electrode,
        "N_separator": cfg.params.N_separator,
        "c_states": lay.n_c,
        "potential_difference_states": lay.n_w,
        "phi2_variables": lay.n_p,
        "total_variables": lay.n_z,
        "interior_states_after_elimination": len(lay.c_int) + len(lay.w_int),
    }
    _write(cfg.out_dir / "assemble_report.json",
           json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write(cfg.out_dir / "matrices.json", sys_full.to_json(indent=2) + "\n")


def _reduced(cfg: RunConfig):
    ode = build_ode(cfg.params, cfg.variant)
    lti = linearize(ode, cfg.params.c_init)
    return ode, lti, mor_reduce(lti, cfg.r_stable)


def cmd_reduce(cfg: RunConfig) -> None:
    _, _, (reduced, report) = _reduced(cfg)
    _write(cfg.out_dir / "reduction_report.json", report.to_json(indent=2) + "\n")
    lines = ["index,hsv"]
    lines += [f"{k + 1},{s:.10e}" for k, s in enumerate(report.hsv)]
    _write(cfg.out_dir / "hsv.csv", "\n".join(lines) + "\n")


def cmd_synth(cfg: RunConfig) -> None:
    from .netsynth import ss_to_tf

    _, _, (reduced, report) = _reduced(cfg)
    G = ss_to_tf(reduced)
    for topo in cfg.topologies:
        canonical = TOPOLOGY_ALIASES[topo]
        if canonical == "classical":
            circuit = synth_classical(G)
        elif canonical == "dynamic":
            circuit = synth_dynamic(G)
        else:
            circuit = cauer_expand(G, "first" if canonical.endswith("1") else "second")
        table = {
            "topology": canonical,
            "components": {k: circuit.components[k] for k in sorted(circuit.components)},
            "branch_count": circuit.branch_count,
        }
        _write(cfg.out_dir / f"components_{canonical}.json",
               json.dumps(table, indent=2, sort_keys=True) + "\n")
        _write(cfg.out_dir / f"netlist_{canonical}.cir",
               export_netlist(circuit, canonical))


def cmd_bode(cfg: RunConfig) -> None:
    _, lti, (reduced, _) = _reduced(cfg)
    from .netsynth import ss_to_tf

    omega = default_omega_grid(cfg.omega_points, cfg.omega_min, cfg.omega_max)
    _write(cfg.out_dir / "bode_full_model.csv", bode(lti, omega).to_csv())
    _write(cfg.out_dir / "bode_reduced.csv", bode(reduced, omega).to_csv())
    G = ss_to_tf(reduced)
    for topo in cfg.topologies:
        canonical = TOPOLOGY_ALIASES[topo]
        if canonical == "classical":
            circuit = synth_classical(G)
        elif canonical == "dynamic":
            circuit = synth_dynamic(G)
        else:
            circuit = cauer_expand(G, "first" if canonical.endswith("1") else "second")
        _write(cfg.out_dir / f"bode_{canonical}.csv",
               bode(circuit_impedance(circuit), omega).to_csv())


def cmd_simulate(cfg: RunConfig) -> None:
    ode = build_ode(cfg.params, cfg.variant)
    traj = simulate(ode, _profile(cfg), cfg.t_end, dt_ctrl=cfg.dt_ctrl)
    _write(cfg.out_dir / "trajectory.csv", traj.to_csv())


def cmd_track(cfg: RunConfig) -> None:
    ode = build_ode(cfg.params, cfg.variant)
    trace = track_parameters(
        ode, _profile(cfg), cfg.t_end, cfg.sample_interval,
        r_stable=cfg.r_stable, dt_ctrl=cfg.dt_ctrl,
    )
    _write(cfg.out_dir / "param_trace.csv", trace.to_csv())


COMMANDS = {
    "assemble": cmd_assemble,
    "reduce": cmd_reduce,
    "synth": cmd_synth,
    "bode": cmd_bode,
    "simulate": cmd_simulate,
    "track": cmd_track,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circsynth",
        description="RC circuit synthesis from a porous-electrode supercapacitor model",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--out", help="output directory (default: current)")
    parser.add_argument("--order", type=int, default=None,
                        help="retained stable order for the reduction")
    parser.add_argument("--variant", default=None,
                        help="baseline | kappa_of_c | aC_of_phi")
    parser.add_argument("--topology", default=None,
                        help="comma list: classical,dynamic,ladder[,ladder_cauer2]")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except SynthesisError as exc:
        print(f"synthesis-error: {exc}", file=sys.stderr)
        return 4
    except (ModelError, CircSynthError, np.linalg.LinAlgError) as exc:
        print(f"model-error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
