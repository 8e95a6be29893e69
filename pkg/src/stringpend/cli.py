"""Command line front end: config ingestion, run orchestration, file output.

Subcommands:
  simulate --config PATH [--out DIR] [--integrator lgvi|reference|both] [--quiet]
  validate --config PATH
  version

Time series go to CSV (one row per sampled step, 17-significant-digit floats
so values parse back exactly); trajectory snapshots go to one JSON document
each. Reruns with the same config are bit-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    angular_momentum_e3,
    discrete_angular_momentum_e3,
    discrete_energy,
    energy,
    strain_energy_per_element,
    stretched_length,
)
from .lgvi import ConvergenceError, LgviStepper, SolverOptions
from .model import (
    Configuration,
    Discretization,
    InitialConditions,
    PhysicalParams,
    build_initial_state,
)
from .refint import SemiDiscreteSystem, rk4_step
from .so3 import log_so3, orthogonality_error

SERIES_COLUMNS = (
    "t,T_str,T_rb,V_elastic,V_grav,E_total,pi3,orth_err,stretched_len,"
    "v_body_x,v_body_y,v_body_z,omega_x,omega_y,omega_z,fp_iters"
)
GRAVITY_NOTE = "# gravity direction: +e3 (force +g*e3, potentials -(mass)*g*r.e3)"


class ConfigError(ValueError):
    """A config file failed validation; the message names the offending field."""


def bundled_config_path() -> Path:
    """Path of the packaged reference configuration (rubber string scenario)."""
    return Path(resources.files("stringpend") / "configs" / "paper_rubber_string.json")


@dataclass
class RunConfig:
    params: PhysicalParams
    N: int
    h: float
    T: float
    initial: InitialConditions
    solver: SolverOptions
    series_stride: int = 1
    snapshot_stride: int = 1000
    integrator: str = "lgvi"

    def __post_init__(self):
        if not self.T > 0.0:
            raise ConfigError("field 'T': must be positive")
        if self.series_stride < 1:
            raise ConfigError("field 'output.series_stride': must be >= 1")
        if self.snapshot_stride < 1:
            raise ConfigError("field 'output.snapshot_stride': must be >= 1")
        if self.integrator not in ("lgvi", "reference", "both"):
            raise ConfigError(f"integrator must be lgvi|reference|both, got {self.integrator!r}")

    @property
    def disc(self) -> Discretization:
        return Discretization(self.params, self.N, self.h)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.T / self.h)))


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _number(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing required field '{where}{key}'")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"field '{where}{key}': expected a number, got {type(val).__name__}")
    return val


def _vec3(obj: dict, key: str, where: str, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise ConfigError(f"missing required field '{where}{key}'")
    val = obj[key]
    if not (isinstance(val, list) and len(val) == 3):
        raise ConfigError(f"field '{where}{key}': expected a list of 3 numbers")
    return [float(x) for x in val]


def load_config(path) -> RunConfig:
    """Parse and fully validate a JSON run configuration (strict: unknown keys
    are errors; every nested invariant is enforced here)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")

    _check_keys(
        raw,
        {"mu_bar", "l", "EA", "M", "rho_c", "J", "g", "N", "h", "T", "initial", "solver", "output"},
        "config",
    )

    J = raw.get("J")
    if not (
        isinstance(J, list)
        and len(J) == 3
        and all(isinstance(row, list) and len(row) == 3 for row in J)
    ):
        raise ConfigError("field 'J': expected a 3x3 matrix as nested lists")

    try:
        params = PhysicalParams(
            mu_bar=_number(raw, "mu_bar", ""),
            l=_number(raw, "l", ""),
            EA=_number(raw, "EA", ""),
            M=_number(raw, "M", ""),
            rho_c=_vec3(raw, "rho_c", ""),
            J=np.array(J, dtype=float),
            g=_number(raw, "g", "") if "g" in raw else 9.81,
        )
    except ValueError as e:
        raise ConfigError(f"invalid physical parameters: {e}") from e

    N = _number(raw, "N", "")
    if not (isinstance(N, int) and N >= 2):
        raise ConfigError("field 'N': must be an integer >= 2")
    h = float(_number(raw, "h", ""))
    T = float(_number(raw, "T", ""))

    init_raw = raw.get("initial", {})
    if not isinstance(init_raw, dict):
        raise ConfigError("field 'initial': expected an object")
    _check_keys(init_raw, {"layout", "body_velocity", "body_omega", "attitude"}, "initial")
    layout = init_raw.get("layout", "straight_e1")
    if layout != "straight_e1":
        raise ConfigError(f"field 'initial.layout': only 'straight_e1' is supported, got {layout!r}")
    attitude = init_raw.get("attitude", "identity")
    if attitude != "identity":
        raise ConfigError(f"field 'initial.attitude': only 'identity' is supported, got {attitude!r}")
    try:
        initial = InitialConditions(
            layout=layout,
            body_velocity=_vec3(init_raw, "body_velocity", "initial.", default=[0.0, 0.0, 0.0]),
            body_omega=_vec3(init_raw, "body_omega", "initial.", default=[0.0, 0.0, 0.0]),
            attitude=attitude,
        )
    except ValueError as e:
        raise ConfigError(f"invalid initial conditions: {e}") from e

    solver_raw = raw.get("solver", {})
    if not isinstance(solver_raw, dict):
        raise ConfigError("field 'solver': expected an object")
    _check_keys(
        solver_raw,
        {"fixed_point_tol", "newton_tol", "max_fixed_point_iters", "max_newton_iters"},
        "solver",
    )
    try:
        solver = SolverOptions(
            fixed_point_tol=float(solver_raw.get("fixed_point_tol", 1e-12)),
            newton_tol=float(solver_raw.get("newton_tol", 1e-12)),
            max_fixed_point_iters=int(solver_raw.get("max_fixed_point_iters", 50)),
            max_newton_iters=int(solver_raw.get("max_newton_iters", 50)),
        )
    except ValueError as e:
        raise ConfigError(f"invalid solver options: {e}") from e

    out_raw = raw.get("output", {})
    if not isinstance(out_raw, dict):
        raise ConfigError("field 'output': expected an object")
    _check_keys(out_raw, {"series_stride", "snapshot_stride"}, "output")
    series_stride = int(out_raw.get("series_stride", 1))
    snapshot_stride = int(out_raw.get("snapshot_stride", 1000))
    if series_stride < 1:
        raise ConfigError("field 'output.series_stride': must be >= 1")
    if snapshot_stride < 1:
        raise ConfigError("field 'output.snapshot_stride': must be >= 1")

    try:
        return RunConfig(
            params=params,
            N=N,
            h=h,
            T=T,
            initial=initial,
            solver=solver,
            series_stride=series_stride,
            snapshot_stride=snapshot_stride,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class _SeriesWriter:
    def __init__(self, path: Path):
        self._fh = open(path, "w")
        self._fh.write(GRAVITY_NOTE + "\n")
        self._fh.write(SERIES_COLUMNS + "\n")

    def row(self, t, eb, pi3, orth, slen, v_body, omega, fp_iters):
        vals = [t, eb.T_str, eb.T_rb, eb.V_elastic, eb.V_grav, eb.total, pi3, orth, slen]
        vals.extend(v_body)
        vals.extend(omega)
        self._fh.write(",".join(_fmt(v) for v in vals) + f",{fp_iters}\n")

    def close(self):
        self._fh.close()


def _write_snapshot(path: Path, t, g: Configuration, params, disc):
    doc = {
        "t": float(t),
        "nodes": g.nodes.tolist(),
        "R": g.R.tolist(),
        "strain_energy": strain_energy_per_element(g, params, disc).tolist(),
    }
    path.write_text(json.dumps(doc))


def _run_lgvi(config: RunConfig, out_dir: Path):
    params, disc = config.params, config.disc
    state0 = build_initial_state(params, disc, config.initial)
    stepper = LgviStepper(params, disc, state0, config.solver)
    K = config.n_steps
    h = disc.h

    series = _SeriesWriter(out_dir / "series_lgvi.csv")
    sampled = []
    orth_max = 0.0
    fp_max = 0
    e0 = None
    e_last = None

    def emit(k, g, f, fp_iters):
        nonlocal e0, e_last
        t = k * h
        eb = discrete_energy(g, f, params, disc)
        pi3 = discrete_angular_momentum_e3(g, f, params, disc)
        orth = orthogonality_error(g.R)
        if k % config.series_stride == 0:
            series.row(
                t, eb, pi3, orth, stretched_length(g),
                f.deltas[-1] / h, log_so3(f.F) / h, fp_iters,
            )
            sampled.append((t, g.nodes.copy(), g.R.copy()))
        if e0 is None:
            e0 = eb.total
        e_last = eb.total
        return orth

    def snap(k, g):
        if k % config.snapshot_stride == 0:
            _write_snapshot(out_dir / f"snapshot_lgvi_{k:08d}.json", k * h, g, params, disc)

    orth_max = emit(0, stepper.previous, stepper.previous_update, 0)
    snap(0, stepper.previous)
    for k in range(1, K):
        f = stepper.step()
        g = stepper.previous  # g_k, the configuration this update advances
        orth_max = max(orth_max, emit(k, g, f, stepper.last_fp_iters))
        fp_max = max(fp_max, stepper.last_fp_iters)
        snap(k, g)
    orth_max = max(orth_max, orthogonality_error(stepper.current.R))
    _write_snapshot(
        out_dir / f"snapshot_lgvi_{K:08d}.json", K * h, stepper.current, params, disc
    )
    series.close()

    return {
        "integrator": "lgvi",
        "steps": K,
        "final_energy_deviation": abs(e_last - e0),
        "max_orthogonality_error": orth_max,
        "max_fixed_point_iters": fp_max,
    }, sampled


def _run_reference(config: RunConfig, out_dir: Path):
    params, disc = config.params, config.disc
    sys_ = SemiDiscreteSystem(params, disc)
    state = build_initial_state(params, disc, config.initial)
    K = config.n_steps
    h = disc.h

    series = _SeriesWriter(out_dir / "series_reference.csv")
    sampled = []
    orth_max = 0.0
    e0 = None
    e_last = None

    def emit(k, st):
        nonlocal e0, e_last
        t = k * h
        eb = energy(st, params, disc)
        g = Configuration(nodes=st.nodes, R=st.R)
        pi3 = angular_momentum_e3(st, params, disc)
        orth = orthogonality_error(st.R)
        if k % config.series_stride == 0:
            series.row(
                t, eb, pi3, orth, stretched_length(g),
                st.node_velocities[-1], st.Omega, 0,
            )
            sampled.append((t, st.nodes.copy(), st.R.copy()))
        if e0 is None:
            e0 = eb.total
        e_last = eb.total
        if k % config.snapshot_stride == 0:
            _write_snapshot(out_dir / f"snapshot_reference_{k:08d}.json", t, g, params, disc)
        return orth

    orth_max = emit(0, state)
    for k in range(1, K + 1):
        state = rk4_step(state, h, sys_)
        if k < K:
            orth_max = max(orth_max, emit(k, state))
    orth_max = max(orth_max, orthogonality_error(state.R))
    _write_snapshot(
        out_dir / f"snapshot_reference_{K:08d}.json",
        K * h,
        Configuration(nodes=state.nodes, R=state.R),
        params,
        disc,
    )
    series.close()

    return {
        "integrator": "reference",
        "steps": K,
        "final_energy_deviation": abs(e_last - e0),
        "max_orthogonality_error": orth_max,
        "max_fixed_point_iters": 0,
    }, sampled


def _write_compare(out_dir: Path, lgvi_samples, ref_samples):
    with open(out_dir / "compare.csv", "w") as fh:
        fh.write("t,max_node_diff,attitude_geodesic_diff\n")
        for (t, nodes_a, R_a), (_, nodes_b, R_b) in zip(lgvi_samples, ref_samples):
            node_diff = float(np.max(np.linalg.norm(nodes_a - nodes_b, axis=1)))
            angle = float(np.linalg.norm(log_so3(R_a.T @ R_b)))
            fh.write(f"{_fmt(t)},{_fmt(node_diff)},{_fmt(angle)}\n")


def run(config: RunConfig, out_dir="out", quiet: bool = False) -> dict:
    """Execute the configured run(s); returns the summary dictionary.

    Raises ConvergenceError (with the failing step index) on solver failure.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = {}
    started = time.perf_counter()

    lgvi_samples = ref_samples = None
    if config.integrator in ("lgvi", "both"):
        summary, lgvi_samples = _run_lgvi(config, out_dir)
        summaries["lgvi"] = summary
    if config.integrator in ("reference", "both"):
        summary, ref_samples = _run_reference(config, out_dir)
        summaries["reference"] = summary
    if config.integrator == "both":
        _write_compare(out_dir, lgvi_samples, ref_samples)

    wall = time.perf_counter() - started
    if not quiet:
        for name, s in summaries.items():
            print(
                f"{name}: {s['steps']} steps, "
                f"final energy deviation {s['final_energy_deviation']:.6e} J, "
                f"max orthogonality error {s['max_orthogonality_error']:.3e}, "
                f"max fixed-point iterations {s['max_fixed_point_iters']}"
            )
        print(f"wall time: {wall:.2f} s")
    summaries["wall_time_s"] = wall
    return summaries


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stringpend",
        description="Simulate a rigid body hanging from an elastic string.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a simulation from a JSON config")
    p_sim.add_argument("--config", required=True, help="path of the JSON run configuration")
    p_sim.add_argument("--out", default="out", help="output directory (default: out)")
    p_sim.add_argument(
        "--integrator",
        choices=("lgvi", "reference", "both"),
        default=None,
        help="which integrator(s) to run (default: lgvi)",
    )
    p_sim.add_argument("--quiet", action="store_true", help="suppress the summary printout")

    p_val = sub.add_parser("validate", help="parse and validate a config, then exit")
    p_val.add_argument("--config", required=True)

    sub.add_parser("version", help="print the package version")

    args = parser.parse_args(argv)

    if args.command == "version":
        print(__version__)
        return 0

    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(f"{args.config}: OK")
        return 0

    if args.integrator is not None:
        config.integrator = args.integrator
    try:
        run(config, out_dir=args.out, quiet=args.quiet)
    except ConvergenceError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
