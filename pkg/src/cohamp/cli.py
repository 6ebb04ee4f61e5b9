"""``cohamp`` command line: emits the data behind the amplification plots.

Every command reads one JSON config (the shipped default when ``--config`` is
omitted); any leaf field can be overridden by its kebab-case flag, e.g.
``--beta2-over-beta1-min 0.1``. Row computations run on a thread pool sized
by ``COHAMP_THREADS`` and are written in index order.
"""

import argparse
import copy
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .atomchannel import ChannelRegimeError
from .benchlab import (
    ThetaFamilyParams,
    coherence_ratios,
    coherence_ratios_matrix,
    degenerate_hamiltonian,
    delta_c_curve,
    delta_c_root,
    example_states,
    stage_diagram,
    theta_unitary,
)
from .cascade import StageError, fixed_point, kick_magnitude, _qubit_distance, stage_map
from .machine import MachineParams, SteadyStateError, machine_steady_state, validate_regime
from .qstate import qubit_state
from .thermo import DegenerateSpectrumError, FlowInvariantError, flow_report

THREADS_ENV = "COHAMP_THREADS"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_REGIME = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (
    SteadyStateError,
    ChannelRegimeError,
    FlowInvariantError,
    DegenerateSpectrumError,
    StageError,
    ArithmeticError,
)

SECTIONS = ("machine", "atom", "sweep", "bloch_map", "trajectories", "appendix", "tolerances")
TOP_LEVEL = ("validate_samples", "output", "seed")


class ConfigError(ValueError):
    pass


def default_config_path() -> Path:
    return Path(str(resources.files("cohamp") / "data" / "default_config.json"))


def load_default_config() -> dict:
    return json.loads(default_config_path().read_text())


@dataclass(frozen=True)
class RunConfig:
    machine: MachineParams
    atom: dict
    sweep: dict
    bloch_map: dict
    trajectories: dict
    appendix: dict
    tolerances: dict
    validate_samples: int
    output: str | None
    seed: int

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        missing = [k for k in SECTIONS + TOP_LEVEL if k not in raw]
        if missing:
            raise ConfigError(f"missing config fields: {', '.join(missing)}")
        unknown = set(raw) - set(SECTIONS + TOP_LEVEL)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        try:
            machine = MachineParams(**{k: float(v) for k, v in raw["machine"].items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"machine: {exc}") from exc
        cfg = cls(
            machine=machine,
            **{k: dict(raw[k]) for k in SECTIONS if k != "machine"},
            validate_samples=int(raw["validate_samples"]),
            output=raw["output"],
            seed=int(raw["seed"]),
        )
        cfg._validate()
        return cfg

    def _validate(self):
        a = self.atom
        if set(a) != {"delta", "re_c", "im_c"}:
            raise ConfigError("atom needs exactly delta, re_c, im_c")
        if a["delta"] ** 2 + 4 * (a["re_c"] ** 2 + a["im_c"] ** 2) > 1 + 1e-12:
            raise ConfigError("atom state is not positive: delta^2 + 4|c|^2 > 1")
        for name, tol in self.tolerances.items():
            if not tol > 0:
                raise ConfigError(f"tolerance {name} must be positive")
        s = self.sweep
        if not 0 < s["beta2_over_beta1_min"] <= s["beta2_over_beta1_max"]:
            raise ConfigError("sweep bounds must satisfy 0 < min <= max")
        if int(s["sweep_points"]) < 2:
            raise ConfigError("sweep_points must be at least 2")
        if int(self.bloch_map["resolution"]) < 3:
            raise ConfigError("resolution must be at least 3")
        t = self.trajectories
        if int(t["stages"]) < 0 or int(t["stride"]) < 1 or not t["trajectory_beta2_over_beta1"] > 0:
            raise ConfigError("trajectories need stages >= 0, stride >= 1, positive beta ratio")
        for pt in t["initial_states"]:
            if len(pt) != 2 or pt[0] ** 2 + pt[1] ** 2 > 1 + 1e-12:
                raise ConfigError(f"initial state {pt!r} is not an (x, z) point in the Bloch disk")
        ap = self.appendix
        if abs(ap["stage_c"]) > 0.5 or int(ap["c_points"]) < 2 or int(ap["theta_points"]) < 2:
            raise ConfigError("appendix needs |stage_c| <= 1/2 and at least 2 curve points")
        if self.validate_samples < 0:
            raise ConfigError("validate_samples must be non-negative")

    def atom_state(self) -> np.ndarray:
        a = self.atom
        return qubit_state(a["delta"], complex(a["re_c"], a["im_c"]))

    def output_path(self) -> Path | None:
        return None if self.output is None else Path(self.output)


def _leaf_fields(raw: dict) -> dict:
    """Map each leaf field name to its (section, key); sections are one level deep."""
    out = {}
    for section in SECTIONS:
        for key in raw[section]:
            out[key] = (section, key)
    for key in TOP_LEVEL:
        out[key] = (None, key)
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, overrides: dict) -> dict:
    raw = copy.deepcopy(raw)
    leaves = _leaf_fields(raw)
    for name, value in overrides.items():
        if name not in leaves:
            raise ConfigError(f"unknown override {name!r}")
        section, key = leaves[name]
        (raw if section is None else raw[section])[key] = value
    return raw


# --- output helpers ------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: Path | None, stdout) -> None:
    if path is None:
        stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def thread_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        n = int(value)
        if n < 1:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer")
        return n
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def ordered_map(fn, items) -> list:
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --- commands ------------------------------------------------------------------

def steady_state_record(cfg: RunConfig) -> dict:
    ss = machine_steady_state(cfg.machine, cfg.atom_state())
    return {
        "pi00": ss.pi00,
        "pi01": ss.pi01,
        "pi10": ss.pi10,
        "pi11": ss.pi11,
        "pi_v_re": float(np.real(ss.pi_v)),
        "pi_v_im": float(np.imag(ss.pi_v)),
        "residual": ss.residual,
        "beta_v": cfg.machine.beta_v,
    }


def cmd_steady_state(cfg: RunConfig, stdout) -> None:
    rec = steady_state_record(cfg)
    text = "".join(f"{k} = {fmt(v)}\n" for k, v in rec.items())
    path = cfg.output_path()
    _emit(text, path, stdout)
    if path is not None:
        _emit(json.dumps({k: float(v) for k, v in rec.items()}, indent=2) + "\n",
              path.with_suffix(path.suffix + ".json"), stdout)


SWEEP_HEADER = ("beta2_over_beta1", "Cdot_a", "Cdot_max", "Sdot_tot", "Qdot1", "Qdot2", "Edot_a")


def sweep_rows(cfg: RunConfig) -> list:
    s = cfg.sweep
    ratios = np.linspace(s["beta2_over_beta1_min"], s["beta2_over_beta1_max"], int(s["sweep_points"]))
    rho_a = cfg.atom_state()

    def row(b):
        p = cfg.machine.with_(beta2=float(b) * cfg.machine.beta1)
        f = flow_report(p, rho_a)
        return (b, f.Cdot_a, f.Cdot_max, f.Sdot_tot, f.Qdot1, f.Qdot2, f.Edot_a)

    return ordered_map(row, ratios)


def cmd_sweep(cfg: RunConfig, stdout) -> None:
    _emit(csv_text(SWEEP_HEADER, sweep_rows(cfg)), cfg.output_path(), stdout)


BLOCH_HEADER = ("x", "z", "Cdot_a", "zero_bracket")


def bloch_grid(resolution: int) -> list:
    """Grid points strictly inside the unit disk, row-major in z then x."""
    axis = np.linspace(-1.0, 1.0, resolution)
    return [(i, j, x, z) for j, z in enumerate(axis) for i, x in enumerate(axis) if x * x + z * z < 1 - 1e-12]


def bloch_rows(cfg: RunConfig, resolution: int | None = None) -> list:
    n = int(resolution or cfg.bloch_map["resolution"])
    pts = bloch_grid(n)

    def value(pt):
        _, _, x, z = pt
        return flow_report(cfg.machine, qubit_state(z, x / 2)).Cdot_a

    vals = ordered_map(value, pts)
    grid = {(i, j): v for (i, j, _, _), v in zip(pts, vals)}
    rows = []
    for (i, j, x, z), v in zip(pts, vals):
        nbrs = (grid.get(k) for k in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)))
        bracket = any(w is not None and v * w < 0 for w in nbrs)
        rows.append((x, z, v, bracket))
    return rows


def cmd_bloch_map(cfg: RunConfig, stdout) -> None:
    _emit(csv_text(BLOCH_HEADER, bloch_rows(cfg)), cfg.output_path(), stdout)


TRAJ_HEADER = ("trajectory", "kind", "stage", "x", "z", "kick")


def trajectory_params(cfg: RunConfig) -> MachineParams:
    t = cfg.trajectories
    p = cfg.machine.with_(beta2=t["trajectory_beta2_over_beta1"] * cfg.machine.beta1)
    return p.swapped_temperatures() if t["swap"] else p


def _bloch_xz(rho) -> tuple[float, float]:
    return 2 * float(rho[0, 1].real), float((rho[1, 1] - rho[0, 0]).real)


def trajectory_rows(cfg: RunConfig) -> list:
    t = cfg.trajectories
    p = trajectory_params(cfg)
    stages, stride = int(t["stages"]), int(t["stride"])
    tol = cfg.tolerances["converge_tol"]
    target = fixed_point(p)

    def run(item):
        k, (x0, z0) = item
        rho = qubit_state(z0, x0 / 2)
        out = []
        for stage in range(stages + 1):
            done = stage == stages or _qubit_distance(rho, target) < tol
            if stage % stride == 0 or done:
                out.append((k, "stage", stage, *_bloch_xz(rho), kick_magnitude(rho, p)))
            if done:
                break
            try:
                rho = stage_map(p, rho)
            except (SteadyStateError, ValueError) as exc:
                raise StageError(stage + 1, exc) from exc
        return out

    rows = [r for block in ordered_map(run, enumerate(t["initial_states"])) for r in block]
    rows.append((-1, "fixed_point", -1, *_bloch_xz(target), 0.0))
    return rows


def cmd_trajectories(cfg: RunConfig, stdout) -> None:
    _emit(csv_text(TRAJ_HEADER, trajectory_rows(cfg)), cfg.output_path(), stdout)


APPENDIX_FILES = ("appendix_stages.csv", "appendix_delta_c.csv", "appendix_ratios.csv")


def appendix_tables(cfg: RunConfig) -> dict:
    ap = cfg.appendix
    rho_a, rho_b = example_states(ap["stage_c"])
    diagram = stage_diagram(rho_a, rho_b, theta_unitary(np.pi / 4), degenerate_hamiltonian())
    stages = csv_text(("stage", "label", "C", "A"), diagram.rows())

    root = delta_c_root()
    cs = np.linspace(0.0, 0.5, int(ap["c_points"]))
    dc_rows = [(c, delta_c_curve(c), 0) for c in cs]
    dc_rows.append((root, delta_c_curve(root), 1))
    delta_c = csv_text(("c", "delta_c", "is_root"), dc_rows)

    thetas = np.linspace(0.0, np.pi, int(ap["theta_points"]))
    ratio_rows = []
    for th in thetas:
        tp = ThetaFamilyParams(ap["delta_A"], ap["delta_B"], ap["alpha"], ap["varphi"], float(th))
        ra, rb = coherence_ratios(tp)
        ma, mb = coherence_ratios_matrix(tp)
        if abs(ra - ma) > 1e-10 or abs(rb - mb) > 1e-10:
            raise ArithmeticError(f"ratio closed form disagrees with matrix evolution at theta={th}")
        ratio_rows.append((th, ra, rb))
    ratios = csv_text(("theta", "ratio_A", "ratio_B"), ratio_rows)
    return dict(zip(APPENDIX_FILES, (stages, delta_c, ratios)))


def cmd_appendix(cfg: RunConfig, stdout) -> None:
    out_dir = cfg.output_path() or Path("appendix")
    for name, text in appendix_tables(cfg).items():
        _emit(text, out_dir / name, stdout)
    stdout.write(f"wrote {', '.join(APPENDIX_FILES)} to {out_dir}\n")


def cmd_validate(cfg: RunConfig, stdout) -> None:
    """Config and regime report plus a seeded invariant scan over random atoms."""
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.validate_samples):
        z = rng.uniform(-0.95, 0.95)
        radius = np.sqrt(1 - z * z) * rng.uniform(0, 0.95)
        angle = rng.uniform(0, 2 * np.pi)
        flow_report(cfg.machine, qubit_state(z, radius * np.exp(1j * angle) / 2))
    stdout.write(f"config ok; {cfg.validate_samples} random atom states pass all flow invariants\n")


COMMANDS = {
    "steady-state": cmd_steady_state,
    "sweep": cmd_sweep,
    "bloch-map": cmd_bloch_map,
    "trajectories": cmd_trajectories,
    "appendix": cmd_appendix,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohamp", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file (default: the shipped reference parameters)")
    parser.add_argument("--strict", action="store_true", help="exit 2 on weak-coupling regime warnings")
    raw = load_default_config()
    for name in _leaf_fields(raw):
        if name == "initial_states":
            parser.add_argument("--initial-states", dest="initial_states", type=json.loads,
                                help="JSON list of [x, z] pairs")
            continue
        parser.add_argument("--" + name.replace("_", "-"), dest=name, type=_parse_value, default=None)
    return parser


def _error(stderr, msg: str) -> None:
    stderr.write(f"cohamp: {msg}\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    leaf_names = set(_leaf_fields(load_default_config()))
    overrides = {k: v for k, v in vars(args).items() if k in leaf_names and v is not None}
    try:
        raw = json.loads(Path(args.config).read_text()) if args.config else load_default_config()
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if any(s not in raw for s in SECTIONS):
            raise ConfigError("config is missing a section")
        cfg = RunConfig.from_dict(apply_overrides(raw, overrides))
        thread_count()
    except (OSError, json.JSONDecodeError, ConfigError, TypeError, KeyError, ValueError) as exc:
        _error(stderr, f"invalid config: {exc}")
        return EXIT_CONFIG

    warnings_ = validate_regime(cfg.machine)
    for w in warnings_:
        _error(stderr, f"regime warning: {w}")
    if warnings_ and args.strict:
        return EXIT_REGIME
    try:
        COMMANDS[args.command](cfg, stdout)
    except NUMERICAL_ERRORS as exc:
        _error(stderr, f"numerical failure: {type(exc).__name__}: {exc}")
        return EXIT_NUMERICAL
    return EXIT_OK


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
