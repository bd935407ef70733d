"""Command-line front end that runs the twin scenarios of a JSON
configuration and writes CSV traces with a summary table.

Exit codes: 0 success, 2 configuration error, 3 model error while
simulating the truth trace, 4 estimator divergence (outputs are still
written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from sgdkf import battery_model as bm
from sgdkf.errors import BadSpec, ConfigError, ModelError, SgdkfError
from sgdkf.filters import NoiseConfig
from sgdkf.scenario import (
    ALGORITHMS,
    PROFILE_KINDS,
    CurrentProfile,
    EstimatorSettings,
    ScenarioSpec,
    TruthTrace,
    generate_profile,
    load_profile_csv,
    run_estimator,
    simulate_truth,
)
from sgdkf.supervisor import StepRecord, SupervisorOptions

log = logging.getLogger("sgdkf")

CONFIG_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_DIVERGED = 0, 2, 3, 4

TRUTH_HEADER = ("time_s", "current_a", "true_soc", "clean_v", "measured_v")
RECORD_HEADER = (
    "step", "time_s", "current_a", "measured_v", "soc_true", "soc_est", "soc_err_pct",
    "innovation_v", "delta_k", "sigma",
    "theta_dp", "theta_dn", "theta_qall", "theta_xsp0", "theta_xsn0",
)
SUMMARY_HEADER = (
    "condition", "init_soc_err_pct", "algorithm", "rmse_pct", "max_err_pct",
    "convergence_step", "freeze_fraction",
)
SWEEPABLE = ("init_soc_err", "kappa", "noise_std_v", "r_meas_scale", "q_state_scale")

# --- schema -----------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_FRACTION = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_VEC5 = {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 5, "maxItems": 5}
_POS_VEC5 = {"type": "array", "items": _POS, "minItems": 5, "maxItems": 5}
_OCV = {
    "type": "object",
    "required": ["breakpoints", "voltages"],
    "additionalProperties": False,
    "properties": {
        "breakpoints": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 4},
        "voltages": {"type": "array", "items": _NUM, "minItems": 4},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "cell", "scenarios"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "cell": {
            "type": "object",
            "required": ["q_all"],
            "additionalProperties": False,
            "properties": {
                "q_all": _POS, "c_ref": _POS, "peukert_n": {"type": "number", "minimum": 1},
                "d_p": _FRACTION, "d_n": _FRACTION,
                "tau_sp": _POS, "tau_sn": _POS, "tau_e": _POS,
                "g_p": _NUM, "g_n": _NUM, "p_con_a": _NUM, "p_con_b": _NUM,
                "t_plus": _FRACTION, "c0": _POS, "temperature_k": _POS,
                "v_p": _POS, "v_n": _POS, "p_rxn_p": _POS, "p_rxn_n": _POS,
                "r_ohm": {"type": "number", "minimum": 0},
                "x_sp0": _FRACTION, "x_sn0": _FRACTION, "dt": _POS,
                "ocv_p": _OCV, "ocv_n": _OCV,
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "noise_std_v": {"type": "number", "minimum": 0},
                "q_state_diag": _POS_VEC5,
                "r_meas": _POS,
                "q_theta_rel_std": {"type": "number", "minimum": 0},
                "process_noise_std": {"oneOf": [_VEC5, {"type": "null"}]},
            },
        },
        "estimator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "p0_state_diag": _POS_VEC5,
                "p0_theta_rel_std": _POS_VEC5,
                "init_theta_error": {
                    "type": "array", "minItems": 5, "maxItems": 5,
                    "items": {"type": "number", "exclusiveMinimum": -1, "maximum": 1},
                },
            },
        },
        "flags": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kappa": {"type": "number", "minimum": 0, "maximum": 0.1},
                "n_recompute": {"type": "integer", "minimum": 1},
                "joseph_form": {"type": "boolean"},
            },
        },
        "scenarios": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "profile"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
                    "condition": {"type": "string"},
                    "initial_soc": {"type": "number", "minimum": 0.05, "maximum": 1},
                    "init_soc_err_pct": {"type": "number", "minimum": 0, "exclusiveMaximum": 100},
                    "algorithms": {
                        "type": "array", "minItems": 1, "uniqueItems": True,
                        "items": {"enum": list(ALGORITHMS)},
                    },
                    "profile": {
                        "type": "object",
                        "required": ["kind"],
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"enum": list(PROFILE_KINDS)},
                            "duration_s": _POS,
                            "dt": _POS,
                            "amplitude_a": _NUM,
                            "seed": {"type": "integer", "minimum": 0},
                            "one_c_a": _POS,
                            "path": {"type": "string", "minLength": 1},
                        },
                        "if": {"properties": {"kind": {"const": "from_file"}}},
                        "then": {"required": ["path"]},
                    },
                },
            },
        },
    },
}


# --- typed configuration ------------------------------------------------------

@dataclass(frozen=True)
class ProfileConfig:
    kind: str
    duration_s: float = 3600.0
    dt: float = 1.0
    amplitude_a: float = 2.9
    seed: int = 0
    one_c_a: float = 2.9
    path: Optional[str] = None

    def to_profile(self) -> CurrentProfile:
        samples = load_profile_csv(self.path) if self.kind == "from_file" else None
        return CurrentProfile(
            kind=self.kind, duration_s=self.duration_s, dt=self.dt,
            amplitude_a=self.amplitude_a, seed=self.seed,
            samples=samples, one_c_a=self.one_c_a,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    profile: ProfileConfig
    condition: str = ""
    initial_soc: float = 1.0
    init_soc_err_pct: float = 0.0
    algorithms: tuple = ALGORITHMS

    def to_spec(self) -> ScenarioSpec:
        return ScenarioSpec(
            name=self.name, condition=self.condition or self.name,
            profile=self.profile.to_profile(), initial_soc=self.initial_soc,
            init_soc_err_pct=self.init_soc_err_pct, algorithms=self.algorithms,
        )


@dataclass(frozen=True)
class RunConfig:
    cell: bm.CellParameters
    scenarios: tuple
    seed: int = 1
    output_dir: str = "out"
    noise_std_v: float = 0.005
    q_state_diag: tuple = (1e-10, 1e-12, 1e-12, 1e-4, 1e-4)
    r_meas: float = 0.005**2
    q_theta_rel_std: float = 1e-6
    process_noise_std: Optional[tuple] = None
    p0_state_diag: tuple = EstimatorSettings.p0_state_diag
    p0_theta_rel_std: tuple = EstimatorSettings.p0_theta_rel_std
    init_theta_error: tuple = (0.05, -0.05, 0.05, -0.05, 0.05)
    kappa: float = 1e-3
    n_recompute: int = 100
    joseph_form: bool = True
    version: int = CONFIG_VERSION

    def noise_config(self) -> NoiseConfig:
        theta = np.asarray(bm.nominal_theta(self.cell))
        return NoiseConfig(
            q_state=np.diag(self.q_state_diag),
            r_meas=self.r_meas,
            q_theta=np.diag((self.q_theta_rel_std * theta) ** 2),
        )

    def estimator_settings(self) -> EstimatorSettings:
        return EstimatorSettings(
            p0_state_diag=tuple(self.p0_state_diag),
            p0_theta_rel_std=tuple(self.p0_theta_rel_std),
            options=SupervisorOptions(
                kappa=self.kappa, n_recompute=self.n_recompute, joseph_form=self.joseph_form
            ),
        )

    def to_dict(self) -> dict:
        """Effective configuration as a schema-valid JSON document."""
        cell = {}
        for f in fields(bm.CellParameters):
            value = getattr(self.cell, f.name)
            cell[f.name] = asdict(value) if isinstance(value, bm.OcvCurve) else value
        for name in ("ocv_p", "ocv_n"):
            cell[name] = {k: list(v) for k, v in cell[name].items()}
        scenarios = []
        for s in self.scenarios:
            prof = {k: v for k, v in asdict(s.profile).items() if v is not None}
            scenarios.append({
                "name": s.name, "condition": s.condition, "initial_soc": s.initial_soc,
                "init_soc_err_pct": s.init_soc_err_pct, "algorithms": list(s.algorithms),
                "profile": prof,
            })
        return {
            "version": self.version,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "cell": cell,
            "noise": {
                "noise_std_v": self.noise_std_v,
                "q_state_diag": list(self.q_state_diag),
                "r_meas": self.r_meas,
                "q_theta_rel_std": self.q_theta_rel_std,
                "process_noise_std": None if self.process_noise_std is None else list(self.process_noise_std),
            },
            "estimator": {
                "p0_state_diag": list(self.p0_state_diag),
                "p0_theta_rel_std": list(self.p0_theta_rel_std),
                "init_theta_error": list(self.init_theta_error),
            },
            "flags": {"kappa": self.kappa, "n_recompute": self.n_recompute, "joseph_form": self.joseph_form},
            "scenarios": scenarios,
        }


def _field_path(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def _floats(seq) -> tuple:
    return tuple(float(v) for v in seq)


def parse_config(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    """Validate a decoded JSON document and build the effective configuration.

    Relative profile paths resolve against ``base_dir``.
    """
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = [f"field '{_field_path(e)}': {e.message}" for e in errors]
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(lines))

    cell_doc = dict(doc["cell"])
    for name in ("ocv_p", "ocv_n"):
        if name in cell_doc:
            try:
                cell_doc[name] = bm.OcvCurve(tuple(cell_doc[name]["breakpoints"]), tuple(cell_doc[name]["voltages"]))
            except ValueError as exc:
                raise ConfigError(f"field 'cell.{name}': {exc}") from exc
    try:
        cell = bm.CellParameters(**cell_doc)
    except ValueError as exc:
        raise ConfigError(f"field 'cell': {exc}") from exc

    scenarios = []
    seen = set()
    for i, s in enumerate(doc["scenarios"]):
        if s["name"] in seen:
            raise ConfigError(f"field 'scenarios.{i}.name': duplicate scenario name {s['name']!r}")
        seen.add(s["name"])
        prof = dict(s["profile"])
        if prof["kind"] == "from_file":
            path = Path(prof["path"])
            if not path.is_absolute():
                path = (base_dir / path).resolve()
            if not path.is_file():
                raise ConfigError(f"field 'scenarios.{i}.profile.path': file not found: {path}")
            prof["path"] = str(path)
        profile = ProfileConfig(**prof)
        try:
            profile.to_profile().validate()
        except BadSpec as exc:
            raise ConfigError(f"field 'scenarios.{i}.profile': {exc}") from exc
        algos = tuple(a for a in ALGORITHMS if a in s.get("algorithms", ALGORITHMS))
        scenarios.append(ScenarioConfig(
            name=s["name"], profile=profile, condition=s.get("condition", ""),
            initial_soc=float(s.get("initial_soc", 1.0)),
            init_soc_err_pct=float(s.get("init_soc_err_pct", 0.0)),
            algorithms=algos,
        ))

    noise = doc.get("noise", {})
    est = doc.get("estimator", {})
    flags = doc.get("flags", {})
    d = RunConfig
    pns = noise.get("process_noise_std")
    return RunConfig(
        cell=cell,
        scenarios=tuple(scenarios),
        seed=int(doc.get("seed", d.seed)),
        output_dir=doc.get("output_dir", d.output_dir),
        noise_std_v=float(noise.get("noise_std_v", d.noise_std_v)),
        q_state_diag=_floats(noise.get("q_state_diag", d.q_state_diag)),
        r_meas=float(noise.get("r_meas", d.r_meas)),
        q_theta_rel_std=float(noise.get("q_theta_rel_std", d.q_theta_rel_std)),
        process_noise_std=None if pns is None else _floats(pns),
        p0_state_diag=_floats(est.get("p0_state_diag", d.p0_state_diag)),
        p0_theta_rel_std=_floats(est.get("p0_theta_rel_std", d.p0_theta_rel_std)),
        init_theta_error=_floats(est.get("init_theta_error", d.init_theta_error)),
        kappa=float(flags.get("kappa", d.kappa)),
        n_recompute=int(flags.get("n_recompute", d.n_recompute)),
        joseph_form=bool(flags.get("joseph_form", d.joseph_form)),
        version=int(doc["version"]),
    )


def default_config_path() -> Path:
    return Path(str(resources.files("sgdkf").joinpath("configs/default.json")))


def load_config(path, env=None) -> RunConfig:
    """Read and validate a JSON config; ``SGDKF_SEED`` in ``env`` overrides the seed.

    The name ``default`` selects the bundled configuration unless a file of
    that name exists.
    """
    env = os.environ if env is None else env
    path = Path(path)
    if str(path) == "default" and not path.exists():
        path = default_config_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    cfg = parse_config(doc, path.parent)
    seed = env.get("SGDKF_SEED")
    if seed is not None:
        try:
            value = int(seed)
        except ValueError:
            raise ConfigError(f"SGDKF_SEED must be a non-negative integer, got {seed!r}") from None
        if value < 0:
            raise ConfigError(f"SGDKF_SEED must be a non-negative integer, got {seed!r}")
        cfg = replace(cfg, seed=value)
    return cfg


# --- output -------------------------------------------------------------------

def fmt(value) -> str:
    """Locale-independent, round-trippable text for one CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def truth_rows(trace: TruthTrace):
    for k in range(len(trace)):
        yield (trace.time_s[k], trace.current_a[k], trace.true_soc[k],
               trace.clean_voltage[k], trace.measured_voltage[k])


def record_rows(records: list[StepRecord], trace: TruthTrace):
    for r in records:
        soc_true = float(trace.true_soc[r.step])
        yield (r.step, r.time_s, r.current_a, r.measured_v, soc_true, r.soc_est,
               (r.soc_est - soc_true) * 100.0, r.innovation_v, r.delta_k, r.sigma, *r.theta)


def summary_row(metrics) -> tuple:
    return (metrics.condition, metrics.init_soc_err_pct, metrics.algorithm, metrics.rmse_soc_pct,
            metrics.max_abs_err_pct, metrics.convergence_step, metrics.freeze_fraction)


def run_metadata(name: str, metrics, **extra) -> dict:
    alpha = metrics.alpha_min
    return {
        "scenario": name,
        "algorithm": metrics.algorithm,
        "alpha_min": None if math.isnan(alpha) else alpha,
        "damped": metrics.damped,
        "diverged": metrics.diverged,
        "divergence_reason": metrics.divergence_reason,
        "n_steps": metrics.n_steps,
        "trace_id": metrics.trace_id,
        **extra,
    }


def json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- commands -----------------------------------------------------------------

@dataclass
class _Outcome:
    diverged: list = field(default_factory=list)


def _simulate(cfg: RunConfig, scenario: ScenarioConfig) -> tuple[ScenarioSpec, TruthTrace]:
    spec = scenario.to_spec()
    currents = generate_profile(spec.profile)
    trace = simulate_truth(
        currents, bm.nominal_theta(cfg.cell), cfg.cell, spec.initial_soc,
        cfg.noise_std_v, cfg.seed, cfg.process_noise_std,
    )
    if trace.terminated_early:
        log.info("scenario %s: SOC exhausted after %d steps", scenario.name, len(trace))
    return spec, trace


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    for scenario in cfg.scenarios:
        _, trace = _simulate(cfg, scenario)
        atomic_write(out / f"truth_{scenario.name}.csv", csv_text(TRUTH_HEADER, truth_rows(trace)))
    atomic_write(out / "config.json", json_text(cfg.to_dict()))
    return EXIT_OK


def _estimate_all(cfg: RunConfig, algos, out: Path, write_records: bool, **meta_extra):
    noise = cfg.noise_config()
    settings = cfg.estimator_settings()
    summary, meta = [], []
    outcome = _Outcome()
    for scenario in cfg.scenarios:
        spec, trace = _simulate(cfg, scenario)
        for algo in (a for a in algos if a in scenario.algorithms):
            records, metrics = run_estimator(
                trace, algo, spec.init_soc_err_pct, cfg.init_theta_error,
                noise, cfg.cell, settings, condition=spec.condition,
            )
            if write_records:
                atomic_write(
                    out / f"records_{scenario.name}_{algo}.csv",
                    csv_text(RECORD_HEADER, record_rows(records, trace)),
                )
            summary.append(summary_row(metrics))
            meta.append(run_metadata(scenario.name, metrics, **meta_extra))
            if metrics.diverged:
                log.error("%s/%s diverged: %s", scenario.name, algo, metrics.divergence_reason)
                outcome.diverged.append((scenario.name, algo))
    return summary, meta, outcome


def cmd_estimate(cfg: RunConfig, algo: str, out: Path) -> int:
    algos = ALGORITHMS if algo == "both" else (algo,)
    summary, meta, outcome = _estimate_all(cfg, algos, out, write_records=True)
    atomic_write(out / "summary.csv", csv_text(SUMMARY_HEADER, summary))
    atomic_write(out / "metadata.json", json_text({"seed": cfg.seed, "version": cfg.version, "runs": meta}))
    atomic_write(out / "config.json", json_text(cfg.to_dict()))
    return EXIT_DIVERGED if outcome.diverged else EXIT_OK


def parse_values(raw: list[str]) -> list[float]:
    values = []
    for chunk in raw:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                values.append(float(item))
            except ValueError:
                raise ConfigError(f"--values: not a number: {item!r}") from None
    if not values:
        raise ConfigError("--values: empty value list")
    return values


def apply_sweep(cfg: RunConfig, param: str, value: float) -> RunConfig:
    """Return ``cfg`` with one sweepable setting replaced, validated."""
    if param == "init_soc_err":
        if not 0.0 <= value < 100.0:
            raise ConfigError(f"init_soc_err must lie in [0, 100), got {value}")
        scenarios = tuple(replace(s, init_soc_err_pct=value) for s in cfg.scenarios)
        return replace(cfg, scenarios=scenarios)
    if param == "kappa":
        if not 0.0 <= value <= 0.1:
            raise ConfigError(f"kappa must lie in [0, 0.1], got {value}")
        return replace(cfg, kappa=value)
    if param == "noise_std_v":
        if value < 0.0:
            raise ConfigError(f"noise_std_v must be >= 0, got {value}")
        return replace(cfg, noise_std_v=value)
    if param in ("r_meas_scale", "q_state_scale"):
        if not value > 0.0:
            raise ConfigError(f"{param} must be > 0, got {value}")
        if param == "r_meas_scale":
            return replace(cfg, r_meas=cfg.r_meas * value)
        return replace(cfg, q_state_diag=tuple(q * value for q in cfg.q_state_diag))
    raise ConfigError(f"--param: {param!r} is not sweepable; choose from {', '.join(SWEEPABLE)}")


def cmd_sweep(cfg: RunConfig, param: str, raw_values: list[str], out: Path) -> int:
    values = parse_values(raw_values)
    variants = [apply_sweep(cfg, param, v) for v in values]  # validate before running
    rows, meta = [], []
    diverged = False
    for value, variant in zip(values, variants):
        summary, run_meta, outcome = _estimate_all(
            variant, ALGORITHMS, out, write_records=False, param=param, value=value
        )
        rows.extend((param, value, *row) for row in summary)
        meta.extend(run_meta)
        diverged = diverged or bool(outcome.diverged)
    atomic_write(out / f"sweep_{param}.csv", csv_text(("param", "value", *SUMMARY_HEADER), rows))
    atomic_write(out / f"sweep_{param}_metadata.json", json_text({"seed": cfg.seed, "runs": meta}))
    return EXIT_DIVERGED if diverged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdkf", description=" ".join(__doc__.split("\n\n")[0].split()))
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON run configuration ('default' for the bundled one)")
        p.add_argument("--out", help="output directory (default: config output_dir)")

    common(sub.add_parser("simulate", help="write truth traces"))
    est = sub.add_parser("estimate", help="run estimators and write records and a summary")
    common(est)
    est.add_argument("--algo", choices=(*ALGORITHMS, "both"), default="both")
    sw = sub.add_parser("sweep", help="rerun the suite over values of one setting")
    common(sw)
    sw.add_argument("--param", required=True, help=f"one of: {', '.join(SWEEPABLE)}")
    sw.add_argument("--values", nargs="*", default=[], help="numbers, space or comma separated")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        out = Path(args.out if args.out is not None else cfg.output_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "estimate":
            return cmd_estimate(cfg, args.algo, out)
        return cmd_sweep(cfg, args.param, args.values, out)
    except (ConfigError, BadSpec) as exc:
        print(f"sgdkf: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"sgdkf: model error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except SgdkfError as exc:
        print(f"sgdkf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
