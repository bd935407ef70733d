"""Synthetic digital-twin experiments: profiles, truth traces, estimator runs
and SOC error metrics."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from sgdkf import battery_model as bm
from sgdkf.errors import BadSpec, DivergenceError, ModelError, TraceMismatch
from sgdkf.filters import NoiseConfig
from sgdkf.supervisor import (
    StepRecord,
    SupervisorOptions,
    dual_ekf_step,
    new_session,
    sg_dkf_step,
)

ONE_C_AMPS = 2.9
ALGORITHMS = ("dual_ekf", "sg_dkf")
PROFILE_KINDS = ("constant", "pulse_dynamic", "from_file")
SOC_EXHAUSTED = -0.05
CONVERGED_PCT = 1.0


@dataclass(frozen=True)
class CurrentProfile:
    kind: str
    duration_s: float = 3600.0
    dt: float = 1.0
    amplitude_a: float = ONE_C_AMPS
    seed: int = 0
    samples: Optional[tuple] = None
    one_c_a: float = ONE_C_AMPS

    @property
    def n_samples(self) -> int:
        if self.kind == "from_file":
            return len(self.samples or ())
        n = self.duration_s / self.dt
        return int(round(n))

    def validate(self) -> None:
        if self.kind not in PROFILE_KINDS:
            raise BadSpec(f"unknown profile kind {self.kind!r}")
        if not self.dt > 0:
            raise BadSpec("profile dt must be > 0")
        if self.kind == "from_file":
            if self.samples is None:
                raise BadSpec("from_file profile has no samples")
        else:
            n = self.duration_s / self.dt
            if abs(n - round(n)) > 1e-9:
                raise BadSpec("duration_s / dt must be an integer")
        if self.n_samples < 10:
            raise BadSpec(f"profile needs at least 10 samples, got {self.n_samples}")


def generate_profile(spec: CurrentProfile) -> np.ndarray:
    """Current sequence in amperes, positive on discharge.

    ``pulse_dynamic`` is a driving-cycle surrogate: piecewise-constant
    segments of 5-60 s mixing discharge pulses up to 3C, rests, and
    regenerative pulses down to -2C. Regenerative time never exceeds 20% of
    the elapsed profile.
    """
    spec.validate()
    n = spec.n_samples
    if spec.kind == "constant":
        return np.full(n, float(spec.amplitude_a))
    if spec.kind == "from_file":
        out = np.asarray(spec.samples, dtype=float)
        if not np.all(np.isfinite(out)):
            raise BadSpec("profile samples contain non-finite values")
        return out

    rng = np.random.default_rng(spec.seed)
    one_c = spec.one_c_a
    out = np.empty(n)
    filled = 0
    regen = 0
    while filled < n:
        seg = max(1, int(round(int(rng.integers(5, 61)) / spec.dt)))
        draw = rng.random()
        level = rng.random()
        if draw < 0.15 and regen + seg <= 0.2 * (filled + seg):
            amp = -2.0 * one_c * level
            regen += min(seg, n - filled)
        elif draw < 0.25:
            amp = 0.0
        else:
            amp = one_c * (0.2 + 2.8 * level)
        out[filled:filled + seg] = amp
        filled += seg
    return out


def load_profile_csv(path) -> tuple:
    """Read a two-column ``time_s,current_a`` CSV (header required)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time_s", "current_a"]:
            raise BadSpec(f"{path}: header must be 'time_s,current_a'")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise BadSpec(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                samples.append(float(row[1]))
            except ValueError as exc:
                raise BadSpec(f"{path}:{lineno}: {exc}") from exc
    return tuple(samples)


@dataclass
class TruthTrace:
    time_s: np.ndarray
    current_a: np.ndarray
    true_soc: np.ndarray
    true_state: np.ndarray
    clean_voltage: np.ndarray
    measured_voltage: np.ndarray
    truth_theta: bm.ThetaVector
    terminated_early: bool = False

    def __len__(self) -> int:
        return len(self.current_a)

    @property
    def trace_id(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.current_a).tobytes())
        h.update(np.ascontiguousarray(self.measured_voltage).tobytes())
        return h.hexdigest()[:16]


def simulate_truth(
    currents,
    truth_theta,
    params: bm.CellParameters,
    initial_soc: float,
    noise_std_v: float,
    seed: int,
    process_noise_std=None,
) -> TruthTrace:
    """Run the model as the plant and add seeded Gaussian voltage noise.

    ``process_noise_std`` (5 standard deviations, optional) perturbs each
    state transition. The trace stops early, flagged, once SOC falls below
    -0.05.
    """
    if not 0.05 <= initial_soc <= 1.0:
        raise BadSpec(f"initial_soc must lie in [0.05, 1], got {initial_soc}")
    currents = np.asarray(currents, dtype=float)
    theta = bm.ThetaVector(*truth_theta)
    n = currents.size
    rng = np.random.default_rng(seed)
    meas_noise = rng.normal(0.0, noise_std_v, n) if noise_std_v > 0 else np.zeros(n)
    proc_rng = np.random.default_rng([seed, 1])
    wstd = None if process_noise_std is None else np.asarray(process_noise_std, dtype=float)

    states = np.empty((n, 5))
    clean = np.empty(n)
    state = bm.ElectrochemicalState(initial_soc, 0.0, 0.0, 0.0, 0.0)
    kept = n
    for k in range(n):
        if state.soc < SOC_EXHAUSTED:
            kept = k
            break
        states[k] = state
        clean[k] = bm.terminal_voltage(state, theta, params, currents[k])
        state = bm.step_state(state, theta, params, currents[k])
        if wstd is not None:
            state = bm.ElectrochemicalState(*(np.asarray(state) + wstd * proc_rng.standard_normal(5)))

    return TruthTrace(
        time_s=np.arange(kept) * params.dt,
        current_a=currents[:kept].copy(),
        true_soc=states[:kept, 0].copy(),
        true_state=states[:kept].copy(),
        clean_voltage=clean[:kept].copy(),
        measured_voltage=clean[:kept] + meas_noise[:kept],
        truth_theta=theta,
        terminated_early=kept < n,
    )


@dataclass(frozen=True)
class EstimatorSettings:
    """Initial covariances and supervisor options shared by both algorithms."""

    # SOC std ~3%; electrolyte deviations start at rest, so their prior is tight.
    p0_state_diag: tuple = (1e-3, 1e-8, 1e-8, 1e-2, 1e-2)
    # Capacity and stoichiometry spans are datasheet-grade, end stoichiometries are not.
    p0_theta_rel_std: float | tuple = (0.005, 0.005, 0.005, 0.05, 0.05)
    options: SupervisorOptions = SupervisorOptions()


@dataclass(frozen=True)
class RunMetrics:
    rmse_soc_pct: float
    max_abs_err_pct: float
    convergence_step: int
    freeze_fraction: float
    n_steps: int
    trace_id: str
    algorithm: str = ""
    condition: str = ""
    init_soc_err_pct: float = 0.0
    diverged: bool = False
    divergence_reason: str = ""
    alpha_min: float = math.nan
    damped: bool = False


def compute_metrics(soc_true, soc_est, sigmas, trace_id: str, **labels) -> RunMetrics:
    err = (np.asarray(soc_est, dtype=float) - np.asarray(soc_true, dtype=float)) * 100.0
    sig = np.asarray(sigmas, dtype=int)
    if err.size == 0:
        return RunMetrics(math.nan, math.nan, -1, math.nan, 0, trace_id, **labels)
    bad = np.flatnonzero(np.abs(err) >= CONVERGED_PCT)
    if bad.size == 0:
        conv = 0
    elif bad[-1] == err.size - 1:
        conv = -1
    else:
        conv = int(bad[-1] + 1)
    return RunMetrics(
        rmse_soc_pct=float(np.sqrt(np.mean(err**2))),
        max_abs_err_pct=float(np.max(np.abs(err))),
        convergence_step=conv,
        freeze_fraction=float(np.mean(sig == 0)),
        n_steps=int(err.size),
        trace_id=trace_id,
        **labels,
    )


def initial_theta(truth_theta, init_theta_error) -> np.ndarray:
    rel = np.broadcast_to(np.asarray(init_theta_error, dtype=float), (5,))
    return np.asarray(truth_theta, dtype=float) * (1.0 + rel)


def run_estimator(
    trace: TruthTrace,
    algo: str,
    init_soc_err_pct: float,
    init_theta_error,
    noise: NoiseConfig,
    params: bm.CellParameters,
    settings: EstimatorSettings = EstimatorSettings(),
    condition: str = "",
    observer: Optional[Callable] = None,
):
    """Drive one estimator over a trace; returns ``(records, metrics)``.

    The estimator consumes only the current and measured voltage of each
    step. On divergence the records up to that point are returned and
    ``metrics.diverged`` is set. ``observer(before, after, record)``, if
    given, sees every session transition (used by audits).
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if len(trace) == 0:
        raise BadSpec("empty trace")
    step = sg_dkf_step if algo == "sg_dkf" else dual_ekf_step

    soc0 = min(max(trace.true_soc[0] * (1.0 - init_soc_err_pct / 100.0), 0.0), 1.0)
    theta0 = initial_theta(trace.truth_theta, init_theta_error)
    rel_std = np.broadcast_to(np.asarray(settings.p0_theta_rel_std, dtype=float), (5,))
    p_theta0 = np.diag((rel_std * theta0) ** 2)
    session = new_session(
        np.array([soc0, 0.0, 0.0, 0.0, 0.0]),
        np.diag(settings.p0_state_diag),
        theta0,
        p_theta0,
        params,
        noise,
        settings.options,
    )

    records: list[StepRecord] = []
    reason = ""
    alpha_min, damped = math.inf, False
    constants = None
    currents = trace.current_a
    volts = trace.measured_voltage
    for k in range(len(trace)):
        try:
            before = session
            session, rec = step(session, float(currents[k]), float(volts[k]))
        except (DivergenceError, ModelError) as exc:
            if getattr(exc, "record", None) is not None:
                records.append(exc.record)
            reason = f"{type(exc).__name__}: {exc}"
            break
        records.append(rec)
        if observer is not None:
            observer(before, session, rec)
        if session.constants is not constants:
            constants = session.constants
            alpha_min = min(alpha_min, constants.alpha)
            damped = damped or constants.damped

    metrics = compute_metrics(
        trace.true_soc[: len(records)],
        [r.soc_est for r in records],
        [r.sigma for r in records],
        trace.trace_id,
        algorithm=algo,
        condition=condition,
        init_soc_err_pct=float(init_soc_err_pct),
        diverged=bool(reason),
        divergence_reason=reason,
        alpha_min=alpha_min if math.isfinite(alpha_min) else math.nan,
        damped=damped,
    )
    return records, metrics


@dataclass(frozen=True)
class Comparison:
    rmse_reduction_pct: float
    convergence_speedup_steps: Optional[int]
    rows: tuple


def compare(metrics_a: RunMetrics, metrics_b: RunMetrics) -> Comparison:
    """Relative RMSE reduction of ``b`` against baseline ``a``."""
    if metrics_a.trace_id != metrics_b.trace_id:
        raise TraceMismatch(f"metrics come from different traces: {metrics_a.trace_id} vs {metrics_b.trace_id}")
    if metrics_a.rmse_soc_pct == 0.0:
        reduction = 0.0
    else:
        reduction = (metrics_a.rmse_soc_pct - metrics_b.rmse_soc_pct) / metrics_a.rmse_soc_pct * 100.0
    ca, cb = metrics_a.convergence_step, metrics_b.convergence_step
    speedup = ca - cb if ca >= 0 and cb >= 0 else None
    rows = tuple(
        {
            "condition": m.condition,
            "init_soc_err_pct": m.init_soc_err_pct,
            "algorithm": m.algorithm,
            "rmse_pct": m.rmse_soc_pct,
        }
        for m in (metrics_a, metrics_b)
    )
    return Comparison(reduction, speedup, rows)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    condition: str
    profile: CurrentProfile
    initial_soc: float = 1.0
    init_soc_err_pct: float = 0.0
    algorithms: tuple = ALGORITHMS


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    trace: TruthTrace
    runs: dict = field(default_factory=dict)  # algo -> (records, metrics)


def run_scenario(
    spec: ScenarioSpec,
    params: bm.CellParameters,
    noise: NoiseConfig,
    settings: EstimatorSettings,
    noise_std_v: float,
    init_theta_error,
    seed: int,
    process_noise_std=None,
    algorithms: Optional[Sequence[str]] = None,
) -> ScenarioResult:
    currents = generate_profile(spec.profile)
    trace = simulate_truth(
        currents, bm.nominal_theta(params), params, spec.initial_soc,
        noise_std_v, seed, process_noise_std,
    )
    result = ScenarioResult(spec, trace)
    for algo in algorithms or spec.algorithms:
        result.runs[algo] = run_estimator(
            trace, algo, spec.init_soc_err_pct, init_theta_error, noise, params,
            settings, condition=spec.condition,
        )
    return result
