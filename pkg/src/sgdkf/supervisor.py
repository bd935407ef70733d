"""Lyapunov dead-zone supervisor gating the parameter EKF.

Per step: run the state EKF, form the innovation threshold from the
Lyapunov constants, the state covariance and the current gain, and let the
parameter EKF update only while the innovation magnitude stays strictly
below that threshold. Otherwise the parameter estimate and its covariance
are carried over untouched.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from sgdkf import battery_model as bm
from sgdkf.errors import DegenerateA, DivergenceDetected
from sgdkf.filters import GaussianEstimate, NoiseConfig, param_ekf_step, state_ekf_step
from sgdkf.numerics import (
    SCHUR_MARGIN,
    check_spd,
    lambda_min_symmetric,
    solve_discrete_lyapunov,
    spectral_radius,
    two_norm,
)

log = logging.getLogger(__name__)

EPSILON_FLOOR = 1e-6
EPSILON_CAP = 1e6
ZERO_GAIN = 1e-15


@dataclass(frozen=True)
class StabilityConstants:
    p_lyap: np.ndarray
    epsilon: float
    alpha: float
    beta: float
    lambda_min_q: float
    norm_i_plus_p: float
    a_used: np.ndarray
    q_lyap: np.ndarray
    damped: bool = False

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def gain_ratio(self) -> float:
        """sqrt(lambda_min(Q) / ||I + P||), the state-error weight in the threshold."""
        return math.sqrt(self.lambda_min_q / self.norm_i_plus_p)


def compute_stability_constants(a_jac, q, kappa: float = 1e-3) -> StabilityConstants:
    """Solve the Lyapunov equation for ``a_jac`` and derive epsilon, alpha, beta.

    Unit-circle modes (the SOC integrator) are pulled inside by scaling the
    whole matrix with ``(1 - kappa) / max(rho, 1)``; ``damped`` records it.
    """
    if not 0.0 <= kappa <= 0.1:
        raise ValueError(f"kappa must lie in [0, 0.1], got {kappa}")
    q = check_spd(q)
    a = np.asarray(a_jac, dtype=float)
    rho = spectral_radius(a)
    damped = rho >= 1.0 - SCHUR_MARGIN
    if damped:
        a = a * (1.0 - kappa) / max(rho, 1.0)
    p = solve_discrete_lyapunov(a, q)
    lam = lambda_min_symmetric(q)
    apa_norm = two_norm(a.T @ p @ a)
    if apa_norm == 0.0:
        if np.any(a):
            raise DegenerateA("A^T P A vanished for a non-zero A")
        epsilon = EPSILON_FLOOR
    else:
        # alpha = lambda_min(Q) / 2; a floor here would make alpha negative
        # whenever lambda_min(Q) is small relative to ||A^T P A||.
        epsilon = min(lam / (2.0 * apa_norm), EPSILON_CAP)
    alpha = lam - epsilon * apa_norm
    beta = (1.0 + 1.0 / epsilon) * two_norm(p)
    return StabilityConstants(
        p_lyap=p,
        epsilon=epsilon,
        alpha=alpha,
        beta=beta,
        lambda_min_q=lam,
        norm_i_plus_p=two_norm(np.eye(p.shape[0]) + p),
        a_used=a,
        q_lyap=q,
        damped=damped,
    )


@dataclass(frozen=True)
class DeadZoneDecision:
    threshold: float
    innovation_abs: float
    sigma: int
    z_bound: float
    w_bound: float
    gain_norm: float


def innovation_threshold(constants: StabilityConstants, p_state, q, gain_next) -> float:
    return dead_zone(constants, p_state, q, gain_next, 0.0).threshold


def gate(innovation_abs: float, threshold: float) -> int:
    """1 lets the parameter filter update, 0 freezes it. The boundary freezes."""
    if innovation_abs < 0.0 or threshold < 0.0:
        raise ValueError("innovation magnitude and threshold must be non-negative")
    return 1 if innovation_abs < threshold else 0


def dead_zone(constants: StabilityConstants, p_state, q, gain, innovation: float) -> DeadZoneDecision:
    """Threshold, proxies and switching signal for one step.

    The unknown error norms are replaced by covariance proxies:
    ``sqrt(trace(P_state))`` for the state error and ``sqrt(trace(Q))`` for
    the process noise.
    """
    z_bound = math.sqrt(max(float(np.trace(p_state)), 0.0))
    w_bound = math.sqrt(max(float(np.trace(q)), 0.0))
    k_norm = two_norm(gain)
    if k_norm < ZERO_GAIN:
        log.warning("Kalman gain norm %.3g below %.0e; dead zone opened", k_norm, ZERO_GAIN)
        threshold = math.inf
    else:
        threshold = (constants.gain_ratio * z_bound + w_bound) / k_norm
    e_abs = abs(innovation)
    return DeadZoneDecision(threshold, e_abs, gate(e_abs, threshold), z_bound, w_bound, k_norm)


@dataclass(frozen=True)
class SupervisorOptions:
    kappa: float = 1e-3
    n_recompute: int = 100
    joseph_form: bool = True
    lyapunov_q: Optional[np.ndarray] = None
    divergence_volts: float = 1.0
    divergence_steps: int = 50

    def __post_init__(self):
        if self.n_recompute < 1:
            raise ValueError("n_recompute must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    step: int
    time_s: float
    current_a: float
    measured_v: float
    soc_est: float
    innovation_v: float
    delta_k: float
    sigma: int
    theta: tuple
    state_mean: tuple
    z_bound: float
    w_bound: float
    gain_norm: float


@dataclass(frozen=True)
class SgDkfSession:
    state_est: GaussianEstimate
    theta_est: GaussianEstimate
    noise: NoiseConfig
    params: bm.CellParameters
    options: SupervisorOptions = SupervisorOptions()
    constants: Optional[StabilityConstants] = None
    step_count: int = 0
    freeze_count: int = 0
    last_current: Optional[float] = None
    high_innovation_run: int = 0


def new_session(
    x0,
    p0,
    theta0,
    p_theta0,
    params: bm.CellParameters,
    noise: NoiseConfig,
    options: SupervisorOptions = SupervisorOptions(),
) -> SgDkfSession:
    return SgDkfSession(
        state_est=GaussianEstimate(x0, p0),
        theta_est=GaussianEstimate(theta0, p_theta0),
        noise=noise,
        params=params,
        options=options,
    )


def _refresh_constants(session: SgDkfSession) -> Optional[StabilityConstants]:
    opts = session.options
    if session.constants is not None and session.step_count % opts.n_recompute != 0:
        return session.constants
    current = session.last_current if session.last_current is not None else 0.0
    a = bm.jacobian_A(session.state_est.mean, session.theta_est.mean, session.params, current)
    q = opts.lyapunov_q if opts.lyapunov_q is not None else session.noise.q_state
    return compute_stability_constants(a, q, opts.kappa)


def _step(session: SgDkfSession, current_a: float, measured_v: float, gated: bool):
    opts = session.options
    constants = _refresh_constants(session)
    theta = session.theta_est.mean
    res = state_ekf_step(
        session.state_est, theta, session.params, session.last_current,
        current_a, measured_v, session.noise, joseph=opts.joseph_form,
    )
    decision = dead_zone(
        constants, res.posterior.covariance, session.noise.q_state, res.gain, res.innovation
    )
    if gated:
        sigma, delta = decision.sigma, decision.threshold
    else:
        # Ungated baseline: an infinite dead zone, so sigma = 1 always.
        sigma, delta = 1, math.inf

    if sigma:
        theta_est, _, _ = param_ekf_step(
            session.theta_est, res.posterior.mean, session.params,
            current_a, measured_v, session.noise, joseph=opts.joseph_form,
        )
    else:
        theta_est = session.theta_est

    run = session.high_innovation_run + 1 if abs(res.innovation) > opts.divergence_volts else 0
    k = session.step_count
    record = StepRecord(
        step=k,
        time_s=k * session.params.dt,
        current_a=float(current_a),
        measured_v=float(measured_v),
        soc_est=float(res.posterior.mean[0]),
        innovation_v=res.innovation,
        delta_k=delta,
        sigma=sigma,
        theta=tuple(float(v) for v in theta_est.mean),
        state_mean=tuple(float(v) for v in res.posterior.mean),
        z_bound=decision.z_bound,
        w_bound=decision.w_bound,
        gain_norm=decision.gain_norm,
    )
    new = replace(
        session,
        state_est=res.posterior,
        theta_est=theta_est,
        constants=constants,
        step_count=k + 1,
        freeze_count=session.freeze_count + (0 if sigma else 1),
        last_current=float(current_a),
        high_innovation_run=run,
    )
    if run >= opts.divergence_steps:
        err = DivergenceDetected(
            f"|innovation| above {opts.divergence_volts} V for {run} consecutive steps (step {k})"
        )
        err.record = record
        raise err
    return new, record


def sg_dkf_step(session: SgDkfSession, current_a: float, measured_v: float):
    """One gated dual-filter step; returns the advanced session and its record."""
    return _step(session, current_a, measured_v, gated=True)


def dual_ekf_step(session: SgDkfSession, current_a: float, measured_v: float):
    """Ungated dual EKF step (the comparison baseline)."""
    return _step(session, current_a, measured_v, gated=False)
