"""State EKF and random-walk parameter EKF over the cell model.

Both filters see a single scalar measurement (terminal voltage), so the
innovation covariance is a positive scalar and is inverted directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from sgdkf import battery_model as bm
from sgdkf.errors import NonFiniteState, SingularInnovationCovariance, ThetaOutOfRange
from sgdkf.numerics import symmetrize

# Physical bounds applied to the parameter estimate after each update.
THETA_LOWER = np.array([1e-3, 1e-3, 1.0, 1e-3, 1e-3])
THETA_UPPER = np.array([1.0, 1.0, np.inf, 0.999, 0.999])
MAX_CLAMP_MOVE = 0.5


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GaussianEstimate:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = _frozen(np.ravel(self.mean))
        cov = _frozen(np.atleast_2d(self.covariance))
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"covariance shape {cov.shape} does not match mean size {mean.size}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)


@dataclass(frozen=True)
class NoiseConfig:
    q_state: np.ndarray
    r_meas: float
    q_theta: np.ndarray

    def __post_init__(self):
        q = _frozen(np.atleast_2d(self.q_state))
        qt = _frozen(np.atleast_2d(self.q_theta))
        for name, m in (("q_state", q), ("q_theta", qt)):
            if m.shape[0] != m.shape[1] or not np.allclose(m, m.T, rtol=0, atol=1e-15):
                raise ValueError(f"{name} must be a symmetric square matrix")
            if np.linalg.eigvalsh(m)[0] < -1e-18:
                raise ValueError(f"{name} must be positive semidefinite")
        if not self.r_meas > 0.0:
            raise ValueError(f"r_meas must be > 0, got {self.r_meas}")
        object.__setattr__(self, "q_state", q)
        object.__setattr__(self, "q_theta", qt)
        object.__setattr__(self, "r_meas", float(self.r_meas))

    @classmethod
    def default(cls, params: bm.CellParameters, q_theta_rel_std: float = 1e-6) -> "NoiseConfig":
        theta = np.asarray(bm.nominal_theta(params))
        return cls(
            q_state=np.diag([1e-10, 1e-12, 1e-12, 1e-4, 1e-4]),
            r_meas=0.005**2,
            q_theta=np.diag((q_theta_rel_std * theta) ** 2),
        )


@dataclass(frozen=True)
class StateStepResult:
    posterior: GaussianEstimate
    innovation: float
    gain: np.ndarray
    prior: GaussianEstimate
    jacobian_a: np.ndarray
    jacobian_c: np.ndarray


def joseph_update(p_prior, k, c, r: float) -> np.ndarray:
    """Joseph-form covariance update ``(I-KC)P(I-KC)^T + K R K^T``."""
    p_prior = np.asarray(p_prior, dtype=float)
    k = np.atleast_2d(np.asarray(k, dtype=float)).reshape(p_prior.shape[0], -1)
    c = np.atleast_2d(np.asarray(c, dtype=float))
    i_kc = np.eye(p_prior.shape[0]) - k @ c
    return symmetrize(i_kc @ p_prior @ i_kc.T + r * (k @ k.T))


def short_update(p_prior, k, c) -> np.ndarray:
    p_prior = np.asarray(p_prior, dtype=float)
    k = np.atleast_2d(np.asarray(k, dtype=float)).reshape(p_prior.shape[0], -1)
    return symmetrize((np.eye(p_prior.shape[0]) - k @ np.atleast_2d(c)) @ p_prior)


def _scalar_gain(p: np.ndarray, c: np.ndarray, r: float) -> np.ndarray:
    s = float((c @ p @ c.T)[0, 0]) + r
    if not np.isfinite(s) or s <= 0.0:
        raise SingularInnovationCovariance(f"innovation covariance {s} is not positive")
    return (p @ c.T) / s


def kalman_update(x_pred, p_pred, c, r: float, innovation: float, joseph: bool = True):
    """Scalar-measurement update. Returns ``(x_post, p_post, gain)``."""
    x_pred = np.asarray(x_pred, dtype=float)
    p_pred = np.asarray(p_pred, dtype=float)
    c = np.atleast_2d(np.asarray(c, dtype=float))
    k = _scalar_gain(p_pred, c, r)
    x_post = x_pred + k[:, 0] * innovation
    p_post = joseph_update(p_pred, k, c, r) if joseph else short_update(p_pred, k, c)
    return x_post, p_post, k


def state_ekf_step(
    prior: GaussianEstimate,
    theta,
    params: bm.CellParameters,
    current_prev: Optional[float],
    current_a: float,
    measured_v: float,
    noise: NoiseConfig,
    joseph: bool = True,
) -> StateStepResult:
    """One predict/update cycle of the state EKF.

    ``prior`` is the previous posterior. The prediction uses the input applied
    over the last interval, ``current_prev``; when it is ``None`` (first
    sample) the prediction step is skipped and ``prior`` is used as-is. The
    update compares ``measured_v`` with the model output under ``current_a``.
    """
    theta_l = np.asarray(theta, dtype=float).tolist()
    if current_prev is None:
        a = np.eye(prior.mean.size)
        x_pred = np.array(prior.mean)
        p_pred = np.array(prior.covariance)
    else:
        a = bm.jacobian_A(prior.mean, theta, params, current_prev)
        x_pred = np.asarray(bm.step_state(prior.mean.tolist(), theta_l, params, current_prev))
        p_pred = symmetrize(a @ prior.covariance @ a.T + noise.q_state)

    c = bm.jacobian_C(x_pred, theta, params, current_a)
    innovation = measured_v - bm.terminal_voltage(x_pred.tolist(), theta_l, params, current_a)
    x_post, p_post, k = kalman_update(x_pred, p_pred, c, noise.r_meas, innovation, joseph)
    if not (np.all(np.isfinite(x_post)) and np.all(np.isfinite(p_post))):
        raise NonFiniteState("state EKF produced non-finite estimate")
    return StateStepResult(
        posterior=GaussianEstimate(x_post, p_post),
        innovation=float(innovation),
        gain=k,
        prior=GaussianEstimate(x_pred, p_pred),
        jacobian_a=a,
        jacobian_c=c,
    )


def clamp_theta(theta) -> np.ndarray:
    """Project ``theta`` onto its physical box; refuse gross violations."""
    raw = np.asarray(theta, dtype=float)
    clamped = np.clip(raw, THETA_LOWER, THETA_UPPER)
    moved = np.abs(clamped - raw)
    limit = MAX_CLAMP_MOVE * np.maximum(np.abs(raw), 1e-12)
    bad = moved > limit
    if np.any(bad):
        names = [bm.THETA_NAMES[i] for i in np.flatnonzero(bad)]
        raise ThetaOutOfRange(f"parameter estimate left its physical range: {names} = {raw[bad]}")
    return clamped


def param_ekf_step(
    prior_theta: GaussianEstimate,
    state_posterior_mean,
    params: bm.CellParameters,
    current_a: float,
    measured_v: float,
    noise: NoiseConfig,
    joseph: bool = True,
) -> tuple[GaussianEstimate, float, np.ndarray]:
    """Random-walk parameter EKF driven by the latest state posterior."""
    theta_pred = np.array(prior_theta.mean)
    p_pred = symmetrize(prior_theta.covariance + noise.q_theta)
    c = bm.jacobian_Ctheta(state_posterior_mean, theta_pred, params, current_a)
    residual = measured_v - bm.terminal_voltage(
        np.asarray(state_posterior_mean).tolist(), theta_pred.tolist(), params, current_a
    )
    theta_post, p_post, k = kalman_update(theta_pred, p_pred, c, noise.r_meas, residual, joseph)
    theta_post = clamp_theta(theta_post)
    return GaussianEstimate(theta_post, p_post), float(residual), k
