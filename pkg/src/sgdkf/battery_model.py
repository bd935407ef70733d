"""Discrete-time reduced-order electrochemical cell model.

State (5): SOC, positive/negative solid-diffusion deviations, electrolyte
concentration deviations at the two current collectors.
Slow parameters (5): stoichiometry spans ``d_p``/``d_n``, rated capacity
``q_all`` and the full-charge stoichiometries ``x_sp0``/``x_sn0``.

Sign convention: current in amperes, positive on discharge. Charge in
coulombs, time in seconds.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, NamedTuple, Sequence

import numpy as np

from sgdkf.errors import LogDomain, NonFiniteState, SurfaceSaturation
from sgdkf.numerics import numeric_jacobian

GAS_CONSTANT = 8.314  # J / (mol K)
FARADAY = 96485.0  # C / mol

SURFACE_CLAMP = (0.001, 0.999)
SURFACE_GUARD = (-0.05, 1.05)
C_RATE_FLOOR = 0.01  # fraction of c_ref

STATE_NAMES = ("soc", "dx_sp", "dx_sn", "dc1", "dc2")
THETA_NAMES = ("d_p", "d_n", "q_all", "x_sp0", "x_sn0")


class ElectrochemicalState(NamedTuple):
    soc: float
    dx_sp: float
    dx_sn: float
    dc1: float
    dc2: float


class ThetaVector(NamedTuple):
    d_p: float
    d_n: float
    q_all: float
    x_sp0: float
    x_sn0: float


@dataclass(frozen=True)
class OcvCurve:
    """Piecewise-linear open-circuit potential with flat extrapolation."""

    breakpoints: tuple[float, ...]
    voltages: tuple[float, ...]

    def __post_init__(self):
        x = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.voltages, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise ValueError("breakpoints and voltages must be equal-length sequences")
        if x.size < 4:
            raise ValueError("an OCV curve needs at least 4 breakpoints")
        if np.any(np.diff(x) <= 0):
            raise ValueError("OCV breakpoints must be strictly increasing")
        if x[0] < 0.0 or x[-1] > 1.0:
            raise ValueError("OCV breakpoints must lie in [0, 1]")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("OCV table has non-finite entries")
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in x))
        object.__setattr__(self, "voltages", tuple(float(u) for u in v))

    def __call__(self, stoichiometry: float) -> float:
        xs, vs = self.breakpoints, self.voltages
        if stoichiometry <= xs[0]:
            return vs[0]
        if stoichiometry >= xs[-1]:
            return vs[-1]
        i = bisect_right(xs, stoichiometry)
        w = (stoichiometry - xs[i - 1]) / (xs[i] - xs[i - 1])
        return vs[i - 1] + w * (vs[i] - vs[i - 1])


# Synthetic NMC-like and graphite-like tables; not fitted to any real cell.
DEFAULT_OCV_P = OcvCurve(
    breakpoints=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0),
    voltages=(4.30, 4.27, 4.22, 4.16, 4.07, 3.98, 3.90, 3.82, 3.73, 3.60, 3.45, 3.00),
)
DEFAULT_OCV_N = OcvCurve(
    breakpoints=(0.0, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.85, 1.0),
    voltages=(0.60, 0.45, 0.30, 0.22, 0.16, 0.13, 0.12, 0.11, 0.10, 0.09, 0.08, 0.05),
)


@dataclass(frozen=True)
class CellParameters:
    q_all: float = 10440.0
    c_ref: float = 1.0
    peukert_n: float = 1.05
    d_p: float = 0.55
    d_n: float = 0.60
    tau_sp: float = 250.0
    tau_sn: float = 300.0
    g_p: float = 2e-4
    g_n: float = -2e-4
    tau_e: float = 50.0
    p_con_a: float = 25.0
    p_con_b: float = 25.0
    t_plus: float = 0.4
    c0: float = 1000.0
    temperature_k: float = 298.15
    v_p: float = 1.0
    v_n: float = 1.0
    p_rxn_p: float = 1.5e4
    p_rxn_n: float = 1.5e4
    r_ohm: float = 0.03
    x_sp0: float = 0.30
    x_sn0: float = 0.85
    ocv_p: OcvCurve = DEFAULT_OCV_P
    ocv_n: OcvCurve = DEFAULT_OCV_N
    dt: float = 1.0

    gas_constant: ClassVar[float] = GAS_CONSTANT
    faraday: ClassVar[float] = FARADAY

    def __post_init__(self):
        for name in ("q_all", "tau_sp", "tau_sn", "tau_e", "dt", "c0", "c_ref",
                     "temperature_k", "v_p", "v_n", "p_rxn_p", "p_rxn_n"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        if self.peukert_n < 1.0:
            raise ValueError(f"peukert_n must be >= 1, got {self.peukert_n}")
        for name in ("x_sp0", "x_sn0", "t_plus"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if self.dt >= min(self.tau_sp, self.tau_sn, self.tau_e):
            raise ValueError("dt must be smaller than every time constant")

    @property
    def thermal_factor(self) -> float:
        """2RT/F in volts."""
        return 2.0 * GAS_CONSTANT * self.temperature_k / FARADAY

    @cached_property
    def a_p(self) -> float:
        return math.exp(-self.dt / self.tau_sp)

    @cached_property
    def a_n(self) -> float:
        return math.exp(-self.dt / self.tau_sn)

    @property
    def b_p(self) -> float:
        return self.g_p * (1.0 - self.a_p)

    @property
    def b_n(self) -> float:
        return self.g_n * (1.0 - self.a_n)

    @property
    def a_e(self) -> float:
        return 1.0 - self.dt / self.tau_e


def nominal_theta(params: CellParameters) -> ThetaVector:
    return ThetaVector(params.d_p, params.d_n, params.q_all, params.x_sp0, params.x_sn0)


def effective_capacity(params: CellParameters, theta: Sequence[float], current_a: float) -> float:
    """Peukert-corrected usable capacity in coulombs."""
    q_all = theta[2]
    if current_a == 0.0:
        return q_all
    c_now = max(abs(current_a) / (q_all / 3600.0), C_RATE_FLOOR * params.c_ref)
    return q_all * (params.c_ref / c_now) ** (params.peukert_n - 1.0)


def averaged_stoichiometries(soc: float, theta: Sequence[float]) -> tuple[float, float]:
    d_p, d_n, _, x_sp0, x_sn0 = theta
    depth = 1.0 - soc
    return x_sp0 + d_p * depth, x_sn0 - d_n * depth


def surface_stoichiometries(state: Sequence[float], theta: Sequence[float]) -> tuple[float, float]:
    x_sp_avg, x_sn_avg = averaged_stoichiometries(state[0], theta)
    return x_sp_avg + state[1], x_sn_avg + state[2]


def _clamp_surface(x: float, electrode: str) -> float:
    if not SURFACE_GUARD[0] <= x <= SURFACE_GUARD[1]:
        raise SurfaceSaturation(f"{electrode} surface stoichiometry {x:.6g} outside guard band")
    return min(max(x, SURFACE_CLAMP[0]), SURFACE_CLAMP[1])


def step_state(
    state: Sequence[float],
    theta: Sequence[float],
    params: CellParameters,
    current_a: float,
) -> ElectrochemicalState:
    """Advance the state by one sampling period under ``current_a``."""
    soc, dx_sp, dx_sn, dc1, dc2 = state
    dt = params.dt
    ke = dt / params.tau_e
    nxt = ElectrochemicalState(
        soc - current_a * dt / theta[2],
        params.a_p * dx_sp + params.b_p * current_a,
        params.a_n * dx_sn + params.b_n * current_a,
        dc1 + ke * (params.p_con_a * current_a - dc1),
        dc2 + ke * (params.p_con_b * current_a - dc2),
    )
    if not all(math.isfinite(v) for v in nxt):
        raise NonFiniteState(f"state update produced non-finite values: {nxt}")
    return nxt


def concentration_overpotential(state: Sequence[float], params: CellParameters) -> float:
    num = params.c0 + state[3]
    den = params.c0 - state[4]
    if num <= 0.0 or den <= 0.0:
        raise LogDomain(f"electrolyte concentration non-positive: c0+dc1={num}, c0-dc2={den}")
    return params.thermal_factor * (1.0 - params.t_plus) * math.log(num / den)


def reaction_overpotential(
    state: Sequence[float],
    theta: Sequence[float],
    params: CellParameters,
    current_a: float,
) -> float:
    """Inverse Butler-Volmer overpotential, ``2RT/F * (asinh m_p + asinh m_n)``."""
    if current_a == 0.0:
        return 0.0
    x_sp, x_sn = surface_stoichiometries(state, theta)
    x_sp = _clamp_surface(x_sp, "positive")
    x_sn = _clamp_surface(x_sn, "negative")
    q_eff = effective_capacity(params, theta, current_a)
    base = current_a / (6.0 * q_eff)
    m_p = theta[0] * params.p_rxn_p * base / (math.sqrt(params.v_p) * math.sqrt(1.0 - x_sp))
    m_n = theta[1] * params.p_rxn_n * base / (math.sqrt(params.v_n) * math.sqrt(1.0 - x_sn))
    return params.thermal_factor * (math.asinh(m_p) + math.asinh(m_n))


def open_circuit_voltage(state: Sequence[float], theta: Sequence[float], params: CellParameters) -> float:
    x_sp, x_sn = surface_stoichiometries(state, theta)
    return params.ocv_p(x_sp) - params.ocv_n(x_sn)


def terminal_voltage(
    state: Sequence[float],
    theta: Sequence[float],
    params: CellParameters,
    current_a: float,
) -> float:
    x_sp, x_sn = surface_stoichiometries(state, theta)
    ocv = params.ocv_p(x_sp) - params.ocv_n(x_sn)
    return (
        ocv
        - concentration_overpotential(state, params)
        - reaction_overpotential(state, theta, params, current_a)
        - params.r_ohm * current_a
    )


def jacobian_A(state, theta, params: CellParameters, current_a: float, method: str = "analytic") -> np.ndarray:
    """Jacobian of the transition with respect to the state.

    The analytic form is diagonal and independent of the operating point.
    """
    if method == "analytic":
        return np.diag([1.0, params.a_p, params.a_n, params.a_e, params.a_e])
    if method == "fd":
        return numeric_jacobian(
            lambda x: np.asarray(step_state(x, theta, params, current_a)),
            np.asarray(state, dtype=float),
        )
    raise ValueError(f"unknown Jacobian method {method!r}")


def jacobian_C(state, theta, params: CellParameters, current_a: float) -> np.ndarray:
    """1x5 output sensitivity to the state (central differences)."""
    theta = tuple(float(v) for v in theta)
    return numeric_jacobian(
        lambda x: terminal_voltage(x.tolist(), theta, params, current_a),
        np.asarray(state, dtype=float),
    )


def jacobian_Ctheta(state, theta, params: CellParameters, current_a: float) -> np.ndarray:
    """1x5 output sensitivity to the slow parameters (central differences)."""
    state = tuple(float(v) for v in state)
    return numeric_jacobian(
        lambda th: terminal_voltage(state, th.tolist(), params, current_a),
        np.asarray(theta, dtype=float),
    )
