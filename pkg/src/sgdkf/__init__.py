"""Dual extended Kalman filtering with a Lyapunov dead-zone supervisor,
applied to a reduced-order electrochemical lithium-ion cell model."""

from sgdkf.battery_model import (
    CellParameters,
    ElectrochemicalState,
    OcvCurve,
    ThetaVector,
)
from sgdkf.filters import GaussianEstimate, NoiseConfig
from sgdkf.supervisor import SgDkfSession, StabilityConstants, StepRecord

__version__ = "0.1.0"

__all__ = [
    "CellParameters",
    "ElectrochemicalState",
    "GaussianEstimate",
    "NoiseConfig",
    "OcvCurve",
    "SgDkfSession",
    "StabilityConstants",
    "StepRecord",
    "ThetaVector",
]
