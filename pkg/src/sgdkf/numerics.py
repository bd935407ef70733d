"""Small dense linear-algebra kernel used by the filters and the supervisor.

Matrices and vectors are plain ``numpy.ndarray`` objects. Eigen-extremes are
taken from LAPACK (through numpy) rather than power iteration: the default
process-noise covariance spans eight decades, and a shifted power iteration
cannot resolve its smallest eigenvalue.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from sgdkf.errors import (
    NoConvergence,
    NonFiniteEvaluation,
    NotSchur,
    NotSPD,
    NotSymmetric,
)

SCHUR_MARGIN = 1e-9
SYMMETRY_TOL = 1e-10
MAX_LYAPUNOV_DIM = 16


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float array."""
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEvaluation(f"{name} has non-finite entries")
    return m


def _square(a, name: str) -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def is_symmetric(a: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= tol * scale)


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def spectral_radius(a) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    m = _square(a, "A")
    try:
        eig = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(eig)))


def two_norm(a) -> float:
    """Largest singular value (operator 2-norm). Vectors are treated as columns."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    m = as_matrix(m, "A")
    if not np.any(m):
        return 0.0
    try:
        return float(np.linalg.norm(m, 2))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"SVD failed: {exc}") from exc


def lambda_min_symmetric(q) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    m = _square(q, "Q")
    if not is_symmetric(m):
        raise NotSymmetric("Q is not symmetric within tolerance")
    try:
        return float(np.linalg.eigvalsh(symmetrize(m))[0])
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"symmetric eigensolver failed: {exc}") from exc


def check_spd(q, name: str = "Q") -> np.ndarray:
    m = _square(q, name)
    if not is_symmetric(m):
        raise NotSPD(f"{name} is not symmetric")
    if np.linalg.eigvalsh(symmetrize(m))[0] <= 0.0:
        raise NotSPD(f"{name} is not positive definite")
    return m


def solve_discrete_lyapunov(a, q) -> np.ndarray:
    """Solve ``A^T P A - P = -Q`` for symmetric positive-definite ``P``.

    Uses direct Kronecker vectorization,
    ``vec(P) = (I - A^T (x) A^T)^{-1} vec(Q)``, which is exact up to
    rounding for the small systems handled here (n <= 16).
    """
    a = _square(a, "A")
    q = check_spd(q)
    n = a.shape[0]
    if q.shape != (n, n):
        raise ValueError(f"Q shape {q.shape} does not match A shape {a.shape}")
    if n > MAX_LYAPUNOV_DIM:
        raise ValueError(f"Kronecker solve limited to n <= {MAX_LYAPUNOV_DIM}, got {n}")
    rho = spectral_radius(a)
    if rho >= 1.0 - SCHUR_MARGIN:
        raise NotSchur(f"spectral radius {rho:.12g} is not below 1")
    at = a.T
    lhs = np.eye(n * n) - np.kron(at, at)
    p = np.linalg.solve(lhs, q.reshape(-1)).reshape(n, n)
    return symmetrize(p)


def lyapunov_residual(a, p, q) -> float:
    """Frobenius norm of ``A^T P A - P + Q``."""
    a = np.asarray(a, dtype=float)
    return float(np.linalg.norm(a.T @ p @ a - p + q, "fro"))


def numeric_jacobian(
    f: Callable[[np.ndarray], np.ndarray],
    x0,
    rel_step: float = 1e-6,
) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x0``.

    The step for coordinate ``i`` is ``rel_step * max(|x0_i|, 1)``.
    """
    if not 0.0 < rel_step <= 1e-2:
        raise ValueError(f"rel_step must lie in (0, 1e-2], got {rel_step}")
    x0 = np.asarray(x0, dtype=float).ravel()
    n = x0.size
    steps = rel_step * np.maximum(np.abs(x0), 1.0)
    probes = []
    for i in range(n):
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += steps[i]
        xm[i] -= steps[i]
        probes.append(f(xp))
        probes.append(f(xm))
    vals = np.asarray(probes, dtype=float).reshape(n, 2, -1)
    if not np.isfinite(vals).all():
        bad = int(np.flatnonzero(~np.isfinite(vals).reshape(n, -1).all(axis=1))[0])
        raise NonFiniteEvaluation(f"non-finite evaluation probing coordinate {bad}")
    return ((vals[:, 0, :] - vals[:, 1, :]) / (2.0 * steps[:, None])).T
