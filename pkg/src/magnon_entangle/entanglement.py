"""Gaussian entanglement measures of the three-mode steady state.

Covariance matrices use the convention in which the vacuum is ``I / 2`` and the
symplectic form per mode is ``[[0, 1], [-1, 0]]``. Partial transposition of a
mode flips the sign of its ``Y`` quadrature.
"""

from __future__ import annotations

import logging
import math
from enum import IntEnum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from magnon_entangle.errors import (
    MonogamyViolation,
    PhysicalityViolation,
    UnstableDrift,
)
from magnon_entangle.matkernel import RealMat, eig_general, solve_lyapunov
from magnon_entangle.model import (
    DiffusionMatrix,
    DriftMatrix,
    SystemParams,
    build_diffusion,
    build_drift,
    stability_margin,
)

logger = logging.getLogger(__name__)

CovarianceMatrix = RealMat

PHYSICALITY_TOL = 1e-9
CONTANGLE_NOISE = 1e-9
MONOGAMY_TOL = 1e-6


class Mode(IntEnum):
    CAVITY = 0
    MAGNON1 = 1
    MAGNON2 = 2


class EntanglementReport(BaseModel):
    """Entanglement measures at one parameter point.

    Unstable points carry ``stable=False`` and all measures zero.
    """

    model_config = ConfigDict(frozen=True)

    e_am1: float = Field(default=0.0, ge=0)
    e_am2: float = Field(default=0.0, ge=0)
    e_m1m2: float = Field(default=0.0, ge=0)
    r_min: float = Field(default=0.0, ge=0)
    stable: bool
    margin: float


def symplectic_form(n_modes: int) -> RealMat:
    """``(+)^n [[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _transpose_flip(n_modes: int, mode: int) -> RealMat:
    diag = np.ones(2 * n_modes)
    diag[2 * mode + 1] = -1.0
    return np.diag(diag)


def symplectic_spectrum(v: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Magnitudes of the eigenvalues of ``i Omega V``, sorted ascending.

    Each symplectic eigenvalue appears twice (the spectrum comes in +/- pairs).
    """
    v = np.asarray(v, dtype=np.float64)
    n_modes = v.shape[0] // 2
    values = eig_general(1j * symplectic_form(n_modes) @ v)
    return np.sort(np.abs(values))


def is_physical(v: npt.ArrayLike, tol: float = PHYSICALITY_TOL) -> bool:
    """Uncertainty principle: every symplectic eigenvalue is at least 1/2."""
    return bool(symplectic_spectrum(v)[0] >= 0.5 - tol)


def steady_covariance(
    a: DriftMatrix, d: DiffusionMatrix, *, margin: float | None = None
) -> CovarianceMatrix:
    """Steady-state covariance from ``A V + V A^T = -D``.

    ``margin`` is the already computed stability margin of ``a``, if known.
    """
    if margin is None:
        margin = stability_margin(a)
    if margin <= 0.0:
        raise UnstableDrift(f"stability margin {margin:.3e} is not positive")
    v = solve_lyapunov(a, d, assume_stable=True)
    nu_min = float(symplectic_spectrum(v)[0])
    if nu_min < 0.5 - PHYSICALITY_TOL:
        raise PhysicalityViolation(
            f"smallest symplectic eigenvalue {nu_min:.12f} below 1/2"
        )
    return v


def reduce_modes(v: CovarianceMatrix, pair: tuple[int, int]) -> RealMat:
    """4x4 covariance of two modes; blocks keep their order in ``v``."""
    i, j = (int(m) for m in pair)
    if i == j:
        raise ValueError(f"pair must name two distinct modes, got {pair}")
    n_modes = v.shape[0] // 2
    if not (0 <= i < n_modes and 0 <= j < n_modes):
        raise ValueError(f"mode indices {pair} out of range for {n_modes} modes")
    lo, hi = sorted((i, j))
    idx = [2 * lo, 2 * lo + 1, 2 * hi, 2 * hi + 1]
    return np.asarray(v)[np.ix_(idx, idx)]


def _negativity_from_nu(nu_minus: float) -> float:
    if nu_minus <= 0.0:
        raise PhysicalityViolation(f"non-positive symplectic eigenvalue {nu_minus:.3e}")
    return max(0.0, -math.log(2.0 * nu_minus))


def transposed_nu_minus(v: npt.ArrayLike, mode: int) -> float:
    """Smallest symplectic eigenvalue after partial transposition of ``mode``."""
    v = np.asarray(v, dtype=np.float64)
    n_modes = v.shape[0] // 2
    flip = _transpose_flip(n_modes, mode)
    return float(symplectic_spectrum(flip @ v @ flip)[0])


def nu_minus_invariant(v4: npt.ArrayLike) -> float:
    """Closed form of the transposed ``nu_-`` through the seralian invariants."""
    v4 = np.asarray(v4, dtype=np.float64)
    a, b, c = v4[:2, :2], v4[2:, 2:], v4[:2, 2:]
    seralian = np.linalg.det(a) + np.linalg.det(b) - 2.0 * np.linalg.det(c)
    det_v = np.linalg.det(v4)
    discriminant = max(seralian**2 - 4.0 * det_v, 0.0)
    return math.sqrt(max((seralian - math.sqrt(discriminant)) / 2.0, 0.0))


def log_negativity_pair(v4: npt.ArrayLike) -> float:
    """Logarithmic negativity ``max(0, -ln 2 nu_-)`` of a two-mode covariance."""
    v4 = np.asarray(v4, dtype=np.float64)
    if v4.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got {v4.shape}")
    return _negativity_from_nu(transposed_nu_minus(v4, 0))


def negativity_one_vs_two(v: CovarianceMatrix, singled: int) -> float:
    """Logarithmic negativity of the split ``singled | other two``."""
    return _negativity_from_nu(transposed_nu_minus(v, int(singled)))


def residual_contangle(v: CovarianceMatrix, i: int) -> float:
    """``C_{i|jk} - C_{i|j} - C_{i|k}`` with squared log-negativities."""
    i = int(i)
    j, k = (m for m in Mode if m != i)
    total = negativity_one_vs_two(v, i) ** 2
    with_j = log_negativity_pair(reduce_modes(v, (i, j))) ** 2
    with_k = log_negativity_pair(reduce_modes(v, (i, k))) ** 2
    return total - with_j - with_k


def min_residual_contangle(v: CovarianceMatrix) -> float:
    """Minimum residual contangle over the three one-vs-two splits."""
    residuals = [residual_contangle(v, mode) for mode in Mode]
    lowest = min(residuals)
    if lowest < -MONOGAMY_TOL:
        raise MonogamyViolation(f"residual contangles {residuals} violate monogamy")
    if lowest < 0.0:
        if lowest < -CONTANGLE_NOISE:
            logger.warning("residual contangle %.3e clamped to zero", lowest)
        return 0.0
    return lowest


def analyze(p: SystemParams) -> EntanglementReport:
    """Drift, stability, covariance and all measures for one parameter point."""
    a = build_drift(p)
    margin = stability_margin(a)
    if margin <= 0.0:
        return EntanglementReport(stable=False, margin=margin)

    v = steady_covariance(a, build_diffusion(p), margin=margin)
    cavity, m1, m2 = Mode
    return EntanglementReport(
        e_am1=log_negativity_pair(reduce_modes(v, (cavity, m1))),
        e_am2=log_negativity_pair(reduce_modes(v, (cavity, m2))),
        e_m1m2=log_negativity_pair(reduce_modes(v, (m1, m2))),
        r_min=min_residual_contangle(v),
        stable=True,
        margin=margin,
    )


def two_mode_squeezed_vacuum(r: float) -> RealMat:
    """Covariance of a two-mode squeezed vacuum; its log-negativity is ``2 r``."""
    c, s = math.cosh(2.0 * r) / 2.0, math.sinh(2.0 * r) / 2.0
    z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
