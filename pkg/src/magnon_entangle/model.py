"""Physical model: parameters, mean-field steady state and linearized dynamics.

A single-mode cavity with a two-photon (chi-2) pump of strength ``omega_nl`` is
coupled linearly to two magnon modes. All rates and detunings are expressed in
units of the cavity decay ``kappa``. Quadratures are ordered
``(X, Y, x1, y1, x2, y2)`` throughout the package.
"""

from __future__ import annotations

import logging
import math
from typing import Any, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, computed_field

from magnon_entangle.errors import ConfigError, MeanFieldDivergence
from magnon_entangle.matkernel import RealMat, eig_general

logger = logging.getLogger(__name__)

DriftMatrix = RealMat
DiffusionMatrix = RealMat

DIVERGENCE_FLOOR = 1e-12
HP_VALIDITY_THRESHOLD = 1e-3

# Names accepted by SystemParams.with_overrides beyond the stored fields.
DERIVED_NAMES = frozenset({"delta_m", "phi", "g", "gamma"})


class SystemParams(BaseModel):
    """Rates, detunings and couplings of the magnon-cavity Hamiltonian.

    Defaults are the reference parameter set used for the detuning maps:
    ``gamma = kappa``, ``g = 3.2 kappa``, ``omega_nl = 0.6 kappa``,
    ``eps_p = kappa`` and all detunings zero.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: float = Field(default=1.0, gt=0, description="Cavity decay rate")
    gamma1: float = Field(default=1.0, gt=0, description="Magnon 1 decay rate")
    gamma2: float = Field(default=1.0, gt=0, description="Magnon 2 decay rate")
    g1: float = Field(default=3.2, ge=0, description="Magnon 1 - cavity coupling")
    g2: float = Field(default=3.2, ge=0, description="Magnon 2 - cavity coupling")
    omega_nl: float = Field(default=0.6, ge=0, description="Two-photon nonlinearity")
    eps_p: float = Field(default=1.0, ge=0, description="Probe amplitude")
    delta_c: float = Field(default=0.0, description="Cavity detuning w_c - w_p")
    delta_m1: float = Field(default=0.0, description="Magnon 1 detuning w_m1 - w_p")
    delta_m2: float = Field(default=0.0, description="Magnon 2 detuning w_m2 - w_p")

    @property
    def delta_m(self) -> float:
        """Mean magnon detuning ``(delta_m1 + delta_m2) / 2``."""
        return 0.5 * (self.delta_m1 + self.delta_m2)

    @property
    def phi(self) -> float:
        """Half frequency difference ``(delta_m1 - delta_m2) / 2``."""
        return 0.5 * (self.delta_m1 - self.delta_m2)

    @property
    def g_sq(self) -> float:
        """Effective squared coupling ``g1 * g2``."""
        return self.g1 * self.g2

    def with_overrides(self, **overrides: float) -> SystemParams:
        """Return a validated copy with fields (or derived names) replaced.

        ``delta_m``/``phi`` set ``(delta_m1, delta_m2) = (delta_m + phi,
        delta_m - phi)``, taking the missing one from the current values;
        ``g`` sets both couplings and ``gamma`` both magnon decay rates.
        """
        unknown = set(overrides) - set(type(self).model_fields) - DERIVED_NAMES
        if unknown:
            raise ConfigError(f"unknown parameter override(s): {sorted(unknown)}")

        data: dict[str, Any] = self.model_dump()
        plain = {k: v for k, v in overrides.items() if k not in DERIVED_NAMES}
        data.update(plain)
        if "g" in overrides:
            data["g1"] = data["g2"] = overrides["g"]
        if "gamma" in overrides:
            data["gamma1"] = data["gamma2"] = overrides["gamma"]
        if "delta_m" in overrides or "phi" in overrides:
            mean = overrides.get("delta_m", 0.5 * (data["delta_m1"] + data["delta_m2"]))
            half = overrides.get("phi", 0.5 * (data["delta_m1"] - data["delta_m2"]))
            data["delta_m1"] = mean + half
            data["delta_m2"] = mean - half
        try:
            return type(self).model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"invalid parameters: {exc}") from exc


class MaterialSpec(BaseModel):
    """Magnetic sample used for the Holstein-Primakoff validity check (YIG)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    spin_density: float = Field(default=4.22e27, gt=0, description="Spins per m^3")
    diameter: float = Field(default=1e-3, gt=0, description="Sphere diameter in m")
    spin: float = Field(default=2.5, gt=0, description="Spin per site")

    @property
    def spin_count(self) -> float:
        """Total number of spins ``N = rho * pi d^3 / 6``."""
        return self.spin_density * math.pi / 6.0 * self.diameter**3

    @property
    def excitation_bound(self) -> float:
        """``2 N s``, the ceiling on magnon excitations."""
        return 2.0 * self.spin_count * self.spin


class SteadyState(BaseModel):
    """Mean-field amplitudes and occupation numbers."""

    model_config = ConfigDict(frozen=True)

    a: complex
    m1: complex
    m2: complex

    @computed_field  # type: ignore[prop-decorator]
    @property
    def n_c(self) -> float:
        return abs(self.a) ** 2

    @computed_field  # type: ignore[prop-decorator]
    @property
    def n_m1(self) -> float:
        return abs(self.m1) ** 2

    @computed_field  # type: ignore[prop-decorator]
    @property
    def n_m2(self) -> float:
        return abs(self.m2) ** 2


class ConditionResiduals(NamedTuple):
    """Residuals of the three analytic conditions; zero means satisfied."""

    r_hyper: float
    r_antidiag: float
    r_tri: float


def effective_detuning(p: SystemParams) -> complex:
    """``D = Delta_c - g1^2/Delta_m1 - g2^2/Delta_m2`` with complex detunings."""
    delta_c = complex(p.delta_c, -p.kappa)
    delta_m1 = complex(p.delta_m1, -p.gamma1)
    delta_m2 = complex(p.delta_m2, -p.gamma2)
    return delta_c - p.g1**2 / delta_m1 - p.g2**2 / delta_m2


def steady_state(p: SystemParams) -> SteadyState:
    """Solve ``D a + 2 Omega a* = -eps_p`` and ``Delta_mj m_j + g_j a = 0``."""
    d = effective_detuning(p)
    denominator = abs(d) ** 2 - 4.0 * p.omega_nl**2
    if abs(denominator) <= DIVERGENCE_FLOOR:
        raise MeanFieldDivergence(
            f"|D|^2 - 4 Omega^2 = {denominator:.3e} at the parametric threshold"
        )
    a = -p.eps_p * (d.conjugate() - 2.0 * p.omega_nl) / denominator
    m1 = -p.g1 * a / complex(p.delta_m1, -p.gamma1)
    m2 = -p.g2 * a / complex(p.delta_m2, -p.gamma2)
    return SteadyState(a=a, m1=m1, m2=m2)


def build_drift(p: SystemParams) -> DriftMatrix:
    """Drift matrix of the linearized quadrature fluctuations."""
    k, om = p.kappa, p.omega_nl
    g1, g2 = p.g1, p.g2
    return np.array(
        [
            [-k, p.delta_c - 2 * om, 0.0, g1, 0.0, g2],
            [-p.delta_c - 2 * om, -k, -g1, 0.0, -g2, 0.0],
            [0.0, g1, -p.gamma1, p.delta_m1, 0.0, 0.0],
            [-g1, 0.0, -p.delta_m1, -p.gamma1, 0.0, 0.0],
            [0.0, g2, 0.0, 0.0, -p.gamma2, p.delta_m2],
            [-g2, 0.0, 0.0, 0.0, -p.delta_m2, -p.gamma2],
        ],
        dtype=np.float64,
    )


def build_diffusion(p: SystemParams) -> DiffusionMatrix:
    """Zero-temperature diffusion matrix ``diag(k, k, g1, g1, g2, g2)``."""
    return np.diag([p.kappa, p.kappa, p.gamma1, p.gamma1, p.gamma2, p.gamma2]).astype(
        np.float64
    )


def stability_margin(a: DriftMatrix) -> float:
    """``-max Re(lambda)`` over the drift spectrum; positive means stable."""
    return -float(np.max(eig_general(a).real))


def condition_residuals(p: SystemParams) -> ConditionResiduals:
    g_sq = p.g_sq
    return ConditionResiduals(
        r_hyper=p.delta_c * p.delta_m - 2.0 * g_sq,
        r_antidiag=p.delta_c + p.delta_m,
        r_tri=p.delta_m**2 - p.phi**2 + 2.0 * g_sq,
    )


def bare_state_resonance(p: SystemParams) -> tuple[float, float]:
    """Per-magnon residuals ``delta_c + delta_mj``.

    Zero when the probe sits halfway between the cavity and magnon ``j``, where
    the bare states ``|N_c, N_mj>`` and ``|N_c - 1, N_mj + 1>`` are degenerate.
    """
    return p.delta_c + p.delta_m1, p.delta_c + p.delta_m2


def hp_validity(p: SystemParams, s: SteadyState, m: MaterialSpec) -> float:
    """Ratio ``max(n_m1, n_m2) / (2 N s)``; below 1e-3 the bosonization holds."""
    ratio = max(s.n_m1, s.n_m2) / m.excitation_bound
    if ratio >= HP_VALIDITY_THRESHOLD:
        logger.warning(
            "Holstein-Primakoff ratio %.3e at delta_c=%g, delta_m=%g exceeds %g",
            ratio,
            p.delta_c,
            p.delta_m,
            HP_VALIDITY_THRESHOLD,
        )
    return ratio
