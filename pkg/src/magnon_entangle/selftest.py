"""Built-in closed-form oracle checks behind `magnon-entangle selftest`."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import pandas as pd

from magnon_entangle.entanglement import (
    analyze,
    log_negativity_pair,
    nu_minus_invariant,
    steady_covariance,
    transposed_nu_minus,
    two_mode_squeezed_vacuum,
)
from magnon_entangle.matkernel import frobenius_residual, solve_lyapunov
from magnon_entangle.model import (
    SystemParams,
    build_diffusion,
    build_drift,
    stability_margin,
    steady_state,
)

logger = logging.getLogger(__name__)

Check = Callable[[], str]
CHECKS: list[tuple[str, Check]] = []


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str) -> Callable[[Check], Check]:
    def register(fn: Check) -> Check:
        CHECKS.append((name, fn))
        return fn

    return register


def _require(condition: bool, message: str) -> None:
    """Fail a check; unlike ``assert`` this survives ``python -O``."""
    if not condition:
        raise AssertionError(message)


def _decoupled(**overrides: float) -> SystemParams:
    return SystemParams(g1=0.0, g2=0.0, omega_nl=0.0, eps_p=0.0).with_overrides(
        **overrides
    )


@_check("vacuum covariance")
def _vacuum_covariance() -> str:
    p = _decoupled(delta_c=1.5, delta_m1=-0.7, delta_m2=2.0)
    v = steady_covariance(build_drift(p), build_diffusion(p))
    err = float(np.max(np.abs(v - np.eye(6) / 2)))
    _require(err <= 1e-12, f"max |V - I/2| = {err:.3e}")
    report = analyze(p)
    largest = max(report.e_am1, report.e_am2, report.e_m1m2, report.r_min)
    _require(largest <= 1e-12, f"largest measure {largest:.3e}")
    return f"max |V - I/2| = {err:.1e}"


@_check("two-mode squeezed negativity")
def _tmsv_negativity() -> str:
    worst = 0.0
    for r in (0.1, 0.5, 1.0):
        v4 = two_mode_squeezed_vacuum(r)
        worst = max(worst, abs(log_negativity_pair(v4) - 2 * r))
        gap = abs(transposed_nu_minus(v4, 0) - nu_minus_invariant(v4))
        _require(gap <= 1e-9, f"eig and invariant routes differ by {gap:.3e}")
    _require(worst <= 1e-9, f"|E - 2r| = {worst:.3e}")
    return f"max |E - 2r| = {worst:.1e}"


@_check("drift substitution")
def _drift_substitution() -> str:
    p = SystemParams(delta_c=2.0, delta_m1=-2.0, delta_m2=-2.0)
    a = build_drift(p)
    expected = np.array(
        [[-1.0, 0.8, 0.0, 3.2, 0.0, 3.2], [-3.2, -1.0, -3.2, 0.0, -3.2, 0.0]]
    )
    _require(np.allclose(a[:2], expected, rtol=0, atol=1e-15), f"rows 1-2: {a[:2]}")
    return "rows 1-2 match"


@_check("Lyapunov residual")
def _lyapunov_residual() -> str:
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(25):
        m = rng.normal(size=(6, 6))
        a = m - (np.max(np.linalg.eigvals(m).real) + 0.5) * np.eye(6)
        q_half = rng.normal(size=(6, 6))
        q = q_half.T @ q_half
        v = solve_lyapunov(a, q)
        rel = frobenius_residual(a, v, q) / float(np.linalg.norm(q, ord="fro"))
        worst = max(worst, rel)
    _require(worst <= 1e-10, f"relative residual {worst:.3e}")
    return f"max relative residual = {worst:.1e}"


@_check("driven damped cavity")
def _driven_cavity() -> str:
    s = steady_state(_decoupled(eps_p=1.0))
    _require(abs(s.a - (-1j)) <= 1e-15, f"a = {s.a}")
    return "a = -i"


@_check("parametric threshold")
def _parametric_threshold() -> str:
    for omega in (0.2, 0.5, 0.8):
        margin = stability_margin(build_drift(_decoupled(omega_nl=omega)))
        _require(
            math.isclose(margin, 1.0 - 2.0 * omega, abs_tol=1e-12),
            f"margin {margin} != kappa - 2 Omega at Omega={omega}",
        )
    return "margin = kappa - 2 Omega"


@_check("no nonlinearity, no entanglement")
def _linear_coupling() -> str:
    p = SystemParams(omega_nl=0.0, delta_c=3.0, delta_m1=-3.0, delta_m2=-3.0)
    report = analyze(p)
    _require(report.stable, "point reported unstable")
    total = report.e_am1 + report.e_am2 + report.e_m1m2 + report.r_min
    _require(total <= 1e-12, f"measures sum to {total:.3e}")
    return f"measures sum to {total:.1e}"


def run_selftest() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        try:
            detail = fn()
        except Exception as exc:  # report every failure, keep going
            logger.error("selftest %s failed: %s", name, exc)
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append(CheckResult(name, True, detail))
    return results


def render(results: list[CheckResult]) -> str:
    frame = pd.DataFrame(
        [
            {
                "check": r.name,
                "status": "ok" if r.passed else "FAIL",
                "detail": r.detail,
            }
            for r in results
        ]
    )
    return frame.to_markdown(index=False)
