"""Tests for magnon_entangle.entanglement."""

import logging
from unittest.mock import patch

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp
from scipy.linalg import block_diag, expm

from magnon_entangle import entanglement
from magnon_entangle.entanglement import (
    Mode,
    analyze,
    is_physical,
    log_negativity_pair,
    min_residual_contangle,
    negativity_one_vs_two,
    nu_minus_invariant,
    reduce_modes,
    residual_contangle,
    steady_covariance,
    symplectic_form,
    symplectic_spectrum,
    transposed_nu_minus,
    two_mode_squeezed_vacuum,
)
from magnon_entangle.errors import MonogamyViolation, UnstableDrift
from magnon_entangle.model import SystemParams, build_diffusion, build_drift

VACUUM = np.eye(6) / 2


def _decoupled(**overrides):
    return SystemParams(g1=0.0, g2=0.0, omega_nl=0.0, eps_p=0.0).with_overrides(
        **overrides
    )


def _random_two_mode(rng: np.random.Generator) -> np.ndarray:
    """A random physical 4x4 covariance: symplectic image of a thermal state."""
    h = rng.normal(scale=0.5, size=(4, 4))
    s = expm(symplectic_form(2) @ (h + h.T))
    nu = 0.5 + rng.exponential(0.5, size=2)
    return s @ np.diag(np.repeat(nu, 2)) @ s.T


def _tmsv_with_vacuum(r: float) -> np.ndarray:
    return block_diag(two_mode_squeezed_vacuum(r), np.eye(2) / 2)


class TestSteadyCovariance:
    """Lyapunov steady state of the fluctuations."""

    def test_vacuum(self):
        p = _decoupled(delta_c=0.3, delta_m1=-1.2, delta_m2=2.5)
        assert_allclose(
            steady_covariance(build_drift(p), build_diffusion(p)), VACUUM, atol=1e-12
        )

    def test_degenerate_parametric_amplifier(self):
        p = _decoupled(omega_nl=0.4)
        v = steady_covariance(build_drift(p), build_diffusion(p))
        # cavity drift [[-1, -0.8], [-0.8, -1]] is symmetric: diagonal in (1, +-1)
        plus, minus = 1 / 3.6, 1 / 0.4
        cavity = 0.5 * np.array(
            [[plus + minus, plus - minus], [plus - minus, plus + minus]]
        )
        assert_allclose(v[:2, :2], cavity, atol=1e-12)
        assert_allclose(v[2:, 2:], np.eye(4) / 2, atol=1e-12)
        assert_allclose(v[:2, 2:], 0.0, atol=1e-12)

    def test_matches_time_integration(self):
        p = SystemParams(omega_nl=0.45, delta_c=-6.0, delta_m1=6.0, delta_m2=6.0)
        a, d = build_drift(p), build_diffusion(p)
        v = steady_covariance(a, d)
        rate = -float(np.max(np.linalg.eigvals(a).real))

        def rhs(_t, y):
            w = y.reshape(6, 6)
            return (a @ w + w @ a.T + d).ravel()

        sol = solve_ivp(
            rhs,
            (0.0, 50.0 / rate),
            VACUUM.ravel(),
            method="DOP853",
            rtol=1e-10,
            atol=1e-12,
        )
        assert_allclose(sol.y[:, -1].reshape(6, 6), v, atol=1e-6)
        assert is_physical(v)

    def test_unstable(self):
        p = _decoupled(omega_nl=0.6)
        with pytest.raises(UnstableDrift, match="margin"):
            steady_covariance(build_drift(p), build_diffusion(p))

    def test_known_margin_is_trusted(self):
        p = _decoupled()
        with pytest.raises(UnstableDrift, match="margin"):
            steady_covariance(build_drift(p), build_diffusion(p), margin=-1.0)


class TestSymplecticSpectrum:
    def test_vacuum(self):
        assert_allclose(symplectic_spectrum(VACUUM), [0.5] * 6, atol=1e-14)
        assert is_physical(VACUUM)

    def test_unphysical(self):
        assert not is_physical(np.eye(4) / 4)

    def test_symplectic_form(self):
        j = symplectic_form(3)
        assert_allclose(j @ j, -np.eye(6))
        assert_allclose(j.T, -j)


class TestReduceModes:
    """Selecting two-mode blocks."""

    def test_vacuum(self):
        for pair in ((0, 1), (0, 2), (1, 2)):
            assert_allclose(reduce_modes(VACUUM, pair), np.eye(4) / 2)

    def test_positions(self):
        labeled = np.arange(36, dtype=float).reshape(6, 6)
        v4 = reduce_modes(labeled, (Mode.MAGNON2, Mode.CAVITY))
        idx = [0, 1, 4, 5]
        assert_allclose(v4, labeled[np.ix_(idx, idx)])

    def test_swap_symmetry(self):
        p = SystemParams(omega_nl=0.4, delta_c=2.0, delta_m1=-2.0, delta_m2=-2.0)
        v = steady_covariance(build_drift(p), build_diffusion(p))
        assert_allclose(reduce_modes(v, (0, 1)), reduce_modes(v, (0, 2)), atol=1e-12)

    def test_same_mode_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            reduce_modes(VACUUM, (1, 1))

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            reduce_modes(VACUUM, (0, 3))


class TestLogNegativity:
    """Two-mode logarithmic negativity."""

    def test_vacuum_separable(self):
        v4 = np.eye(4) / 2
        assert transposed_nu_minus(v4, 0) == pytest.approx(0.5)
        assert log_negativity_pair(v4) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.3])
    def test_two_mode_squeezed(self, r):
        assert log_negativity_pair(two_mode_squeezed_vacuum(r)) == pytest.approx(
            2 * r, abs=1e-12
        )

    def test_invariant_route_agrees(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            v4 = _random_two_mode(rng)
            assert transposed_nu_minus(v4, 0) == pytest.approx(
                nu_minus_invariant(v4), abs=1e-9
            )
            assert is_physical(v4)

    @pytest.mark.slow
    def test_invariant_route_agrees_many(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            v4 = _random_two_mode(rng)
            assert transposed_nu_minus(v4, 0) == pytest.approx(
                nu_minus_invariant(v4), abs=1e-9
            )

    def test_driven_system_dual_route(self):
        p = SystemParams(delta_c=-6.0, delta_m1=6.0, delta_m2=6.0)
        v = steady_covariance(build_drift(p), build_diffusion(p))
        v4 = reduce_modes(v, (Mode.CAVITY, Mode.MAGNON1))
        assert transposed_nu_minus(v4, 0) == pytest.approx(
            nu_minus_invariant(v4), abs=1e-9
        )

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="4x4"):
            log_negativity_pair(VACUUM)


class TestContangle:
    """One-vs-two negativity and residual contangles."""

    def test_vacuum(self):
        for mode in Mode:
            assert negativity_one_vs_two(VACUUM, mode) == pytest.approx(0.0, abs=1e-12)
            assert residual_contangle(VACUUM, mode) == pytest.approx(0.0, abs=1e-12)
        assert min_residual_contangle(VACUUM) == pytest.approx(0.0, abs=1e-12)

    def test_product_state_reduces_to_pair(self):
        v = _tmsv_with_vacuum(0.4)
        assert negativity_one_vs_two(v, 0) == pytest.approx(0.8, abs=1e-12)
        assert negativity_one_vs_two(v, 2) == pytest.approx(0.0, abs=1e-12)

    def test_product_state_saturates_monogamy(self):
        v = _tmsv_with_vacuum(0.4)
        assert residual_contangle(v, 2) == pytest.approx(0.0, abs=1e-12)
        assert residual_contangle(v, 0) == pytest.approx(0.0, abs=1e-10)
        assert min_residual_contangle(v) == pytest.approx(0.0, abs=1e-10)

    def test_matrix_product_oracle(self):
        p = SystemParams(omega_nl=0.4, delta_c=-4.0, delta_m1=4.2, delta_m2=4.2)
        v = steady_covariance(build_drift(p), build_diffusion(p))
        flip = np.diag([1.0, -1.0, 1.0, 1.0, 1.0, 1.0])
        values = np.linalg.eigvals(1j * symplectic_form(3) @ flip @ v @ flip)
        nu = float(np.min(np.abs(values)))
        expected = max(0.0, -np.log(2 * nu))
        assert negativity_one_vs_two(v, Mode.CAVITY) == pytest.approx(
            expected, abs=1e-10
        )

    def test_clamps_noise(self, monkeypatch, caplog):
        monkeypatch.setattr(entanglement, "residual_contangle", lambda v, i: -1e-7)
        with caplog.at_level(logging.WARNING, logger="magnon_entangle.entanglement"):
            assert min_residual_contangle(VACUUM) == 0.0
        assert "clamped" in caplog.text

    def test_violation_raises(self, monkeypatch):
        monkeypatch.setattr(entanglement, "residual_contangle", lambda v, i: -1e-3)
        with pytest.raises(MonogamyViolation, match="monogamy"):
            min_residual_contangle(VACUUM)


class TestAnalyze:
    """Full pipeline at one parameter point."""

    def test_no_nonlinearity_no_entanglement(self):
        report = analyze(
            SystemParams(omega_nl=0.0, delta_c=3.0, delta_m1=-3.0, delta_m2=-3.0)
        )
        assert report.stable
        for value in (report.e_am1, report.e_am2, report.e_m1m2, report.r_min):
            assert value == pytest.approx(0.0, abs=1e-12)

    def test_resonant_point_has_no_cavity_magnon_entanglement(self):
        report = analyze(SystemParams())
        assert report.stable
        assert report.e_am1 == pytest.approx(0.0, abs=1e-9)
        assert report.e_am2 == pytest.approx(0.0, abs=1e-9)

    def test_exchange_symmetry(self):
        report = analyze(SystemParams(delta_c=1.7, delta_m1=-2.4, delta_m2=-2.4))
        assert report.e_am1 == pytest.approx(report.e_am2, abs=1e-12)

    def test_swapping_magnons_swaps_measures(self):
        p = SystemParams(
            omega_nl=0.4,
            g1=2.5,
            g2=1.5,
            gamma1=1.0,
            gamma2=1.4,
            delta_c=-3.0,
            delta_m1=3.5,
            delta_m2=2.0,
        )
        q = p.with_overrides(
            g1=p.g2,
            g2=p.g1,
            gamma1=p.gamma2,
            gamma2=p.gamma1,
            delta_m1=p.delta_m2,
            delta_m2=p.delta_m1,
        )
        left, right = analyze(p), analyze(q)
        assert left.e_am1 == pytest.approx(right.e_am2, abs=1e-12)
        assert left.e_am2 == pytest.approx(right.e_am1, abs=1e-12)
        assert left.e_m1m2 == pytest.approx(right.e_m1m2, abs=1e-12)
        assert left.r_min == pytest.approx(right.r_min, abs=1e-12)

    def test_probe_independent(self):
        p = SystemParams(omega_nl=0.4, delta_c=-2.0, delta_m1=2.0, delta_m2=2.0)
        assert analyze(p) == analyze(p.with_overrides(eps_p=7.5))

    def test_off_resonant_tripartite(self):
        report = analyze(SystemParams(delta_c=-5.0, delta_m1=5.0, delta_m2=5.0))
        assert report.stable
        assert report.r_min > 0.0

    def test_stability_margin_computed_once(self):
        with patch.object(
            entanglement, "stability_margin", wraps=entanglement.stability_margin
        ) as margin:
            report = analyze(SystemParams(delta_c=-5.0, delta_m1=5.0, delta_m2=5.0))
        assert report.stable
        assert margin.call_count == 1

    def test_unstable_carries_no_measures(self):
        report = analyze(_decoupled(omega_nl=0.7))
        assert not report.stable
        assert report.margin == pytest.approx(-0.4)
        assert report.e_am1 == report.e_m1m2 == report.r_min == 0.0


@pytest.mark.slow
def test_monogamy_and_physicality_on_grid():
    base = SystemParams()
    for delta_c in np.linspace(-10.0, 10.0, 41):
        for delta_m in np.linspace(-10.0, 10.0, 41):
            p = base.with_overrides(delta_c=float(delta_c), delta_m=float(delta_m))
            a = build_drift(p)
            if -np.max(np.linalg.eigvals(a).real) <= 0:
                continue
            v = steady_covariance(a, build_diffusion(p))
            assert symplectic_spectrum(v)[0] >= 0.5 - 1e-9
            for mode in Mode:
                assert residual_contangle(v, mode) >= -1e-9


@pytest.mark.slow
def test_only_partial_transpose_goes_below_vacuum():
    """Reduced two-mode states stay physical; entanglement shows only after PT."""
    base = SystemParams()
    pairs = ((Mode.CAVITY, Mode.MAGNON1), (Mode.CAVITY, Mode.MAGNON2))
    pairs += ((Mode.MAGNON1, Mode.MAGNON2),)
    entangled = 0
    for delta_c in np.linspace(-10.0, 10.0, 41):
        for delta_m in np.linspace(-10.0, 10.0, 41):
            p = base.with_overrides(delta_c=float(delta_c), delta_m=float(delta_m))
            a = build_drift(p)
            if -np.max(np.linalg.eigvals(a).real) <= 0:
                continue
            v = steady_covariance(a, build_diffusion(p))
            for pair in pairs:
                v4 = reduce_modes(v, pair)
                assert symplectic_spectrum(v4)[0] >= 0.5 - 1e-9
                if transposed_nu_minus(v4, 0) < 0.5:
                    entangled += 1
    assert entangled > 0
