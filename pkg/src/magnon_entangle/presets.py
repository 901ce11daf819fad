"""Figure presets: the sweeps behind the published detuning and strength maps."""

from __future__ import annotations

from dataclasses import dataclass

from pydantic import ValidationError

from magnon_entangle.errors import ConfigError
from magnon_entangle.model import SystemParams
from magnon_entangle.sweep import Axis, AxisName, Binding, SweepJob

GRID_STEPS = 201
INNER_GRID_STEPS = 51
INNER_SCAN_STEPS = 401

DETUNING = (-10.0, 10.0)
OMEGA = (0.0, 1.0)
COUPLING = (0.5, 5.0)
WIDE = (-15.0, 15.0)
INNER_DELTA_M = (0.1, 20.0)

ANTIDIAG: Binding = "delta_c_eq_neg_delta_m"


@dataclass(frozen=True)
class Preset:
    description: str
    x: tuple[AxisName, tuple[float, float]]
    y: tuple[AxisName, tuple[float, float]]
    quantities: tuple[str, ...]
    binding: Binding = "none"
    inner: tuple[AxisName, tuple[float, float]] | None = None

    @property
    def default_steps(self) -> int:
        return INNER_GRID_STEPS if self.inner is not None else GRID_STEPS


def _axis(spec: tuple[AxisName, tuple[float, float]], steps: int) -> Axis:
    name, (lo, hi) = spec
    return Axis(name=name, lo=lo, hi=hi, steps=steps)


DETUNING_MAP: tuple[
    tuple[AxisName, tuple[float, float]], tuple[AxisName, tuple[float, float]]
] = (("delta_c", DETUNING), ("delta_m", DETUNING))

FIGURES: dict[str, Preset] = {
    "fig2": Preset(
        "photon and magnon occupations vs (delta_c, delta_m)",
        *DETUNING_MAP,
        quantities=("n_c", "n_m1", "n_m2", "r_hyper"),
    ),
    "fig3a": Preset(
        "cavity-magnon negativity vs (delta_c, delta_m)",
        *DETUNING_MAP,
        quantities=("e_am1", "e_am2", "r_hyper", "r_antidiag"),
    ),
    "fig3b": Preset(
        "magnon-magnon negativity vs (delta_c, delta_m)",
        *DETUNING_MAP,
        quantities=("e_m1m2", "e_am1", "r_hyper", "r_antidiag"),
    ),
    "fig3c": Preset(
        "cavity-magnon negativity vs (delta_m, Omega) at delta_c = -delta_m",
        ("delta_m", DETUNING),
        ("omega_nl", OMEGA),
        quantities=("e_am1", "e_am2"),
        binding=ANTIDIAG,
    ),
    "fig3d": Preset(
        "magnon-magnon negativity vs (delta_m, Omega) at delta_c = -delta_m",
        ("delta_m", DETUNING),
        ("omega_nl", OMEGA),
        quantities=("e_m1m2",),
        binding=ANTIDIAG,
    ),
    "fig4a": Preset(
        "minimum residual contangle vs (delta_c, delta_m)",
        *DETUNING_MAP,
        quantities=("r_min", "r_antidiag"),
    ),
    "fig4b": Preset(
        "best residual contangle over delta_m vs (g, Omega) at delta_c = -delta_m",
        ("g", COUPLING),
        ("omega_nl", OMEGA),
        quantities=("r_min",),
        binding=ANTIDIAG,
        inner=("delta_m", INNER_DELTA_M),
    ),
    "fig5a": Preset(
        "minimum residual contangle vs (phi, delta_m) at delta_c = -delta_m",
        ("phi", WIDE),
        ("delta_m", WIDE),
        quantities=("r_min", "r_tri"),
        binding=ANTIDIAG,
    ),
    "fig5b": Preset(
        "best residual contangle over delta_m vs (phi, Omega) at delta_c = -delta_m",
        ("phi", (0.0, WIDE[1])),
        ("omega_nl", OMEGA),
        quantities=("r_min",),
        binding=ANTIDIAG,
        inner=("delta_m", INNER_DELTA_M),
    ),
}


def figure_job(
    name: str,
    base: SystemParams | None = None,
    *,
    steps: int | None = None,
    inner_steps: int | None = None,
) -> SweepJob:
    """Build the sweep job for figure ``name`` on top of ``base`` parameters."""
    try:
        preset = FIGURES[name]
    except KeyError:
        choices = sorted(FIGURES)
        raise ConfigError(f"unknown figure {name!r}; choose from {choices}") from None

    n = steps or preset.default_steps
    try:
        return SweepJob(
            base=base or SystemParams(),
            x=_axis(preset.x, n),
            y=_axis(preset.y, n),
            binding=preset.binding,
            inner_scan=None
            if preset.inner is None
            else _axis(preset.inner, inner_steps or INNER_SCAN_STEPS),
            quantities=preset.quantities,
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid preset resolution for {name}: {exc}") from exc
