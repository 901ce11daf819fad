"""Two-dimensional parameter sweeps with optional inner-scan maximization.

Grids are evaluated point by point, optionally in a process pool, and always
assembled in row-major order with ``x`` varying fastest.
"""

from __future__ import annotations

import logging
import math
import os
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from magnon_entangle.entanglement import analyze
from magnon_entangle.errors import (
    AllUnstable,
    ConditionUnreachable,
    ConfigError,
    MeanFieldDivergence,
    MonogamyViolation,
    NumericalError,
)
from magnon_entangle.model import (
    SystemParams,
    build_drift,
    condition_residuals,
    stability_margin,
    steady_state,
)

logger = logging.getLogger(__name__)

AxisName = Literal["delta_c", "delta_m", "phi", "omega_nl", "g"]
Binding = Literal["none", "delta_c_eq_neg_delta_m", "tri_condition"]

OCCUPATIONS = ("n_c", "n_m1", "n_m2")
MEASURES = ("e_am1", "e_am2", "e_m1m2", "r_min")
CONDITIONS = ("r_hyper", "r_antidiag", "r_tri")
QUANTITIES = (*OCCUPATIONS, *MEASURES, *CONDITIONS, "margin")

BOUND_PARAMETERS: dict[str, frozenset[str]] = {
    "none": frozenset(),
    "delta_c_eq_neg_delta_m": frozenset({"delta_c"}),
    "tri_condition": frozenset({"delta_c", "delta_m"}),
}

# Grids smaller than this are evaluated in-process.
PARALLEL_MIN_POINTS = 64


class Axis(BaseModel):
    """A swept parameter sampled on ``steps`` evenly spaced values."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: AxisName
    lo: float
    hi: float
    steps: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> Axis:
        if not self.lo < self.hi:
            raise ValueError(
                f"axis {self.name}: lo={self.lo} must be below hi={self.hi}"
            )
        return self

    def values(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.lo, self.hi, self.steps)

    @property
    def cell(self) -> float:
        return (self.hi - self.lo) / (self.steps - 1)


class SweepJob(BaseModel):
    """A 2-D map over ``x`` and ``y`` with an optional binding and inner scan."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: SystemParams = Field(default_factory=SystemParams)
    x: Axis
    y: Axis
    binding: Binding = "none"
    inner_scan: Axis | None = None
    quantities: tuple[str, ...] = QUANTITIES

    @field_validator("quantities")
    @classmethod
    def _known_quantities(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        unknown = [q for q in value if q not in QUANTITIES]
        if unknown:
            raise ValueError(f"unknown quantities {unknown}; choose from {QUANTITIES}")
        if not value:
            raise ValueError("at least one quantity is required")
        return tuple(dict.fromkeys(value))

    @model_validator(mode="after")
    def _consistent_axes(self) -> SweepJob:
        names = [self.x.name, self.y.name]
        if self.inner_scan is not None:
            names.append(self.inner_scan.name)
            if self.inner_scan.steps < 3:
                raise ValueError("inner scan needs at least 3 steps")
        if len(set(names)) != len(names):
            raise ValueError(f"axes must be distinct, got {names}")
        clash = BOUND_PARAMETERS[self.binding].intersection(names)
        if clash:
            raise ValueError(
                f"binding {self.binding} fixes {sorted(clash)}; do not sweep it"
            )
        return self


class GridRecord(BaseModel):
    """One evaluated grid cell. Absent values are ``None``."""

    model_config = ConfigDict(frozen=True)

    x_value: float
    y_value: float
    stable: bool
    values: dict[str, float | None]
    error: str | None = None


class ScanMaximum(NamedTuple):
    argmax: float
    value: float


def apply_binding(p: SystemParams, binding: Binding) -> SystemParams:
    """Impose a constraint between detunings on ``p``."""
    if binding == "delta_c_eq_neg_delta_m":
        return p.with_overrides(delta_c=-p.delta_m)
    if binding == "tri_condition":
        gap = p.phi**2 - 2.0 * p.g_sq
        if gap < 0.0:
            raise ConditionUnreachable(
                f"phi^2 - 2g^2 = {gap:.3e} < 0; no real delta_m on the condition"
            )
        delta_m = math.sqrt(gap)
        return p.with_overrides(delta_m=delta_m, delta_c=-delta_m)
    return p


def _params_at(
    base: SystemParams, overrides: dict[str, float], binding: Binding
) -> SystemParams:
    return apply_binding(base.with_overrides(**overrides), binding)


def evaluate_point(
    base: SystemParams,
    overrides: dict[str, float],
    *,
    binding: Binding = "none",
    quantities: Sequence[str] = QUANTITIES,
    x_value: float = math.nan,
    y_value: float = math.nan,
) -> GridRecord:
    """Evaluate the requested quantities at ``base`` with ``overrides`` applied.

    Numerical failures are recorded on the returned record, never raised;
    only configuration errors propagate.
    """
    values: dict[str, float | None] = {q: None for q in quantities}
    try:
        p = _params_at(base, overrides, binding)
    except ConditionUnreachable as exc:
        logger.debug("point %s: %s", overrides, exc)
        return GridRecord(
            x_value=x_value,
            y_value=y_value,
            stable=False,
            values=values,
            error=type(exc).__name__,
        )

    residuals = condition_residuals(p)._asdict()
    for name in CONDITIONS:
        if name in values:
            values[name] = residuals[name]

    error: str | None = None
    try:
        if any(q in MEASURES for q in quantities):
            report = analyze(p)
            stable, margin = report.stable, report.margin
            if stable:
                for name in MEASURES:
                    if name in values:
                        values[name] = getattr(report, name)
        else:
            margin = stability_margin(build_drift(p))
            stable = margin > 0.0
    except NumericalError as exc:
        level = logging.WARNING if isinstance(exc, MonogamyViolation) else logging.DEBUG
        logger.log(level, "point %s failed: %s", overrides, exc)
        return GridRecord(
            x_value=x_value,
            y_value=y_value,
            stable=False,
            values=values,
            error=type(exc).__name__,
        )

    if "margin" in values:
        values["margin"] = margin

    if stable and any(q in OCCUPATIONS for q in quantities):
        try:
            s = steady_state(p)
        except MeanFieldDivergence as exc:
            logger.debug("point %s: %s", overrides, exc)
            error = type(exc).__name__
        else:
            for name in OCCUPATIONS:
                if name in values:
                    values[name] = getattr(s, name)

    return GridRecord(
        x_value=x_value, y_value=y_value, stable=stable, values=values, error=error
    )


def _scan_records(
    base: SystemParams, scan: Axis, binding: Binding, quantities: Sequence[str]
) -> list[GridRecord]:
    return [
        evaluate_point(
            base,
            {scan.name: float(value)},
            binding=binding,
            quantities=quantities,
            x_value=float(value),
        )
        for value in scan.values()
    ]


def _best(records: Iterable[GridRecord], quantity: str) -> ScanMaximum | None:
    best: ScanMaximum | None = None
    for record in records:
        value = record.values.get(quantity)
        if not record.stable or value is None:
            continue
        # strict comparison keeps the lowest-index point on ties
        if best is None or value > best.value:
            best = ScanMaximum(argmax=record.x_value, value=value)
    return best


def max_over_scan(
    base: SystemParams,
    scan: Axis,
    quantity: str,
    *,
    binding: Binding = "none",
) -> ScanMaximum:
    """Grid argmax of ``quantity`` along ``scan``, skipping unstable points."""
    if scan.steps < 3:
        raise ConfigError("scan needs at least 3 steps")
    if quantity not in QUANTITIES:
        raise ConfigError(f"unknown quantity {quantity!r}")
    if scan.name in BOUND_PARAMETERS[binding]:
        raise ConfigError(f"binding {binding} fixes {scan.name}; it cannot be scanned")
    best = _best(_scan_records(base, scan, binding, (quantity,)), quantity)
    if best is None:
        raise AllUnstable(
            f"no stable point along {scan.name} in [{scan.lo}, {scan.hi}]"
        )
    return best


def _evaluate_cell(job: SweepJob, cell: tuple[float, float]) -> GridRecord:
    x_value, y_value = cell
    overrides = {job.x.name: x_value, job.y.name: y_value}
    if job.inner_scan is None:
        return evaluate_point(
            job.base,
            overrides,
            binding=job.binding,
            quantities=job.quantities,
            x_value=x_value,
            y_value=y_value,
        )

    base = job.base.with_overrides(**overrides)
    records = _scan_records(base, job.inner_scan, job.binding, job.quantities)
    values: dict[str, float | None] = {}
    for quantity in job.quantities:
        best = _best(records, quantity)
        values[quantity] = None if best is None else best.value
        values[f"{quantity}_at"] = None if best is None else best.argmax
    return GridRecord(
        x_value=x_value,
        y_value=y_value,
        stable=any(r.stable for r in records),
        values=values,
    )


def resolve_workers(threads: int | None) -> int:
    """``threads`` if positive, else ``MAGNON_ENTANGLE_THREADS``, else all CPUs."""
    if threads is None or threads <= 0:
        env = os.environ.get("MAGNON_ENTANGLE_THREADS", "0")
        try:
            threads = int(env)
        except ValueError as exc:
            raise ConfigError(
                f"MAGNON_ENTANGLE_THREADS={env!r} is not an integer"
            ) from exc
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def map2d(job: SweepJob, *, threads: int | None = None) -> list[GridRecord]:
    """Evaluate ``job`` on its grid; records are row-major with ``x`` fastest."""
    cells = [(float(x), float(y)) for y in job.y.values() for x in job.x.values()]
    workers = resolve_workers(threads)
    started = time.perf_counter()
    logger.info(
        "sweep %s x %s: %d points, %d worker(s)",
        job.x.name,
        job.y.name,
        len(cells),
        workers,
    )

    evaluate = partial(_evaluate_cell, job)
    if workers == 1 or len(cells) < PARALLEL_MIN_POINTS:
        records = [evaluate(cell) for cell in cells]
    else:
        chunksize = max(1, len(cells) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map yields in submission order regardless of completion order
            records = list(pool.map(evaluate, cells, chunksize=chunksize))

    failed = sum(1 for r in records if r.error is not None)
    logger.info(
        "sweep finished in %.2fs (%d unstable, %d with errors)",
        time.perf_counter() - started,
        sum(1 for r in records if not r.stable),
        failed,
    )
    return records


def condition_curve(
    name: Literal["hyper", "antidiag", "tri"],
    base: SystemParams,
    axis: Axis,
) -> list[tuple[float, float]]:
    """Sample points of an analytic condition curve for plot overlays.

    ``hyper``: ``delta_m = 2 g^2 / delta_c`` over a ``delta_c`` axis.
    ``antidiag``: ``delta_m = -delta_c`` over a ``delta_c`` axis.
    ``tri``: ``delta_m = +/- sqrt(phi^2 - 2 g^2)`` over a ``phi`` axis; both
    branches are returned where real.
    """
    g_sq = base.g_sq
    points: list[tuple[float, float]] = []
    for value in axis.values():
        v = float(value)
        if name == "hyper":
            if v != 0.0:
                points.append((v, 2.0 * g_sq / v))
        elif name == "antidiag":
            points.append((v, -v))
        elif name == "tri":
            gap = v**2 - 2.0 * g_sq
            if gap >= 0.0:
                root = math.sqrt(gap)
                points.extend([(v, root), (v, -root)])
        else:
            raise ConfigError(f"unknown condition {name!r}")
    return points
