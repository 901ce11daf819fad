"""Serialization of sweep results: CSV tables and portable graymaps."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np
import pandas as pd

from magnon_entangle.sweep import GridRecord

logger = logging.getLogger(__name__)

CSV_HEADER = "# magnon-entangle csv v1"


def _format_float(value: float) -> str:
    # shortest repr that round-trips, stable across runs
    return repr(float(value))


def records_to_frame(
    records: Sequence[GridRecord], x_name: str, y_name: str
) -> pd.DataFrame:
    """One row per grid cell: axis values, stability flag, then quantities."""
    rows = []
    for record in records:
        row: dict[str, float | int | None] = {
            x_name: record.x_value,
            y_name: record.y_value,
            "stable": int(record.stable),
        }
        row.update(record.values)
        rows.append(row)
    frame = pd.DataFrame(rows)
    for column in frame.columns[3:]:
        frame[column] = frame[column].astype("float64")
    return frame


def frame_to_csv(frame: pd.DataFrame) -> str:
    """Versioned CSV; absent values are empty fields, never ``NaN``."""
    body = frame.to_csv(
        index=False, float_format=_format_float, na_rep="", lineterminator="\n"
    )
    return f"{CSV_HEADER}\n{body}"


def key_value_csv(pairs: Iterable[tuple[str, object]]) -> str:
    """Two-column ``key,value`` CSV for single-point reports."""
    rendered = []
    for key, value in pairs:
        if value is None:
            text = ""
        elif isinstance(value, bool):
            text = str(int(value))
        elif isinstance(value, float):
            text = _format_float(value)
        else:
            text = str(value)
        rendered.append({"key": key, "value": text})
    frame = pd.DataFrame(rendered, columns=["key", "value"])
    return frame_to_csv(frame)


def frame_to_pgm(
    frame: pd.DataFrame,
    quantity: str,
    nx: int,
    ny: int,
    *,
    log_scale: bool = False,
) -> bytes:
    """8-bit binary graymap of ``quantity``; rows follow the grid's ``y`` order.

    Finite values are scaled linearly (or by ``log10`` for positive values when
    ``log_scale``) between their min and max; absent cells are black.
    """
    if quantity not in frame.columns:
        raise KeyError(f"quantity {quantity!r} not in results")
    values = frame[quantity].to_numpy(dtype=np.float64).reshape(ny, nx)
    valid = np.isfinite(values)
    if log_scale:
        valid &= values > 0
        values = np.where(valid, np.log10(np.where(valid, values, 1.0)), np.nan)

    pixels = np.zeros((ny, nx), dtype=np.uint8)
    if valid.any():
        lo, hi = float(values[valid].min()), float(values[valid].max())
        span = hi - lo
        if span > 0:
            scaled = np.round((values[valid] - lo) / span * 255.0)
            pixels[valid] = scaled.astype(np.uint8)
    else:
        logger.warning("no finite %s values; graymap is blank", quantity)
    header = f"P5\n{nx} {ny}\n255\n".encode("ascii")
    return header + pixels.tobytes()

