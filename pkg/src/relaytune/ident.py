"""FOPDT identification from logged step-response data.

Fitting uses the two-point method on the 28.3% / 63.2% rise times:

    tau = 1.5 * (t63 - t28),   dead_time = t63 - tau   (clamped at 0),

with crossing times linearly interpolated between samples. Multiple logged
runs of the same test can be averaged onto a common uniform grid first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IllConditioned,
    InsufficientResponse,
    InvalidArgument,
    NoOverlap,
    NoStep,
)
from .model import FopdtModel

MIN_SAMPLES = 10

# Two-point rise fractions: 1 - exp(-t/tau) hits 0.283 at t = tau/3 and
# 0.632 at t = tau, which is what makes tau = 1.5*(t63 - t28) exact.
FRAC_LOW = 0.283
FRAC_HIGH = 0.632

# Steady-state gate: the final tenth of the record may vary by at most this
# fraction of the total output change.
TAIL_FRACTION = 0.1
TAIL_VARIATION_LIMIT = 0.02


@dataclass(frozen=True)
class ResponseRecord:
    """One logged response: sample times, plant input, plant output."""

    time: np.ndarray
    input: np.ndarray
    output: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        for name in ("time", "input", "output"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.time.shape[0]
        if n < MIN_SAMPLES:
            raise InvalidArgument(f"record needs at least {MIN_SAMPLES} samples, got {n}")
        if self.input.shape[0] != n or self.output.shape[0] != n:
            raise InvalidArgument("time, input, and output must have equal length")
        if not np.all(np.isfinite(self.time)) or not np.all(np.isfinite(self.input)) \
                or not np.all(np.isfinite(self.output)):
            raise InvalidArgument("record contains non-finite samples")
        if not np.all(np.diff(self.time) > 0.0):
            raise InvalidArgument("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.time.shape[0]


def average_records(records, grid_dt: float) -> ResponseRecord:
    """Pointwise mean of several records on a shared uniform grid.

    Each record is linearly interpolated onto a grid of step grid_dt spanning
    the intersection of all time ranges; input and output columns are
    averaged sample by sample. Averaging a single record just resamples it.

    Raises NoOverlap when the records share no common interval.
    """
    records = list(records)
    if not records:
        raise InvalidArgument("need at least one record")
    if not (math.isfinite(grid_dt) and grid_dt > 0.0):
        raise InvalidArgument("grid_dt must be positive")
    t_lo = max(float(r.time[0]) for r in records)
    t_hi = min(float(r.time[-1]) for r in records)
    if t_hi <= t_lo:
        raise NoOverlap(
            f"record time ranges do not overlap (common interval "
            f"[{t_lo:g}, {t_hi:g}] is empty)"
        )
    n = int(math.floor((t_hi - t_lo) / grid_dt + 1e-9)) + 1
    grid = t_lo + grid_dt * np.arange(n, dtype=np.float64)
    u = np.zeros(n, dtype=np.float64)
    y = np.zeros(n, dtype=np.float64)
    for r in records:
        u += np.interp(grid, r.time, r.input)
        y += np.interp(grid, r.time, r.output)
    u /= len(records)
    y /= len(records)
    label = f"mean of {len(records)} records" if len(records) > 1 else records[0].source_label
    return ResponseRecord(time=grid, input=u, output=y, source_label=label)


def estimate_gain(delta_y: float, delta_u: float) -> float:
    """Steady-state gain from the output and input changes."""
    if not math.isfinite(delta_y) or not math.isfinite(delta_u):
        raise InvalidArgument("deltas must be finite")
    if delta_u == 0.0:
        raise InvalidArgument("delta_u must be nonzero")
    return delta_y / delta_u


def _crossing_time(time, y, level, start):
    """First time y reaches level at or after index start, interpolated."""
    idx = np.flatnonzero(y[start:] >= level)
    if idx.shape[0] == 0:
        return None
    k = start + int(idx[0])
    if k == start:
        return float(time[k])
    y0, y1 = float(y[k - 1]), float(y[k])
    frac = (level - y0) / (y1 - y0)
    return float(time[k - 1]) + frac * float(time[k] - time[k - 1])


def identify_fopdt(record: ResponseRecord) -> FopdtModel:
    """Fit gain, time constant, and dead time to a single sustained step.

    The step instant is the largest single-sample input change; the output
    baseline is the pre-step mean and the steady value the mean of the final
    10% of samples, which must have settled (variation under 2% of the total
    change). Raises NoStep, InsufficientResponse, or IllConditioned when the
    record does not support the fit.
    """
    du = np.diff(record.input)
    if not np.any(du != 0.0):
        raise NoStep("input never changes: no step to identify from")
    step_index = int(np.argmax(np.abs(du))) + 1
    if step_index < 1 or step_index >= len(record) - 1:
        raise NoStep("input step sits at the record boundary")
    step_instant = float(record.time[step_index])

    u_pre = float(np.mean(record.input[:step_index]))
    u_post = float(np.mean(record.input[step_index:]))
    delta_u = u_post - u_pre
    if delta_u == 0.0:
        raise NoStep("input means before and after the step are equal")

    baseline = float(np.mean(record.output[:step_index]))
    tail = record.output[-max(2, int(round(TAIL_FRACTION * len(record)))):]
    steady = float(np.mean(tail))
    delta_y = steady - baseline
    if delta_y == 0.0:
        raise InsufficientResponse("output never moved in response to the step")
    tail_span = float(np.max(tail) - np.min(tail))
    if tail_span >= TAIL_VARIATION_LIMIT * abs(delta_y):
        raise InsufficientResponse(
            f"output not settled: final {int(100 * TAIL_FRACTION)}% of samples vary by "
            f"{100 * tail_span / abs(delta_y):.1f}% of the total change (limit "
            f"{100 * TAIL_VARIATION_LIMIT:g}%)"
        )

    # Normalize so the rise goes 0 -> 1 regardless of step sign.
    y_norm = (record.output - baseline) / delta_y
    t28 = _crossing_time(record.time, y_norm, FRAC_LOW, step_index)
    t63 = _crossing_time(record.time, y_norm, FRAC_HIGH, step_index)
    if t28 is None or t63 is None:
        raise InsufficientResponse(
            f"output never reaches the {100 * FRAC_LOW:g}% / {100 * FRAC_HIGH:g}% levels"
        )
    tau = 1.5 * (t63 - t28)
    if tau <= 0.0:
        raise IllConditioned(
            f"fitted tau = {tau:g} s is not positive (t63 = {t63:g}, t28 = {t28:g})"
        )
    dead_time = max(0.0, t63 - tau - step_instant)
    return FopdtModel(gain_kp=delta_y / delta_u, tau=tau, dead_time=dead_time)
