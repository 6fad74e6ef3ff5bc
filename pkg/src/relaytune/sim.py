"""Deterministic fixed-step simulation of FOPDT loops.

Three experiments share one plant discretization: open-loop response, the
relay-feedback experiment used for critical-point measurement, and the
closed-loop non-interacting PID run with an input disturbance.

Discretization: exact zero-order hold of the first-order lag,

    y[k+1] = alpha*y[k] + gain*(1 - alpha)*u[k - D],   alpha = exp(-dt/tau),

with the dead time quantized to D = round(theta/dt) samples. This is exact
for piecewise-constant inputs. dt must satisfy dt <= dead_time/5 so the
delay quantization error stays below 10% of the dead time.

Every function here is pure: identical arguments give bit-identical traces,
on either kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (
    ConfigError,
    Diverged,
    InvalidArgument,
    MetricsUndefined,
    NoLimitCycle,
)
from .model import FopdtModel, PidGains, SimTrace

DEFAULT_DT = 0.01
DEFAULT_DURATION = 100.0

# Relay limit-cycle acceptance: drop at least this many warm-up cycles and
# average over the last CYCLES_USED; the retained period estimates must agree
# to PERIOD_TOL and the period must be resolved by the sample grid.
WARMUP_CYCLES = 5
CYCLES_USED = 5
PERIOD_TOL = 0.01
MIN_SWITCHINGS = 10
MIN_PERIOD_SAMPLES = 10


@dataclass(frozen=True)
class SimConfig:
    """Time grid and initial condition for one simulation run."""

    dt: float = DEFAULT_DT
    duration: float = DEFAULT_DURATION
    initial_output: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise InvalidArgument("dt must be positive")
        if not (math.isfinite(self.duration) and self.duration > 0.0):
            raise InvalidArgument("duration must be positive")
        if self.dt > self.duration:
            raise InvalidArgument("dt must not exceed duration")
        if not math.isfinite(self.initial_output):
            raise InvalidArgument("initial_output must be finite")

    @property
    def n_samples(self) -> int:
        """Grid points covering [0, duration], endpoints included."""
        return int(round(self.duration / self.dt)) + 1


@dataclass(frozen=True)
class RelayOutcome:
    """Measured limit cycle: amplitude a, period Tc, and critical gain
    Kc = 4d/(pi*a) for the relay magnitude d used."""

    amplitude_a: float
    period_tc: float
    critical_gain_kc: float
    cycles_used: int

    def __post_init__(self):
        for name in ("amplitude_a", "period_tc", "critical_gain_kc"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidArgument(f"{name} must be positive")
        if self.cycles_used < 1:
            raise InvalidArgument("cycles_used must be positive")


@dataclass(frozen=True)
class LoopScenario:
    """Closed-loop test: set-point step at t = 0, optional input-additive
    disturbance step, derivative filter sharpness, optional saturation.

    derivative_filter_n sets the derivative filter time constant to
    td/derivative_filter_n. The default 20 keeps the filter light enough
    that the relative damping of the three tuning rules is preserved.
    """

    setpoint_step: float = 1.0
    disturbance_magnitude: float = -0.5
    disturbance_time: float = 50.0
    derivative_filter_n: float = 20.0
    saturation: tuple[float, float] | None = None

    def __post_init__(self):
        if not math.isfinite(self.setpoint_step):
            raise InvalidArgument("setpoint_step must be finite")
        if not math.isfinite(self.disturbance_magnitude):
            raise InvalidArgument("disturbance_magnitude must be finite")
        if not (math.isfinite(self.disturbance_time) and self.disturbance_time >= 0.0):
            raise InvalidArgument("disturbance_time must be non-negative")
        if not (math.isfinite(self.derivative_filter_n) and self.derivative_filter_n > 0.0):
            raise InvalidArgument("derivative_filter_n must be positive")
        if self.saturation is not None:
            lo, hi = self.saturation
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvalidArgument("saturation must be a (low, high) pair with low < high")


@dataclass(frozen=True)
class Metrics:
    """Step-response quality measures; settling_time and recovery_time are
    None when the trace never stays inside the band ("not reached")."""

    overshoot_percent: float
    settling_time: float | None
    recovery_time: float | None
    peak_value: float
    initial_value: float
    final_value: float


def _lag_coefficients(model: FopdtModel, dt: float) -> tuple[float, float]:
    alpha = math.exp(-dt / model.tau)
    return alpha, model.gain_kp * (1.0 - alpha)


def _delay_samples(model: FopdtModel, cfg: SimConfig, extra_delay: float = 0.0) -> int:
    if model.dead_time > 0.0 and cfg.dt > model.dead_time / 5.0 + 1e-12:
        raise ConfigError(
            f"dt = {cfg.dt:g} too coarse for dead_time = {model.dead_time:g}; "
            f"need dt <= dead_time/5 = {model.dead_time / 5.0:g}"
        )
    return int(round((model.dead_time + extra_delay) / cfg.dt))


def simulate_open_loop(model: FopdtModel, input, cfg: SimConfig | None = None) -> SimTrace:
    """Open-loop response of the plant to an arbitrary sampled input.

    The input must supply one sample per grid point (cfg.n_samples values).
    The plant starts in equilibrium at cfg.initial_output: the delay line is
    pre-filled with initial_output/gain, so the output holds its initial
    value through the dead time under a step from rest.
    """
    cfg = cfg or SimConfig()
    delay = _delay_samples(model, cfg)
    u = np.ascontiguousarray(input, dtype=np.float64)
    if u.ndim != 1 or u.shape[0] != cfg.n_samples:
        raise ConfigError(
            f"input length {u.shape[0] if u.ndim == 1 else 'n/a'} does not match "
            f"the {cfg.n_samples}-point grid (duration/dt + 1)"
        )
    y = np.zeros(cfg.n_samples, dtype=np.float64)
    y[0] = cfg.initial_output
    alpha, b = _lag_coefficients(model, cfg.dt)
    u_pre = cfg.initial_output / model.gain_kp
    _backend.lag_loop(u, y, alpha, b, delay, u_pre)
    return SimTrace(dt=cfg.dt, t0=0.0, setpoint=u.copy(), control=u.copy(), output=y)


def critical_gain(relay_d: float, amplitude_a: float) -> float:
    """Ultimate gain from the relay describing function: 4d/(pi*a)."""
    if not (math.isfinite(relay_d) and relay_d > 0.0):
        raise InvalidArgument("relay_d must be positive")
    if not (math.isfinite(amplitude_a) and amplitude_a > 0.0):
        raise InvalidArgument("amplitude_a must be positive")
    return 4.0 * relay_d / (math.pi * amplitude_a)


def relay_experiment(
    model: FopdtModel,
    relay_d: float,
    hysteresis: float = 0.0,
    extra_delay: float = 0.0,
    cfg: SimConfig | None = None,
) -> tuple[RelayOutcome, SimTrace]:
    """Relay-feedback experiment measuring the plant's critical point.

    An ideal relay of magnitude relay_d (optional hysteresis band) closes
    the loop around the plant, plus an optional extra transport delay used
    by the delayed-relay tuning procedure. After discarding warm-up cycles,
    the period is the mean spacing of rising relay switchings and the
    amplitude the mean half peak-to-peak of the output over the last
    CYCLES_USED cycles.

    Raises NoLimitCycle when the oscillation is missing, unconverged, or
    unresolved by the sample grid.
    """
    cfg = cfg or SimConfig()
    if not (math.isfinite(relay_d) and relay_d > 0.0):
        raise InvalidArgument("relay_d must be positive")
    if not (math.isfinite(hysteresis) and hysteresis >= 0.0):
        raise InvalidArgument("hysteresis must be non-negative")
    if not (math.isfinite(extra_delay) and extra_delay >= 0.0):
        raise InvalidArgument("extra_delay must be non-negative")
    delay = _delay_samples(model, cfg, extra_delay)
    n = cfg.n_samples
    y = np.zeros(n, dtype=np.float64)
    y[0] = cfg.initial_output
    u = np.zeros(n, dtype=np.float64)
    alpha, b = _lag_coefficients(model, cfg.dt)
    u_pre = cfg.initial_output / model.gain_kp
    _backend.relay_loop(y, u, alpha, b, delay, u_pre, relay_d, hysteresis)
    trace = SimTrace(dt=cfg.dt, t0=0.0, setpoint=np.zeros(n), control=u, output=y)

    switches = int(np.count_nonzero(np.sign(u[1:]) != np.sign(u[:-1])))
    if switches < MIN_SWITCHINGS:
        raise NoLimitCycle(
            f"only {switches} relay switchings in {cfg.duration:g} s "
            f"(need at least {MIN_SWITCHINGS}); lengthen the run"
        )
    rising = np.flatnonzero((u[1:] > 0.0) & (u[:-1] < 0.0)) + 1
    periods = np.diff(rising) * cfg.dt
    if periods.shape[0] < WARMUP_CYCLES + CYCLES_USED:
        raise NoLimitCycle(
            f"only {periods.shape[0]} full relay cycles "
            f"(need {WARMUP_CYCLES + CYCLES_USED}); lengthen the run"
        )
    last = periods[-CYCLES_USED:]
    period_tc = float(np.mean(last))
    spread = float(np.max(np.abs(last - period_tc))) / period_tc
    if spread > PERIOD_TOL:
        raise NoLimitCycle(
            f"period estimates spread {100 * spread:.2f}% over the last "
            f"{CYCLES_USED} cycles (limit {100 * PERIOD_TOL:g}%)"
        )
    if period_tc < MIN_PERIOD_SAMPLES * cfg.dt:
        raise NoLimitCycle(
            f"oscillation period {period_tc:g} s is at grid resolution "
            f"(< {MIN_PERIOD_SAMPLES} samples): no sustained limit cycle"
        )
    amps = []
    for i in range(rising.shape[0] - CYCLES_USED - 1, rising.shape[0] - 1):
        seg = y[rising[i]:rising[i + 1] + 1]
        amps.append(0.5 * (float(np.max(seg)) - float(np.min(seg))))
    amplitude_a = float(np.mean(amps))
    outcome = RelayOutcome(
        amplitude_a=amplitude_a,
        period_tc=period_tc,
        critical_gain_kc=critical_gain(relay_d, amplitude_a),
        cycles_used=CYCLES_USED,
    )
    return outcome, trace


def simulate_closed_loop(
    model: FopdtModel,
    gains: PidGains,
    scenario: LoopScenario | None = None,
    cfg: SimConfig | None = None,
) -> SimTrace:
    """Closed-loop run of the non-interacting PID against a set-point step.

    Control law: u = kp*(e + (1/ti)*integral(e) + td*d(ef)/dt) with e the
    error, the integral by trapezoid, and ef the error low-pass filtered
    with time constant td/derivative_filter_n. The set-point step is treated
    as already applied when the run starts, so it produces no derivative
    kick. The disturbance is added to the plant input (ahead of the dead
    time) from disturbance_time onward. Saturation, when given, clamps the
    controller output with no anti-windup.

    Raises Diverged (with the divergence time) when any state goes
    non-finite.
    """
    scenario = scenario or LoopScenario()
    cfg = cfg or SimConfig()
    delay = _delay_samples(model, cfg)
    n = cfg.n_samples
    if scenario.disturbance_magnitude != 0.0:
        if scenario.disturbance_time >= cfg.duration:
            raise ConfigError(
                f"disturbance_time {scenario.disturbance_time:g} s is outside "
                f"the {cfg.duration:g} s run"
            )
        dist_idx = int(math.ceil(scenario.disturbance_time / cfg.dt - 1e-9))
    else:
        dist_idx = n
    sp = np.full(n, float(scenario.setpoint_step), dtype=np.float64)
    y = np.zeros(n, dtype=np.float64)
    y[0] = cfg.initial_output
    u = np.zeros(n, dtype=np.float64)
    alpha, b = _lag_coefficients(model, cfg.dt)
    u_pre = cfg.initial_output / model.gain_kp
    if gains.td > 0.0:
        beta = math.exp(-cfg.dt * scenario.derivative_filter_n / gains.td)
    else:
        beta = 0.0
    sat_lo, sat_hi = scenario.saturation or (math.nan, math.nan)
    div = _backend.pid_loop(
        sp, y, u, alpha, b, delay, u_pre, gains.kp, 1.0 / gains.ti, gains.td,
        beta, cfg.dt, scenario.disturbance_magnitude, dist_idx,
        float(sat_lo), float(sat_hi),
    )
    if div >= 0:
        t_div = div * cfg.dt
        raise Diverged(f"closed loop diverged at t = {t_div:g} s", time=t_div)
    return SimTrace(dt=cfg.dt, t0=0.0, setpoint=sp, control=u, output=y)


def compute_metrics(
    trace: SimTrace,
    band_fraction: float = 0.05,
    disturbance_time: float | None = None,
) -> Metrics:
    """Overshoot, settling time, and disturbance recovery time of a trace.

    The step segment runs from the start of the trace up to
    disturbance_time (or the whole trace without one). Its final value is
    estimated as the mean of the segment's last 10%; the step is final minus
    initial sample. Overshoot is the peak excursion past the final value as
    a percentage of the step. Settling time is the first time after which
    the output stays within +-band_fraction*|step| of the final value;
    recovery time restarts that test at disturbance_time. Times are
    reported relative to the trace start (settling) and to the disturbance
    instant (recovery); None means the band is never held.

    Raises MetricsUndefined for a zero step.
    """
    if not (0.0 < band_fraction < 1.0):
        raise InvalidArgument("band_fraction must be in (0, 1)")
    out = trace.output
    if disturbance_time is not None:
        split = int(math.ceil((disturbance_time - trace.t0) / trace.dt - 1e-9))
        if split < 2:
            raise InvalidArgument("disturbance_time leaves no step segment")
        split = min(split, len(trace))
    else:
        split = len(trace)
    seg = out[:split]
    tail = seg[-max(1, int(round(0.1 * seg.shape[0]))):]
    final = float(np.mean(tail))
    initial = float(seg[0])
    step = final - initial
    if step == 0.0:
        raise MetricsUndefined("zero step magnitude: overshoot undefined")
    peak = float(np.max(seg)) if step > 0.0 else float(np.min(seg))
    overshoot = 100.0 * (peak - final) / step
    band = band_fraction * abs(step)

    outside = np.abs(seg - final) > band
    if outside[-1]:
        settling = None
    elif not outside.any():
        settling = 0.0
    else:
        settling = float(int(np.flatnonzero(outside)[-1]) + 1) * trace.dt

    recovery = None
    if disturbance_time is not None and split < len(trace):
        post = out[split:]
        post_outside = np.abs(post - final) > band
        if not post_outside[-1]:
            if post_outside.any():
                s = int(np.flatnonzero(post_outside)[-1]) + 1
            else:
                s = 0
            recovery = trace.t0 + (split + s) * trace.dt - disturbance_time
    return Metrics(
        overshoot_percent=overshoot,
        settling_time=settling,
        recovery_time=recovery,
        peak_value=peak,
        initial_value=initial,
        final_value=final,
    )
