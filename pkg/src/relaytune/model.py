"""Core value types: plant model, controller gain forms, simulation traces.

All types are immutable; instances can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidGains


def _require(cond, exc, message):
    if not cond:
        raise exc(message)


@dataclass(frozen=True)
class FopdtModel:
    """First-order-plus-dead-time plant  G(s) = K / (tau*s + 1) * exp(-theta*s).

    gain_kp is the steady-state gain K (output units per input unit), tau the
    time constant in seconds, dead_time the pure transport delay theta.
    """

    gain_kp: float
    tau: float
    dead_time: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.gain_kp) and self.gain_kp != 0.0,
                 InvalidArgument, "gain_kp must be finite and nonzero")
        _require(math.isfinite(self.tau) and self.tau > 0.0,
                 InvalidArgument, "tau must be a positive time constant")
        _require(math.isfinite(self.dead_time) and self.dead_time >= 0.0,
                 InvalidArgument, "dead_time must be non-negative")

    def transfer_function(self) -> str:
        """Human-readable transfer function string."""
        s = f"G(s) = {self.gain_kp:g} / ({self.tau:g}*s + 1)"
        if self.dead_time > 0.0:
            s += f" * exp(-{self.dead_time:g}*s)"
        return s


@dataclass(frozen=True)
class PidGains:
    """Non-interacting PID in time-constant form:

        u = kp * (e + (1/ti) * integral(e) + td * d(e)/dt)

    kp dimensionless, ti and td in seconds. td = 0 expresses a PI controller.
    """

    kp: float
    ti: float
    td: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.kp) and self.kp > 0.0,
                 InvalidGains, "kp must be positive")
        _require(math.isfinite(self.ti) and self.ti > 0.0,
                 InvalidGains, "ti must be positive")
        _require(math.isfinite(self.td) and self.td >= 0.0,
                 InvalidGains, "td must be non-negative")


@dataclass(frozen=True)
class ParallelGains:
    """Parallel PID gains:  u = kp*e + ki*integral(e) + kd*d(e)/dt.

    This is the form realized by the analog circuit stage; ki is in 1/s and
    kd in seconds.
    """

    kp: float
    ki: float
    kd: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.kp) and self.kp > 0.0,
                 InvalidGains, "kp must be positive")
        _require(math.isfinite(self.ki) and self.ki >= 0.0,
                 InvalidGains, "ki must be non-negative")
        _require(math.isfinite(self.kd) and self.kd >= 0.0,
                 InvalidGains, "kd must be non-negative")


def to_parallel(gains: PidGains) -> ParallelGains:
    """Convert time-constant PID gains to parallel form.

    kp stays, ki = kp/ti, kd = kp*td.
    """
    return ParallelGains(kp=gains.kp, ki=gains.kp / gains.ti, kd=gains.kp * gains.td)


def from_parallel(g: ParallelGains) -> PidGains:
    """Convert parallel gains back to time-constant form (exact inverse).

    Raises InvalidGains when ki = 0: ti would be unbounded.
    """
    if g.ki <= 0.0:
        raise InvalidGains("ki must be positive to recover a finite ti")
    return PidGains(kp=g.kp, ti=g.kp / g.ki, td=g.kd / g.kp)


@dataclass(frozen=True)
class SimTrace:
    """Uniformly sampled closed- or open-loop run.

    Sample k sits at time t0 + k*dt. The three channels (setpoint, control,
    plant output) always have equal length >= 2. Arrays are read-only.
    """

    dt: float
    t0: float
    setpoint: np.ndarray
    control: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        _require(math.isfinite(self.dt) and self.dt > 0.0,
                 InvalidArgument, "dt must be positive")
        _require(math.isfinite(self.t0), InvalidArgument, "t0 must be finite")
        for name in ("setpoint", "control", "output"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.output.shape[0]
        _require(n >= 2, InvalidArgument, "trace needs at least 2 samples")
        _require(self.setpoint.shape[0] == n and self.control.shape[0] == n,
                 InvalidArgument, "trace channels must have equal length")

    def __len__(self) -> int:
        return self.output.shape[0]

    def times(self) -> np.ndarray:
        """Sample times t0 + k*dt."""
        return self.t0 + self.dt * np.arange(len(self), dtype=np.float64)
