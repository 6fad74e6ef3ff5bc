"""Relay-based PID tuning rules on the measured critical point.

All three rule sets start from the critical gain Kc and critical period Tc
measured by the relay experiment and emit time-constant PID gains with
td = ti/4. Phase margins are accepted IN DEGREES everywhere (a classic
silent-bug site: cos(50) below means cos of fifty degrees).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import InvalidArgument, InvalidPhaseMargin
from .model import PidGains

PM_RECOMMENDED_LOW = 40.0
PM_RECOMMENDED_HIGH = 70.0


class PhaseMarginWarning(UserWarning):
    """Phase margin outside the recommended 40-70 degree window."""


@dataclass(frozen=True)
class CriticalPoint:
    """Ultimate gain kc and oscillation period tc (seconds)."""

    kc: float
    tc: float

    def __post_init__(self):
        if not (math.isfinite(self.kc) and self.kc > 0.0):
            raise InvalidArgument("kc must be positive")
        if not (math.isfinite(self.tc) and self.tc > 0.0):
            raise InvalidArgument("tc must be positive")


def _warn_if_unusual(pm_deg: float) -> None:
    if not (PM_RECOMMENDED_LOW <= pm_deg <= PM_RECOMMENDED_HIGH):
        warnings.warn(
            f"phase margin {pm_deg:g} deg is outside the recommended "
            f"{PM_RECOMMENDED_LOW:g}-{PM_RECOMMENDED_HIGH:g} deg range",
            PhaseMarginWarning,
            stacklevel=3,
        )


def tune_ah(cp: CriticalPoint) -> PidGains:
    """Astrom-Hagglund rule: kp = 0.6*kc, ti = tc/2, td = ti/4."""
    kp = 0.6 * cp.kc
    ti = 0.5 * cp.tc
    return PidGains(kp=kp, ti=ti, td=0.25 * ti)


def tune_kc(cp: CriticalPoint, phase_margin_deg: float) -> PidGains:
    """Kaiser-Chiara rule with an explicit phase-margin target (degrees):

        kp = kc*cos(PM),  ti = tc*(1 + sin(PM)) / (pi*cos(PM)),  td = ti/4.

    Defined for 0 < PM < 90; outside 40-70 deg a PhaseMarginWarning is
    emitted but the gains are still returned.
    """
    if not (math.isfinite(phase_margin_deg) and 0.0 < phase_margin_deg < 90.0):
        raise InvalidPhaseMargin(
            f"phase margin must be in (0, 90) degrees, got {phase_margin_deg!r}"
        )
    _warn_if_unusual(phase_margin_deg)
    pm = math.radians(phase_margin_deg)
    c = math.cos(pm)
    kp = cp.kc * c
    ti = cp.tc * (1.0 + math.sin(pm)) / (math.pi * c)
    return PidGains(kp=kp, ti=ti, td=0.25 * ti)


def kr_extra_delay(phase_margin_deg: float, tc: float) -> float:
    """Extra transport delay for the delayed-relay run:

        (PM - 37)/360 * tc,   PM in degrees, tc the plain-relay period.

    PM below 37 deg would require a negative (unphysical) delay.
    """
    if not (math.isfinite(phase_margin_deg) and phase_margin_deg >= 37.0):
        raise InvalidPhaseMargin(
            f"phase margin must be at least 37 degrees, got {phase_margin_deg!r}"
        )
    if not (math.isfinite(tc) and tc > 0.0):
        raise InvalidArgument("tc must be positive")
    _warn_if_unusual(phase_margin_deg)
    return (phase_margin_deg - 37.0) / 360.0 * tc


def tune_kr(cp: CriticalPoint) -> PidGains:
    """Kaiser-Rajka rule on the delayed-relay critical point:
    kp = 0.8*kc, ti = 0.64*tc, td = ti/4."""
    kp = 0.8 * cp.kc
    ti = 0.64 * cp.tc
    return PidGains(kp=kp, ti=ti, td=0.25 * ti)
