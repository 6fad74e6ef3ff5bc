"""Analog op-amp PID realization: forward gain equations and component
synthesis.

The PID stage (input resistor R1 with C1, feedback R2 with C2, output divider
R3/R4) realizes parallel gains

    KI = R4 / (R3*R1*C2),    KD = KI * R2*C1,    KP = KI * (R1*C1 + R2*C2).

Two synthesis modes are shipped side by side. The half-split mode uses the
legacy formulas R1 = KP/(2*KI*C2), R2 = KP/(2*KI*C1); forward evaluation of
its output does NOT reproduce the target KP, so every synthesis result
carries a consistency report making the deviation visible. The exact mode
inverts the forward equations in closed form and is the default.

Component values are carried in SI base units (ohms, farads).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Infeasible, InvalidArgument, InvalidTarget
from .model import ParallelGains

E12_SERIES = (1.0, 1.2, 1.5, 1.8, 2.2, 2.7, 3.3, 3.9, 4.7, 5.6, 6.8, 8.2)
E24_SERIES = (1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
              3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1)
_SERIES = {"e12": E12_SERIES, "e24": E24_SERIES}


@dataclass(frozen=True)
class CircuitDesign:
    """Component set of the PID stage. r2 = 0 degenerates to a pure PI."""

    r1: float
    r2: float
    r3: float
    r4: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("r1", "r3", "r4"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidArgument(f"{name} must be positive")
        if not (math.isfinite(self.r2) and self.r2 >= 0.0):
            raise InvalidArgument("r2 must be non-negative")
        for name in ("c1", "c2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidArgument(f"{name} must be positive")


@dataclass(frozen=True)
class GainReport:
    """Forward-evaluated gains of a design next to the gains it aimed for."""

    reference: ParallelGains
    achieved: ParallelGains

    def rel_errors(self) -> dict[str, float]:
        """Per-gain relative error |achieved - reference| / |reference|."""
        out = {}
        for name in ("kp", "ki", "kd"):
            ref = getattr(self.reference, name)
            got = getattr(self.achieved, name)
            if ref == 0.0:
                out[name] = 0.0 if got == 0.0 else math.inf
            else:
                out[name] = abs(got - ref) / abs(ref)
        return out

    @property
    def max_rel_error(self) -> float:
        return max(self.rel_errors().values())

    def is_consistent(self, tol: float = 0.01) -> bool:
        return self.max_rel_error <= tol


@dataclass(frozen=True)
class SynthesisResult:
    """A component set plus the consistency report for how well it realizes
    the gains it was derived from."""

    design: CircuitDesign
    report: GainReport


def circuit_gains(design: CircuitDesign) -> ParallelGains:
    """Forward-evaluate the parallel gains realized by a component set."""
    ki = design.r4 / (design.r3 * design.r1 * design.c2)
    kd = ki * design.r2 * design.c1
    kp = ki * (design.r1 * design.c1 + design.r2 * design.c2)
    return ParallelGains(kp=kp, ki=ki, kd=kd)


def synthesize_half_split(
    target: ParallelGains, r3: float, c1: float, c2: float
) -> SynthesisResult:
    """Heuristic synthesis splitting KP evenly between the two RC products:

        r1 = kp/(2*ki*c2),  r2 = kp/(2*ki*c1),  r4 = ki*r3*r1*c2,

    so that r1*c2 = r2*c1 = kp/(2*ki). These legacy formulas do not invert
    the forward gain equations: the attached report compares
    circuit_gains(design) against the target and will flag a large KP
    mismatch. Use synthesize_exact for designs that must hit the target.
    """
    _check_synthesis_args(target, r3, c1, c2)
    r1 = target.kp / (2.0 * target.ki * c2)
    r2 = target.kp / (2.0 * target.ki * c1)
    r4 = target.ki * r3 * r1 * c2
    design = CircuitDesign(r1=r1, r2=r2, r3=r3, r4=r4, c1=c1, c2=c2)
    return SynthesisResult(design=design, report=GainReport(target, circuit_gains(design)))


def synthesize_exact(
    target: ParallelGains, r3: float, c1: float, c2: float
) -> SynthesisResult:
    """Closed-form inverse of the forward gain equations (default mode):

        r2 = kd/(ki*c1),  r1 = (kp*c1 - kd*c2)/(ki*c1^2),  r4 = ki*r3*r1*c2.

    Feasible iff kp*c1 > kd*c2 (otherwise r1 would not be positive); the
    Infeasible error reports the minimal c1 that restores feasibility.
    """
    _check_synthesis_args(target, r3, c1, c2)
    if target.kp * c1 <= target.kd * c2:
        min_c1 = target.kd * c2 / target.kp
        raise Infeasible(
            f"kp*c1 = {target.kp * c1:g} must exceed kd*c2 = {target.kd * c2:g}; "
            f"choose c1 > {min_c1:g} F",
            min_c1=min_c1,
        )
    r2 = target.kd / (target.ki * c1)
    r1 = (target.kp * c1 - target.kd * c2) / (target.ki * c1 * c1)
    r4 = target.ki * r3 * r1 * c2
    design = CircuitDesign(r1=r1, r2=r2, r3=r3, r4=r4, c1=c1, c2=c2)
    return SynthesisResult(design=design, report=GainReport(target, circuit_gains(design)))


def snap_to_series(design: CircuitDesign, series: str = "none") -> SynthesisResult:
    """Round each resistor to the nearest standard-series value.

    series is one of "e12", "e24", or "none" (capacitors are never touched;
    r2 = 0 stays 0). The attached report re-evaluates the gains of the
    snapped design against the gains of the design passed in.
    """
    key = series.strip().lower()
    before = circuit_gains(design)
    if key in ("none", ""):
        return SynthesisResult(design=design, report=GainReport(before, before))
    if key not in _SERIES:
        raise InvalidArgument(f"unknown series {series!r}; use e12, e24, or none")
    table = _SERIES[key]
    snapped = CircuitDesign(
        r1=_snap_value(design.r1, table),
        r2=_snap_value(design.r2, table),
        r3=_snap_value(design.r3, table),
        r4=_snap_value(design.r4, table),
        c1=design.c1,
        c2=design.c2,
    )
    return SynthesisResult(design=snapped, report=GainReport(before, circuit_gains(snapped)))


def _snap_value(value: float, table) -> float:
    """Nearest series value by geometric distance, decade by decade."""
    if value == 0.0:
        return 0.0
    decade = 10.0 ** math.floor(math.log10(value))
    mantissa = value / decade
    best = None
    best_dist = math.inf
    for m in list(table) + [10.0 * table[0]]:
        dist = abs(math.log(mantissa / m))
        if dist < best_dist:
            best_dist = dist
            best = m
    return best * decade


def _check_synthesis_args(target: ParallelGains, r3: float, c1: float, c2: float) -> None:
    if target.ki <= 0.0:
        raise InvalidTarget("synthesis needs ki > 0 (the stage always integrates)")
    for name, v in (("r3", r3), ("c1", c1), ("c2", c2)):
        if not (math.isfinite(v) and v > 0.0):
            raise InvalidArgument(f"{name} must be positive")


_PREFIXES = ((1e9, "G"), (1e6, "M"), (1e3, "k"), (1.0, ""),
             (1e-3, "m"), (1e-6, "u"), (1e-9, "n"), (1e-12, "p"))


def fmt_eng(value: float, unit: str) -> str:
    """Engineering notation: 46503.5 -> '46.5 kOhm', 2.2e-5 -> '22 uF'."""
    if value == 0.0:
        return f"0 {unit}"
    for scale, prefix in _PREFIXES:
        if abs(value) >= scale:
            return f"{value / scale:.4g} {prefix}{unit}"
    scale, prefix = _PREFIXES[-1]
    return f"{value / scale:.4g} {prefix}{unit}"
