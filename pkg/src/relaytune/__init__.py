"""Relay-feedback PID auto-tuning toolkit.

Identifies FOPDT plant models from logged step responses, measures the
critical point with a simulated relay-feedback experiment, tunes PID
controllers with the Astrom-Hagglund, Kaiser-Chiara, and Kaiser-Rajka rule
sets, verifies them in closed-loop simulation, and synthesizes component
values for an analog op-amp PID realization.

The hot simulation loops run on a compiled extension when it is built, with
a pure-Python twin selected automatically at import (see relaytune._backend).
"""

from ._backend import BACKEND, available_backends
from .circuit import (
    CircuitDesign,
    GainReport,
    SynthesisResult,
    circuit_gains,
    snap_to_series,
    synthesize_exact,
    synthesize_half_split,
)
from .errors import (
    ConfigError,
    CsvFormatError,
    Diverged,
    IllConditioned,
    Infeasible,
    InsufficientResponse,
    InvalidArgument,
    InvalidGains,
    InvalidPhaseMargin,
    InvalidTarget,
    MetricsUndefined,
    NoLimitCycle,
    NoOverlap,
    NoStep,
    RelayTuneError,
)
from .ident import ResponseRecord, average_records, estimate_gain, identify_fopdt
from .model import (
    FopdtModel,
    ParallelGains,
    PidGains,
    SimTrace,
    from_parallel,
    to_parallel,
)
from .sim import (
    LoopScenario,
    Metrics,
    RelayOutcome,
    SimConfig,
    compute_metrics,
    critical_gain,
    relay_experiment,
    simulate_closed_loop,
    simulate_open_loop,
)
from .tuning import (
    CriticalPoint,
    PhaseMarginWarning,
    kr_extra_delay,
    tune_ah,
    tune_kc,
    tune_kr,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "CircuitDesign",
    "GainReport",
    "SynthesisResult",
    "circuit_gains",
    "snap_to_series",
    "synthesize_exact",
    "synthesize_half_split",
    "ConfigError",
    "CsvFormatError",
    "Diverged",
    "IllConditioned",
    "Infeasible",
    "InsufficientResponse",
    "InvalidArgument",
    "InvalidGains",
    "InvalidPhaseMargin",
    "InvalidTarget",
    "MetricsUndefined",
    "NoLimitCycle",
    "NoOverlap",
    "NoStep",
    "RelayTuneError",
    "ResponseRecord",
    "average_records",
    "estimate_gain",
    "identify_fopdt",
    "FopdtModel",
    "ParallelGains",
    "PidGains",
    "SimTrace",
    "from_parallel",
    "to_parallel",
    "LoopScenario",
    "Metrics",
    "RelayOutcome",
    "SimConfig",
    "compute_metrics",
    "critical_gain",
    "relay_experiment",
    "simulate_closed_loop",
    "simulate_open_loop",
    "CriticalPoint",
    "PhaseMarginWarning",
    "kr_extra_delay",
    "tune_ah",
    "tune_kc",
    "tune_kr",
    "__version__",
]
