"""Exception types raised across the package."""


class RelayTuneError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(RelayTuneError):
    """An argument or value-type invariant was violated."""


class InvalidGains(RelayTuneError):
    """Controller gains violate their invariants or cannot be converted."""


class InvalidPhaseMargin(RelayTuneError):
    """Phase margin outside the domain where the tuning rule is defined."""


class InvalidTarget(RelayTuneError):
    """Circuit synthesis target has no integral action (ki = 0)."""


class ConfigError(RelayTuneError):
    """Simulation configuration incompatible with the model or input."""


class NoLimitCycle(RelayTuneError):
    """The relay experiment did not produce a sustained, converged oscillation."""


class Diverged(RelayTuneError):
    """Closed-loop state became non-finite. Carries the divergence time."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class MetricsUndefined(RelayTuneError):
    """Step metrics are undefined (zero step magnitude)."""


class NoOverlap(RelayTuneError):
    """Response records share no usable common time interval."""


class NoStep(RelayTuneError):
    """No input step found in the response record."""


class InsufficientResponse(RelayTuneError):
    """Output never reached the levels required by the fitting method."""


class IllConditioned(RelayTuneError):
    """Fitted time constant came out non-positive."""


class Infeasible(RelayTuneError):
    """Circuit synthesis infeasible. Carries the minimal c1 that fixes it."""

    def __init__(self, message, min_c1):
        super().__init__(message)
        self.min_c1 = min_c1


class CsvFormatError(RelayTuneError):
    """Input CSV violates the file contract. Carries the offending line."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
