"""Exception hierarchy shared across the package."""


class SchedulerError(Exception):
    """Base class for all domain errors raised by this package."""


class InvariantViolation(SchedulerError):
    """A field or cross-field invariant of a domain type does not hold."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"invariant violated for {field!r}" + (f": {message}" if message else ""))


class DuplicateId(SchedulerError):
    def __init__(self, kind: str, value: str):
        self.kind = kind
        self.value = value
        super().__init__(f"duplicate {kind} id: {value!r}")


class NoFeasibleConfig(SchedulerError):
    def __init__(self, job_id: str):
        self.job_id = job_id
        super().__init__(f"job {job_id!r} has no feasible (technique, gpu-count) configuration")


class CapacityViolation(SchedulerError):
    """Instantaneous per-node GPU demand exceeds the node's capacity."""


class InvalidPlan(SchedulerError):
    """A plan does not cover the workload or breaks a plan invariant."""


class MissingEntry(SchedulerError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"profile table has no entry for {key}")


class InfeasibleEntry(SchedulerError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"profile table entry {key} is infeasible")


class ExecutorFailure(SchedulerError):
    def __init__(self, key, cause: Exception):
        self.key = key
        self.cause = cause
        super().__init__(f"executor failed on {key}: {cause}")


class ParseError(SchedulerError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class NegativeLatency(SchedulerError):
    def __init__(self, line_no: int, value: float):
        self.line_no = line_no
        self.value = value
        super().__init__(f"line {line_no}: latency must be positive, got {value}")


class LpInfeasible(SchedulerError):
    """The LP relaxation (under the given fixings) has no feasible point."""


class NumericalFailure(SchedulerError):
    """The simplex hit a pivot too small to trust or failed to converge."""


class HorizonOverflow(SchedulerError):
    def __init__(self, horizon: int, limit: int):
        self.horizon = horizon
        self.limit = limit
        super().__init__(f"time horizon needs {horizon} intervals, limit is {limit}")


class TooLarge(SchedulerError):
    """Instance exceeds the brute-force enumeration guard."""


class PlanFailure(SchedulerError):
    """A planner could not produce a valid plan."""


class ReplanFailure(SchedulerError):
    """A mid-run replan failed; the simulator keeps the old plan."""


class UnknownPreset(SchedulerError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown workload preset: {name!r}")


class EmitError(SchedulerError):
    """Report emission was asked to do something impossible."""


class ConfigError(SchedulerError):
    """Bad experiment/CLI configuration (exit code 2 at the CLI)."""
