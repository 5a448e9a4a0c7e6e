"""Domain exceptions shared by the lab modules"""


class LabError(Exception):
    """Base class for every error raised by the lab"""


class ConfigError(LabError, ValueError):
    """Invalid graph, schedule, parameters or run configuration"""


class ScheduleError(ConfigError):
    """Special-vertex schedule violates H(1) >= 1 or H(k+1) >= H(k) + 1"""

    def __init__(self, message: str, k: int | None = None):
        super().__init__(message)
        self.k = k


class InvariantViolation(LabError):
    """A runtime invariant of the walk failed"""


class PersistenceError(LabError, OSError):
    """Output could not be written or input could not be read"""
