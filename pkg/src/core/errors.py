"""
Exception hierarchy shared by every module.

Each error carries the same triple everywhere:
  - reason : short CamelCase code, e.g. "UnknownUser"
  - desc   : human readable description naming the offending value
  - origin : "<module>.<operation>()" where the error was raised

The CLI prints ``error [<origin>] <reason>: <desc>`` and exits with 1.
"""

from typing import NoReturn


class BenchError(Exception):
    """Base class for all domain errors."""

    def __init__(self, reason: str, desc: str, origin: str) -> None:
        super().__init__(f"[{origin}] {reason}: {desc}")
        self.reason = reason
        self.desc = desc
        self.origin = origin


class DatasetFormatError(BenchError):
    """Malformed input file or identifier."""


class ConfigError(BenchError):
    """Invalid parameter value or configuration file."""


class AnonymizationError(BenchError):
    """An anonymizer cannot reach its post-condition."""


class UnknownUserError(BenchError):
    """User id not present on the platform or in a dataset."""


class QueryBudgetExceeded(BenchError):
    """The platform refused a call because the query budget is spent."""


class EvaluationError(BenchError):
    """Mapping and ground truth do not line up."""


def throw_exception(cls: type[BenchError], reason: str, desc: str, origin: str) -> NoReturn:
    raise cls(reason, desc, origin)
