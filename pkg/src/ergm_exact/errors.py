"""Exception hierarchy shared by every module.

Each leaf class carries the process exit code the command line front end
uses when the error escapes a run.
"""
from __future__ import annotations


class ErgmError(Exception):
    exit_code = 1


class InvalidInput(ErgmError, ValueError):
    exit_code = 2


class ConfigError(ErgmError, ValueError):
    exit_code = 2

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NoMLE(ErgmError):
    """The maximum likelihood estimate does not exist for the target."""

    exit_code = 3

    def __init__(self, certificate):
        super().__init__(f"no MLE: target verdict is {certificate.verdict.value}")
        self.certificate = certificate


class CapacityExceeded(ErgmError):
    exit_code = 4


class NonConvergence(ErgmError):
    exit_code = 5

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NotSeparable(ErgmError):
    exit_code = 6


class ViolatedBound(ErgmError):
    """A checked inequality failed; indicates a bug, never expected."""

    exit_code = 7


class CertificateError(ViolatedBound):
    pass


class CacheError(ErgmError):
    exit_code = 8
