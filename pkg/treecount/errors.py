# treecount/errors.py
from __future__ import annotations

from typing import Any


class TreecountError(Exception):
    exit_code = 1


class ParseError(TreecountError, ValueError):
    exit_code = 4

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class LoopPresent(TreecountError, ValueError):
    pass


class DegenerateTrim(TreecountError, ValueError):
    pass


class OutOfRange(TreecountError, ValueError):
    pass


class DomainError(TreecountError, ValueError):
    pass


class BudgetExceeded(TreecountError, RuntimeError):
    exit_code = 3


class ConvergenceFailure(TreecountError, RuntimeError):
    pass


class CertificationFailed(TreecountError, RuntimeError):
    exit_code = 2

    def __init__(self, message: str, certificate: Any = None, best_margin: float | None = None):
        super().__init__(message)
        self.certificate = certificate
        self.best_margin = best_margin
