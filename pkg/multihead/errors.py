"""Exception hierarchy for multihead."""

from __future__ import annotations


class MultiheadError(Exception):
    """Base class for every error raised by multihead."""


class ParseError(MultiheadError):
    """Malformed `.mhfa`, `.cert` or verifier text."""

    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.message, self.line)


class ArityError(MultiheadError):
    """A tuple or machine has the wrong number of heads."""


class BudgetExceeded(MultiheadError):
    """An exploration hit one of the configured caps."""

    def __init__(self, budget_name: str, limit: int):
        self.budget_name = budget_name
        self.limit = limit
        super().__init__(f"{budget_name} budget of {limit} exceeded")

    def __reduce__(self):
        # pool workers send errors back pickled
        return type(self), (self.budget_name, self.limit)


class VerifierError(MultiheadError):
    """Verifier parameters that cannot be realised."""


class CoinUnderflow(VerifierError):
    """The coin string ran out before the verifier finished."""


class InvalidPath(MultiheadError):
    """A choice sequence that is not a computational path."""


class InvalidMachine(MultiheadError):
    """A machine definition that violates the model's invariants."""


class InvalidInput(MultiheadError):
    """An input word with symbols outside the machine's alphabet."""


class AuditFailure(MultiheadError):
    """A runtime audit of the tracked-tape simulation failed."""
