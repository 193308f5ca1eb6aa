"""Exception hierarchy shared by the engine and the command line."""

from __future__ import annotations

from typing import Any


class FeqError(Exception):
    """Base class for every error raised by feqfactor."""


class InvalidInputError(FeqError, ValueError):
    """Malformed or semantically inconsistent input (CLI exit code 2)."""


class EmptyDomainError(InvalidInputError):
    """A partial instance whose joint domain is empty."""


class HypothesisError(FeqError):
    """A stated hypothesis of a construction does not hold (CLI exit code 1).

    ``hypothesis`` names the failed condition and ``witness`` carries a value
    demonstrating the failure.
    """

    def __init__(self, hypothesis: str, message: str, witness: Any = None):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis
        self.witness = witness


class NotMemberError(HypothesisError):
    def __init__(self, witness: Any):
        super().__init__("not-a-member", f"function is not in the solution class ({witness})", witness)


class EnumerationLimitError(HypothesisError):
    def __init__(self, count: int, limit: int):
        super().__init__(
            "enumeration-limit",
            f"enumeration would produce {count} quasi-inverses, limit is {limit}",
            count,
        )
        self.count = count
        self.limit = limit


class InternalInvariantError(AssertionError):
    """A property guaranteed by construction was violated; always a bug."""
