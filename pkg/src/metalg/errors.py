"""Exception types shared across the package."""

from __future__ import annotations


class MetalgError(Exception):
    """Base class for errors raised by this package."""


class ParseError(MetalgError):
    """Malformed textual input (signature, term, distance or equation)."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EvaluationError(MetalgError):
    """A term cannot be evaluated: unbound variable or unknown symbol."""


class BoundExceeded(MetalgError):
    """A configured enumeration bound would be exceeded.

    Bounds guard combinatorial blowups (product carriers, valuation
    counts, congruence enumeration, term enumeration).  The offending
    bound is named so callers can override it deliberately.
    """

    def __init__(self, bound: str, limit, needed):
        self.bound = bound
        self.limit = limit
        self.needed = needed
        super().__init__(f"bound '{bound}' exceeded: need {needed}, limit is {limit}")


class NotACongruence(MetalgError):
    """A partition is not compatible with some operation table."""

    def __init__(self, symbol: str, args: tuple, position: int, replacement: int):
        self.symbol = symbol
        self.args = args
        self.position = position
        self.replacement = replacement
        alt = list(args)
        alt[position] = replacement
        self.alt_args = tuple(alt)
        super().__init__(
            f"not a congruence: {symbol}{args} and {symbol}{self.alt_args} "
            f"land in different blocks although the arguments are blockwise equal"
        )


class FactorizationError(MetalgError):
    """A homomorphism does not factor: kernel condition or surjectivity fails."""

    def __init__(self, message: str, witness: tuple[int, int] | None = None,
                 distances: tuple | None = None):
        self.witness = witness
        self.distances = distances
        if witness is not None:
            message = f"{message}; witness pair {witness}"
            if distances is not None:
                message = f"{message} with distances {distances[0]} vs {distances[1]}"
        super().__init__(message)


class ExtensionError(MetalgError):
    """The universal map out of a free algebra does not exist.

    Raised when the target algebra fails the well-definedness,
    homomorphism or non-expansiveness checks; this doubles as a
    refutation that the target lies in the generated prevariety.
    """
