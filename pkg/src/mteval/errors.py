"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit 1, bad
input data exits 2, anything else exits 3.
"""


class MTEvalError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(MTEvalError, ValueError):
    """Invalid configuration or arguments: unknown tokenizer, bad weights, bad flags."""


class DataError(MTEvalError, ValueError):
    """Input data is malformed or inconsistent with what was asked of it."""


class ValidationError(DataError):
    """A record fails its schema or completeness rules (e.g. missing judgment categories)."""


class NotFoundError(DataError):
    """A referenced session or sentence does not exist."""


class PrecisionUndefined(MTEvalError):
    """No n-grams of the requested order exist, so precision has denominator 0.

    Distinct from a precision whose value is 0: here the ratio itself is
    undefined.
    """

    def __init__(self, order: int):
        super().__init__(f"precision undefined at order {order}: no candidate n-grams")
        self.order = order
