"""Exception taxonomy shared across the package.

Every error raised by cilkit derives from :class:`CilkitError`.  The
``exit_code`` attribute is what the CLI returns for that failure class:
2 for configuration problems, 3 for data/format problems, 4 for protocol
(call-order) violations.
"""


class CilkitError(Exception):
    exit_code = 3


class ConfigurationError(CilkitError):
    """Invalid parameters, missing files named by a config, bad CLI input."""

    exit_code = 2


class ProtocolError(CilkitError):
    """An operation was invoked out of order (e.g. observe after finalize)."""

    exit_code = 4


class FormatError(CilkitError):
    """A file does not carry the expected magic/version/header."""


class CorruptionError(CilkitError):
    """A file is structurally valid but shorter/longer than its header promises."""


class DataError(CilkitError):
    """Payload values violate an invariant (non-finite entries, unknown ids)."""


class ConsistencyError(CilkitError):
    """Two inputs that must agree (datasets vs. partition) do not."""


class ShapeError(CilkitError):
    """A vector or matrix has the wrong dimensions."""


class DegenerateInputError(CilkitError):
    """Zero-norm feature or prototype where a direction is required."""


class SingularityError(CilkitError):
    """A matrix that must be inverted is singular."""


class NumericError(CilkitError):
    """A factorization failed or produced non-finite values."""


class EvaluationError(CilkitError):
    """Evaluation requested on an empty or ill-formed sample set."""


class ParseError(CilkitError):
    """No usable records could be extracted from a model response."""

    def __init__(self, message, rejects=()):
        super().__init__(message)
        self.rejects = list(rejects)


class PipelineError(CilkitError):
    """The generation pipeline could not make progress (all jobs failed)."""
