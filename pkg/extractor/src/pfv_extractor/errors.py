"""Error taxonomy with process exit codes.

Exit codes match the feature-file toolkit's CLI convention: 2 for
configuration and usage problems, 3 for I/O, 4 for runtime failures.
"""


class ExtractorError(Exception):
    """Base class for every error this package raises deliberately."""

    exit_code = 4


class ConfigurationError(ExtractorError):
    """A parameter or backbone tag is outside its documented domain."""

    exit_code = 2


class ManifestError(ExtractorError):
    """The image manifest is malformed or names a missing image."""

    exit_code = 2


class JobError(ExtractorError):
    """An extraction job could not produce a single output record."""

    exit_code = 4
