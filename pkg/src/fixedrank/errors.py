"""Exception types shared across the package."""


class NonFiniteError(ValueError):
    """A matrix contains NaN or Inf entries."""


class RankTooLargeError(ValueError):
    """A requested rank exceeds what the input supports."""


class SingularSystemError(RuntimeError):
    """A linear system that should be positive definite failed to factor."""


class FormatError(ValueError):
    """A matrix or label file is malformed."""


class BadMagicError(FormatError):
    """Binary file does not start with the expected magic bytes."""


class BadVersionError(FormatError):
    """Binary file declares an unsupported format version."""


class TruncatedFileError(FormatError):
    """Binary file ends before the declared payload is complete."""


class ParseError(FormatError):
    """Text content could not be parsed into a matrix or labels."""
