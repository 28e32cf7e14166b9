class SubfreqError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(SubfreqError, ValueError):
    """A requested object (pattern id, net, code) exceeds its size budget."""


class DatasetFormatError(SubfreqError, ValueError):
    """Malformed dataset text; carries the offending line number."""

    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CodeSamplingError(SubfreqError, RuntimeError):
    """Rejection sampling ran out of draws before reaching the target size."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved
