"""Exception types shared across the toolkit.

Everything raised on bad input derives from :class:`LatentEditError`, so
callers can catch one base class at a process boundary (the CLI does exactly
that). Subclasses also inherit the matching builtin so generic handlers keep
working.
"""


class LatentEditError(Exception):
    """Base class for all structured toolkit errors."""


class ShapeMismatchError(LatentEditError, ValueError):
    """An array does not have the shape an operation requires."""


class NonFiniteError(LatentEditError, ValueError):
    """A value that must be finite is NaN or infinite.

    ``layer`` and ``channel`` locate the first offending entry when the value
    lives in an 18x512 latent matrix; both are None for scalars.
    """

    def __init__(self, message, layer=None, channel=None):
        super().__init__(message)
        self.layer = layer
        self.channel = channel


class ConfigError(LatentEditError, ValueError):
    """A configuration value violates its documented constraint."""


class NpyFormatError(LatentEditError, ValueError):
    """A byte sequence is not a supported NPY v1.0 latent archive."""


class MapperFormatError(LatentEditError, ValueError):
    """A byte sequence is not a valid mapper weight file."""


class OptimizationError(LatentEditError, RuntimeError):
    """The optimizer hit a non-finite loss or gradient.

    ``iteration`` is the 0-based iteration index at which the failure occurred.
    """

    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class BenchmarkConstructionError(LatentEditError, RuntimeError):
    """A leakage benchmark could not be built with a leaking optimum."""
