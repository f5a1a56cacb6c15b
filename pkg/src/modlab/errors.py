"""Error types shared across the lab."""


class ModlabError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ModlabError, ValueError):
    """A parameter is out of its documented range; message names the field."""


class GeometryError(ModlabError, ValueError):
    """Geometric precondition violated (grid coverage, ball containment, ...)."""


class DomainError(ModlabError, ValueError):
    """Operation undefined for the given input (empty mask, empty source, ...)."""


class FormatError(ModlabError, ValueError):
    """Malformed file; message includes the byte offset where parsing failed."""


class NumericError(ModlabError, RuntimeError):
    """A numerical procedure failed to converge or degenerated."""
