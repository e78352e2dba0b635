"""Exception types shared across the toolkit."""


class GecError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(GecError):
    """Data violates a structural contract (spans, weights, ratios, tokens)."""


class ParseError(GecError):
    """Malformed input file; the message carries file/line context."""
