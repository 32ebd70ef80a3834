"""Exception types shared across the package."""


class MbandError(Exception):
    """Base class for all mband errors."""


class InputError(MbandError, ValueError):
    """Invalid values passed to a library function (dimension mismatch,
    non-finite coordinates, out-of-range indices)."""


class ConfigError(MbandError, ValueError):
    """Inconsistent or unsupported configuration (bad band spec, caps
    exceeded, unusable CLI flags)."""


class DataError(MbandError):
    """Malformed input data files (missing cells, ragged rows, duplicates)."""
