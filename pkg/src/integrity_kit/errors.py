"""Exception types shared across the toolkit."""


class IntegrityKitError(Exception):
    pass


class ConfigError(IntegrityKitError, ValueError):
    """A schema, rule set or pipeline config references something that does not exist."""


class DataError(IntegrityKitError, ValueError):
    """Input data cannot be parsed or is inconsistent."""


class DimensionMismatch(DataError):
    pass
