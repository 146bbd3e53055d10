"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """A physical parameter lies outside the domain an operation accepts."""


class ConfigError(ValueError):
    """An experiment configuration file is malformed.

    ``line`` and ``field`` point at the offending entry when known.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class RangeWarning(UserWarning):
    """A model is evaluated outside the range it was fitted on."""
