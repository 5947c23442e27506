"""Exception types shared across the package."""


class YlabError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(YlabError):
    """Invalid experiment or solver configuration."""


class NumericalError(YlabError):
    """A computation failed (NaN appearance, CFL guard exhausted, ...)."""


class FieldFormatError(YlabError):
    """A field snapshot file is malformed or truncated.

    ``offset`` is the byte offset at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
