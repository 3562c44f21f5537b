"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration file or parameter set is invalid."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ParameterError(ValueError):
    """An operation was called with arguments outside its domain."""


class ProvenanceParseError(ValueError):
    """A provenance sidecar exists but cannot be decoded."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"malformed sidecar field {field!r}: {message}")
