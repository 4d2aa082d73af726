"""Exception hierarchy shared across the package."""


class ModelError(ValueError):
    """Base class for all modelling / numerical errors raised here."""


class InvalidDimensionError(ModelError):
    pass


class SingularSubspaceError(ModelError):
    """A matrix that must be invertible is (numerically) singular."""

    def __init__(self, msg, cond=None):
        super().__init__(msg)
        self.cond = cond


class OverdeterminedInterferenceError(ModelError):
    pass


class DegenerateGeometryError(ModelError):
    """Object steering lies inside the interference receive subspace."""


class CodeConstructionError(ModelError):
    pass


class ConfigError(ModelError):
    """Bad scenario file: parse failure or invariant violation."""

    def __init__(self, msg, key=None, line=None):
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{msg} ({', '.join(loc)})" if loc else msg)
        self.key = key
        self.line = line
