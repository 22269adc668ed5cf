class DeaError(Exception):
    """Base class for errors raised by this package."""


class DatasetError(DeaError, ValueError):
    """Malformed or invalid DMU data."""


class ParseError(DatasetError):
    pass


class ValidationError(DatasetError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ConfigurationError(DeaError, ValueError):
    """A model cannot be set up for the given data (e.g. zero factor range)."""


class SolverError(DeaError, RuntimeError):
    """Iteration/node limits or broken internal invariants."""


class NotInTechnology(DeaError, ValueError):
    """A supplied projection point is not attainable in the technology."""
