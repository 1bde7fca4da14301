"""Exception types shared across the package.

The CLI maps these onto process exit codes: config problems exit 1,
data problems exit 2, numerical failures exit 3.
"""


class GraphnpError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GraphnpError):
    """Invalid run configuration or command usage."""


class DataFormatError(GraphnpError):
    """Malformed or inconsistent input data (dataset files, graph dumps)."""


class NumericalError(GraphnpError):
    """Numerical failure: diverged training, non-converged eigensolve."""
