"""Exception types raised across the package."""


class FgNanoplateError(Exception):
    """Base class for all package errors."""


class KnotVectorError(FgNanoplateError, ValueError):
    pass


class DomainError(FgNanoplateError, ValueError):
    """A parameter or coordinate lies outside its admissible range."""


class UnsupportedOrderError(FgNanoplateError, ValueError):
    pass


class InsufficientControlPointsError(FgNanoplateError, ValueError):
    pass


class DegenerateGeometryError(FgNanoplateError, ArithmeticError):
    """Non-positive or singular geometry jacobian."""


class MaterialError(FgNanoplateError, ValueError):
    pass


class QuadratureWarning(UserWarning):
    """Through-thickness quadrature did not reach the requested accuracy."""


class AssemblyError(FgNanoplateError, RuntimeError):
    pass


class OverConstrainedError(FgNanoplateError, ValueError):
    pass


class FormulationError(FgNanoplateError, ArithmeticError):
    """The eigenproblem matrices violate the definiteness the solver relies on."""


class SolverError(FgNanoplateError, RuntimeError):
    pass


class DegenerateParameterError(FgNanoplateError, ArithmeticError):
    pass


class ConfigError(FgNanoplateError, ValueError):
    pass
