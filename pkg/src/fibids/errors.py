"""Exception hierarchy. Each class carries a short machine-readable code."""


class FibError(Exception):
    code = "fib"


class DomainError(FibError, ValueError):
    code = "domain"


class UnsupportedCouplingError(DomainError):
    code = "coupling"


class StructuralError(FibError):
    """Band hierarchy did not have the expected shape.

    ``parent`` is the band whose children could not be isolated.
    """

    code = "structure"

    def __init__(self, message, parent=None):
        super().__init__(message)
        self.parent = parent


class ResolutionError(FibError):
    code = "resolution"

    def __init__(self, message, found=None, expected=None):
        super().__init__(message)
        self.found = found
        self.expected = expected


class ResourceError(FibError):
    code = "resource"


class ConvergenceError(FibError):
    code = "convergence"
