"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so that the CLI and
JSON reports can surface the reason without parsing messages.
"""


class MicrosupportError(Exception):
    code = "error"

    def __init__(self, message="", code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionMismatch(MicrosupportError, ValueError):
    code = "dimension-mismatch"


class EmptyPolyhedronError(MicrosupportError, ValueError):
    code = "empty-polyhedron"


class NotInSetError(MicrosupportError, ValueError):
    code = "point-not-in-set"


class EstimateOnlyError(MicrosupportError):
    """Raised when an exact answer is requested from sample-only data."""

    code = "estimate-only"


class PreconditionError(MicrosupportError, ValueError):
    code = "precondition"


class ParameterError(MicrosupportError, ValueError):
    code = "parameter-inconsistency"


class NonDifferentiableError(MicrosupportError, ArithmeticError):
    code = "non-differentiable"


class UnstableError(MicrosupportError):
    code = "unstable"


class SchemaError(MicrosupportError, ValueError):
    code = "schema"
