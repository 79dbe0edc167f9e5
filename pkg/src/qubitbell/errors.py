"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class BellError(Exception):
    exit_code = 1


class ValidationError(BellError):
    """An input object violates one of its invariants."""

    exit_code = 2


class StructuralError(ValidationError):
    """Shapes, scenarios or indices do not fit together."""


class PreconditionError(BellError):
    """The input is valid but not in the form an operation requires."""

    exit_code = 3


class ResourceError(PreconditionError):
    """Requested problem size is above a configured guard."""


class FactorizableComponentError(PreconditionError):
    """The strongest violating component is a factorizable (stripped) term."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or []


class InternalConsistencyError(BellError):
    """A result contradicts a proven identity; indicates a bug or bad numerics."""

    exit_code = 4

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or []


class LPError(InternalConsistencyError):
    """The simplex solver failed to produce a verifiable answer."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
