"""Exception hierarchy shared by all jetclass modules."""


class JetError(ValueError):
    """Base class for invalid jet input or violated preconditions."""


class BackendMismatchError(JetError):
    """Raised when exact-rational and floating-point values meet in one computation."""


class SingularLinearPartError(JetError):
    """Raised when a diffeomorphism jet has a non-invertible linear part."""


class PreconditionError(JetError):
    """Raised when an operation is called outside its domain (wrong linear class, etc.)."""


class InsufficientOrderError(JetError):
    """Raised when a jet is too short for the requested normal-form depth."""
