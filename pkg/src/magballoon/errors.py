"""Exception hierarchy shared across the package."""


class MagballoonError(Exception):
    """Base class for all library errors."""


class PositionTooDeep(MagballoonError):
    """Field query too close to (or inside) the dipole singularity."""


class NoConvergence(MagballoonError):
    """Iterative solver failed to meet its residual target."""


class CountMismatch(MagballoonError):
    """Number of currents does not match the number of coils."""


class InactiveCoil(MagballoonError):
    """Zero torque coefficient: the requested maneuver cannot proceed."""


class SingularInertia(MagballoonError):
    """Inertia tensor is not invertible."""


class ZeroQuaternion(MagballoonError):
    """Quaternion has zero norm and cannot be renormalized."""


class InsufficientCoils(MagballoonError):
    """Requested moment lies outside the subspace spanned by the coils."""


class NonFiniteDerivative(MagballoonError):
    """State derivative evaluated to NaN or infinity."""


class EmptyTrajectory(MagballoonError):
    """No records to serialize."""


class ParseError(MagballoonError):
    """Scenario text is syntactically malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(MagballoonError):
    """Scenario content is syntactically valid but semantically wrong."""


class UnknownKey(MagballoonError):
    """Sweep or override references a key that does not exist."""
