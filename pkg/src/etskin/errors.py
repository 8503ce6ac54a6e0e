"""Exception types raised across the package."""


class KinematicsError(Exception):
    """Base class for every error raised by etskin."""


class NotSkewSymmetric(KinematicsError, ValueError):
    pass


class NotAugmentedSkew(KinematicsError, ValueError):
    pass


class InvalidPose(KinematicsError, ValueError):
    pass


class JointIndexOutOfRange(KinematicsError, IndexError):
    pass


class DimensionMismatch(KinematicsError, ValueError):
    pass


class InvalidLinkRange(KinematicsError, ValueError):
    pass


class InvalidModel(KinematicsError, ValueError):
    pass


class UnknownModel(KinematicsError, LookupError):
    pass


class NotAJoint(KinematicsError, ValueError):
    pass


class FrameMismatch(KinematicsError, ValueError):
    pass


class SingularJacobian(KinematicsError, ArithmeticError):
    pass


class SingularNormalMatrix(KinematicsError, ArithmeticError):
    pass


class NumericalFailure(KinematicsError, ArithmeticError):
    pass


class ETSSyntaxError(KinematicsError, ValueError):
    """Malformed model text. ``position`` is the 0-based character offset."""

    def __init__(self, message, position=None, text=None):
        self.message = message
        self.position = position
        self.text = text
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")


class UnknownTransform(ETSSyntaxError):
    pass


class DuplicateJoint(ETSSyntaxError):
    pass


class NonMonotonicJoint(ETSSyntaxError):
    pass


class BadNumber(ETSSyntaxError):
    pass


class ModelIOError(KinematicsError, OSError):
    pass
