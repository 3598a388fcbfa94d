"""Exception hierarchy shared by the engines and the command line."""


class QlmWkbError(Exception):
    """Base class for all package errors."""


class UsageError(QlmWkbError, ValueError):
    """Bad arguments: mismatched caps, orders out of range, invalid parameters."""


class SingularLeadingTermError(QlmWkbError, ArithmeticError):
    """A series whose leading coefficient is not an invertible monomial."""


class MissingDerivativeError(QlmWkbError, ValueError):
    pass


class SingularJetError(QlmWkbError, ZeroDivisionError):
    pass


class SingularPointError(QlmWkbError, ValueError):
    """Evaluation of k^2 at a pole of the potential."""


class PathError(QlmWkbError):
    """Integration path passes through (or too close to) a turning point."""


class IntegrationError(QlmWkbError):
    def __init__(self, message, z=None):
        super().__init__(message if z is None else f"{message} (near z={z:.6g})")
        self.z = z


class FitQualityError(QlmWkbError):
    pass


class OracleError(QlmWkbError):
    pass
