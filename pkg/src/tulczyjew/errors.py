"""Exception hierarchy for tulczyjew."""


class TulczyjewError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(TulczyjewError, ValueError):
    pass


class AntisymmetryViolation(TulczyjewError, ValueError):
    def __init__(self, message, index=None, residual=None):
        super().__init__(message)
        self.index = index
        self.residual = residual


class JacobiViolation(TulczyjewError, ValueError):
    def __init__(self, message, index=None, residual=None):
        super().__init__(message)
        self.index = index
        self.residual = residual


class UnknownAlgebra(TulczyjewError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidGroupElement(TulczyjewError, ValueError):
    pass


class WrongSpaceTag(TulczyjewError, ValueError):
    pass


class GradientFailure(TulczyjewError, ArithmeticError):
    pass


class DegenerateLagrangian(TulczyjewError, ArithmeticError):
    pass


class NewtonDivergence(TulczyjewError, ArithmeticError):
    pass


class NonFiniteState(TulczyjewError, ArithmeticError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class MethodMismatch(TulczyjewError, ValueError):
    pass


class TooFewSamples(TulczyjewError, ValueError):
    pass


class SingularMass(TulczyjewError, ArithmeticError):
    pass


class UnknownQuantity(TulczyjewError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InsufficientData(TulczyjewError, ValueError):
    pass


class ConfigError(TulczyjewError, ValueError):
    pass
