"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class NontrivialGcdError(ArithmeticError):
    """Inversion hit an element sharing a factor with the modulus.

    The factor is useful in its own right, so it is carried on the exception.
    """

    def __init__(self, element: int, modulus: int, factor: int):
        super().__init__(f"gcd({element}, {modulus}) = {factor}")
        self.element = element
        self.modulus = modulus
        self.factor = factor


class ReductionFailure(ArithmeticError):
    """A short logarithm did not factor the RSA modulus."""
