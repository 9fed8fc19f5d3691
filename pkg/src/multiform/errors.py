"""Exception types shared across the engine."""


class MultiformError(Exception):
    """Base class for engine errors."""


class AlgebraError(MultiformError):
    """Inconsistent use of fields, directions or generators."""


class NonDecomposable(MultiformError):
    """The variation of a 2-form could not be split into source and exact parts."""


class NonOrientable(MultiformError):
    """An equation has no jet variable that appears linearly with a unit coefficient."""


class NotHamiltonian(MultiformError):
    """No (multi)vector field solves the Hamiltonian condition for a form."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NotHamiltonianAt(NotHamiltonian):
    """A component is not Hamiltonian for the single-time structure at one direction."""

    def __init__(self, direction, message, certificate=None):
        super().__init__(message, certificate)
        self.direction = direction


class NonPolynomialSolution(MultiformError):
    """The linear system only has solutions with rational-function coefficients."""
