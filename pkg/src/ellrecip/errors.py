"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a hypothesis of the construction.

    ``hypothesis`` names the violated condition in words so the CLI can
    report it verbatim.
    """

    def __init__(self, message, hypothesis=None):
        super().__init__(message)
        self.hypothesis = hypothesis or message


class LevelMismatchError(DomainError):
    pass


class LatticePointError(DomainError):
    """The torsion point lies on the period lattice, so theta vanishes there."""

    def __init__(self, message="torsion point on lattice"):
        super().__init__(message, "z must not lie on the lattice Z + Z tau")
