"""Exception hierarchy shared by every layer of the package."""


class InsideOutError(Exception):
    """Base class for all package errors."""


class TooLarge(InsideOutError):
    """A configured enumeration budget would be exceeded."""


class UnboundedPolytope(InsideOutError):
    pass


class DegeneratePolytope(InsideOutError):
    """The polytope lies in a coordinate hyperplane."""


class NoStrongLabelling(InsideOutError):
    """The subspace lies inside a forbidden hyperplane x_i = x_j."""


class InfeasibleSystem(InsideOutError):
    pass


class NotTransverse(InsideOutError):
    pass


class NotConstantWeight(InsideOutError):
    """Möbius-sum formulas need forms of constant weight."""


class NoConsistentPeriod(InsideOutError):
    pass


class InsufficientData(InsideOutError):
    pass


class SchemaError(InsideOutError):
    """A problem document failed validation; ``location`` points at the bad node."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
