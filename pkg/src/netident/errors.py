"""Exception hierarchy shared by every module of the package."""


class NetidentError(Exception):
    """Base class for all package errors."""


class NotWeaklyConnected(NetidentError, ValueError):
    pass


class NotAcyclic(NetidentError, ValueError):
    pass


class IsSource(NetidentError, ValueError):
    pass


class UnknownNode(NetidentError, ValueError):
    pass


class ArityMismatch(NetidentError, ValueError):
    pass


class ZeroGamma(NetidentError, ValueError):
    pass


class NotSeparable(NetidentError, ValueError):
    pass


class MissingEdgeFunction(NetidentError, ValueError):
    pass


class ExtraEdgeFunction(NetidentError, ValueError):
    pass


class ZeroMemory(NetidentError, ValueError):
    pass


class TimeOutOfRange(NetidentError, ValueError):
    pass


class HorizonMismatch(NetidentError, ValueError):
    pass


class KTooSmall(NetidentError, ValueError):
    pass


class PlanTooShort(NetidentError, ValueError):
    pass


class NotCoInNeighbors(NetidentError, ValueError):
    pass


class WrongTopology(NetidentError, ValueError):
    pass


class BadNode(NetidentError, ValueError):
    pass


class NotLinearHubEdges(NetidentError, ValueError):
    pass


class MissingCommonSource(NetidentError, ValueError):
    pass


class HorizonTooShort(NetidentError, ValueError):
    pass


class TopologyMismatch(NetidentError, ValueError):
    pass


class InconsistentData(NetidentError, ValueError):
    pass


class RankDeficient(NetidentError):
    """Raised when the data leave some coefficients undetermined.

    ``directions`` lists the unresolved null-space directions, each one a
    mapping ``(edge, exponents) -> weight`` restricted to its significant
    entries. When a fit was attempted, ``fitted`` holds one member of the
    solution set and ``report`` its residual report; both are ``None`` otherwise.
    """

    def __init__(self, message, directions=()):
        super().__init__(message)
        self.directions = list(directions)
        self.fitted = None
        self.report = None

    @property
    def entries(self):
        """Sorted ``(edge, exponents)`` pairs touched by any null direction."""
        seen = set()
        for direction in self.directions:
            seen.update(direction)
        return sorted(seen)


class ParseError(NetidentError, ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
