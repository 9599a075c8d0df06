class JRLimitError(Exception):
    """Base class for numerical failures reported by the toolkit."""


class NoConvergence(JRLimitError):
    pass


class OrderingViolated(JRLimitError):
    """A Newton iterate left the admissible ordering of switching times."""


class SpuriousCrossing(JRLimitError):
    """A root of the crossing system has threshold crossings it does not encode."""


class NoMinimumInInterval(JRLimitError):
    pass


class NoBracket(JRLimitError):
    pass


class StepFailure(JRLimitError):
    pass


class NoFold(JRLimitError):
    pass


class NonFinite(JRLimitError):
    pass


class StallOnSurface(JRLimitError):
    pass


class Unclassifiable(JRLimitError):
    pass
