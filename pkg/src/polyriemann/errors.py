"""Exception types raised by the solver modules."""


class PolyRiemannError(Exception):
    """Base class for all library errors."""


class DegenerateState(PolyRiemannError):
    pass


class NoRoot(PolyRiemannError):
    pass


class SpeedMismatch(PolyRiemannError):
    pass


class NoIntersection(PolyRiemannError):
    pass


class StalledAtApex(PolyRiemannError):
    pass


class NotAContact(PolyRiemannError):
    pass


class WrongRegion(PolyRiemannError):
    pass


class Inconclusive(PolyRiemannError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoAdmissibleSolution(PolyRiemannError):
    pass


class AmbiguousSolution(PolyRiemannError):
    pass


class UnsupportedModel(PolyRiemannError):
    pass


class PreconditionViolated(PolyRiemannError):
    pass


class RootCountMismatch(PolyRiemannError):
    pass


class NoConnection(PolyRiemannError):
    def __init__(self, message, mismatch_lo=None, mismatch_hi=None):
        super().__init__(message)
        self.mismatch_lo = mismatch_lo
        self.mismatch_hi = mismatch_hi
