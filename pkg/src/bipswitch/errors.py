"""Exception hierarchy shared by every module."""


class BipswitchError(Exception):
    """Base class; the CLI maps these to exit status 1."""


class OracleLimitExceeded(BipswitchError):
    pass


class InvalidMove(BipswitchError):
    pass


class DegreeMismatch(BipswitchError):
    pass


class NotGraphic(BipswitchError):
    pass


class DomainError(BipswitchError):
    pass


class CycleNotShortest(BipswitchError):
    pass


class InadmissibleFlow(BipswitchError):
    pass


class BufferInfeasible(BipswitchError):
    pass


class TooSmall(BipswitchError):
    pass


class InconsistentEncoding(BipswitchError):
    pass


class NotSingleSource(BipswitchError):
    pass


class NotPrimitive(BipswitchError):
    pass
