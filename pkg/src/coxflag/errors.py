"""Exception hierarchy shared by every module."""


class CoxflagError(Exception):
    """Base class for all library errors."""


class ParseError(CoxflagError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class InvalidLetter(CoxflagError):
    pass


class SingletonLetter(CoxflagError):
    pass


class NotReduced(CoxflagError):
    pass


class NotReducedConcat(CoxflagError):
    pass


class NotDivisible(CoxflagError):
    pass


class UnsupportedShape(CoxflagError):
    pass


class NotAReduct(CoxflagError):
    pass


class UnknownChamber(CoxflagError):
    pass


class SizeCapExceeded(CoxflagError):
    pass


class NotQuasiBuilding(CoxflagError):
    pass


class EmptySeed(CoxflagError):
    pass


class BadSchedule(CoxflagError):
    pass


class Disconnected(CoxflagError):
    pass


class NotAGammaSpace(CoxflagError):
    pass


class NotEquivalent(CoxflagError):
    pass


class NoPath(CoxflagError):
    pass


class NotAPermutation(CoxflagError):
    pass


class BudgetExceeded(CoxflagError):
    pass


class NotAFlag(CoxflagError):
    pass


class NotSimplyConnected(CoxflagError):
    pass


class NotNice(CoxflagError):
    pass


class NoEdges(CoxflagError):
    pass
