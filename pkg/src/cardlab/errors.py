"""Exception hierarchy shared by every cardlab module."""


class CardLabError(Exception):
    pass


class UnknownNotation(CardLabError, ValueError):
    pass


class UnsupportedGame(CardLabError, ValueError):
    pass


class IllegalAction(CardLabError, ValueError):
    def __init__(self, action, seat, game=None):
        self.action = action
        self.seat = seat
        self.game = game
        super().__init__(f"illegal action {action!r} for seat {seat}" + (f" in {game}" if game else ""))


class TerminalState(CardLabError):
    pass


class NonTerminal(CardLabError):
    pass


class BadHandSize(CardLabError, ValueError):
    pass


class BadCardCount(CardLabError, ValueError):
    pass


class DuplicateCard(CardLabError, ValueError):
    pass


class MalformedRecord(CardLabError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InsufficientPool(CardLabError):
    def __init__(self, game, requested, available):
        self.game = game
        self.shortfall = requested - available
        super().__init__(f"pool for {game} has {available} records, {requested} requested (short by {self.shortfall})")


class PolicyUnavailable(CardLabError):
    pass


class EngineError(CardLabError):
    def __init__(self, match_id, cause):
        self.match_id = match_id
        self.cause = cause
        super().__init__(f"match {match_id}: {cause!r}")


class ParseError(CardLabError, ValueError):
    pass


class UnknownAction(CardLabError, ValueError):
    pass


class SchemaMismatch(CardLabError, ValueError):
    pass


class MissingField(CardLabError, KeyError):
    def __init__(self, slot):
        self.slot = slot
        super().__init__(slot)

    def __str__(self):
        return f"missing observation field: {self.slot}"


class DivergenceDetected(CardLabError, ArithmeticError):
    pass


class EmptyResults(CardLabError, ValueError):
    pass


class TransportError(CardLabError):
    pass


class Timeout(TransportError):
    pass
