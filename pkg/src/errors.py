class GamnetError(Exception):
    """Base class for every error raised by the toolkit."""


class NameExhausted(GamnetError):
    pass


class InterfaceError(GamnetError):
    """Overlapping supports, shape mismatches, undecomposable interfaces."""


class RoutingError(GamnetError):
    pass


class ValidationError(GamnetError):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class ProtocolError(GamnetError):
    pass


class ParseError(GamnetError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class TypeCheckError(GamnetError):
    def __init__(self, message, term=None):
        location = f" in {term}" if term is not None else ""
        super().__init__(f"{message}{location}")
        self.term = term


class ConfigError(GamnetError):
    pass


class BudgetExceeded(GamnetError):
    pass


class EvaluationTimeout(GamnetError):
    pass


class ConnectionLost(GamnetError):
    def __init__(self, node, reason=""):
        super().__init__(f"lost connection to node {node}: {reason}")
        self.node = node
