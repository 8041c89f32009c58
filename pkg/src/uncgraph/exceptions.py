class GraphFormatError(ValueError):
    """Malformed or out-of-range content in a graph file."""

    def __init__(self, message, path=None, lineno=None):
        loc = ""
        if path is not None:
            loc = f"{path}"
            if lineno is not None:
                loc += f":{lineno}"
            loc += ": "
        super().__init__(loc + message)
        self.path = path
        self.lineno = lineno


class EmptyGraphError(ValueError):
    pass


class BudgetExceededError(MemoryError):
    """A sparse product would exceed the configured non-zero budget."""


class ParameterError(ValueError):
    pass
