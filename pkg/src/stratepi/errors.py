"""Exception hierarchy shared by the model, checker and CLI."""


class StratEpiError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 2


class ModelError(StratEpiError):
    """A structure, history, strategy or state is malformed."""


class InputError(StratEpiError):
    """Malformed user input (words, file contents, references)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class ConfigError(StratEpiError):
    """Evaluation settings are inconsistent with the query."""


class ResourceError(StratEpiError):
    """An enumeration would exceed the configured budget."""

    exit_code = 3

    def __init__(self, what: str, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"{what}: {count} items exceeds budget {budget}")
