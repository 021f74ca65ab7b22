"""Error types shared across the package, each carrying a stable error code."""


class LPError(Exception):
    """Base class for all input and evaluation errors."""

    code = "E_ERROR"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ParseError(LPError):
    """Syntax or unsupported-construct error with source position."""

    code = "E_SYNTAX"

    def __init__(self, message, line, column, code=None):
        super().__init__(f"{line}:{column}: {message}", code)
        self.line = line
        self.column = column


class SafetyError(LPError):
    """A variable of a statement is not bound by its positive part."""

    code = "E_UNSAFE"

    def __init__(self, message, variable=None, statement=None):
        super().__init__(message)
        self.variable = variable
        self.statement = statement


class EvalError(LPError):
    """Arithmetic or comparison over a non-integer operand."""

    code = "E_EVAL"


class CapError(LPError):
    """A grounding or enumeration exceeded its configured cap."""

    code = "E_TOO_LARGE"


class ArgsError(LPError):
    """Impossible parameter combination passed to a generator."""

    code = "E_ARGS"
