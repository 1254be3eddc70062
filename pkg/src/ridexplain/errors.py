"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class RidexplainError(Exception):
    exit_code = 1
    category = "error"


class InputError(RidexplainError, ValueError):
    exit_code = 2
    category = "input"


class ParseError(RidexplainError, ValueError):
    exit_code = 3
    category = "parse"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(RidexplainError, ValueError):
    exit_code = 4
    category = "validation"


class RoutingError(RidexplainError):
    exit_code = 5
    category = "routing"

    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)


class ConfigurationError(RidexplainError):
    exit_code = 6
    category = "configuration"


class UndefinedValueError(RidexplainError, ArithmeticError):
    exit_code = 7
    category = "undefined-value"


class VersionError(ParseError):
    exit_code = 8
    category = "version"
