"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class ToolkitError(Exception):
    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class InvalidArgument(ToolkitError, ValueError):
    code = "invalid-argument"


class EmptySetError(ToolkitError, ValueError):
    code = "empty-set"


class ParseError(ToolkitError, ValueError):
    code = "parse-error"

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line

    def to_dict(self):
        d = super().to_dict()
        d["line"] = self.line
        return d


class OrderError(ParseError):
    code = "order-error"


class DomainError(ParseError):
    code = "domain-error"


class OverflowError_(ToolkitError, ArithmeticError):
    """Generated value would not fit the 64-bit element type."""

    code = "overflow"


class OracleTooLarge(ToolkitError):
    code = "oracle-too-large"


class ResourceError(ToolkitError):
    code = "resource-error"
