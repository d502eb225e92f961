"""Exception types shared by the config parsers and the scenario runner."""

from __future__ import annotations


class ConfigError(ValueError):
    """Base class for invalid airframe or scenario descriptions.

    ``code`` is a stable machine-readable tag, ``key`` the dotted path of the
    offending entry (``None`` when the problem is not tied to one key).
    """

    code = "config_error"

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key

    def to_dict(self) -> dict:
        return {"code": self.code, "key": self.key, "message": str(self)}


class ConfigSyntaxError(ConfigError):
    code = "syntax_error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {**super().to_dict(), "line": self.line, "column": self.column}


class UnknownKeyError(ConfigError):
    code = "unknown_key"


class ConstraintError(ConfigError):
    code = "constraint_violation"


class CapacityError(ValueError):
    """Raised when an analysis would exceed its enumeration bound."""


class ScenarioFault(RuntimeError):
    """A terminal condition inside the simulation loop (crash, approach timeout)."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
