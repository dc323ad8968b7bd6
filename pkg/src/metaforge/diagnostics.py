"""Located diagnostics and the shared parse-result shape for both codecs."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Metamodel


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int | None = None
    column: int | None = None
    severity: str = "warning"

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"line {self.line}"
            if self.column is not None:
                where += f", column {self.column}"
            where += ": "
        return f"{where}{self.message}"


@dataclass(frozen=True)
class ParseResult:
    """A parsed metamodel plus the non-fatal diagnostics collected on the way."""

    metamodel: Metamodel
    warnings: tuple[Diagnostic, ...] = ()

    def warning_messages(self) -> tuple[str, ...]:
        return tuple(str(w) for w in self.warnings)


class SyntaxDiagnosticError(ValueError):
    """Hard parse failure; carries the located diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))

    @property
    def line(self) -> int | None:
        return self.diagnostic.line

    @property
    def column(self) -> int | None:
        return self.diagnostic.column
