"""Positioned diagnostics shared by the chart, IR, and C frontends."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0  # 1-based; 0 = no position
    col: int = 0

    def render(self) -> str:
        if self.line:
            return f"{self.line}:{self.col}: {self.message}"
        return self.message


class SourceError(Exception):
    """Raised by frontends on unrecoverable input; carries diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))

    @classmethod
    def at(cls, message: str, line: int = 0, col: int = 0) -> "SourceError":
        return cls([Diagnostic(message, line, col)])
