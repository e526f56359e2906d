"""
Error classes for the Kunz workbench.

All engine errors derive from KunzError so callers (the CLI, the corpus
runner) can map them onto exit codes and report statuses.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional


class KunzError(Exception):
    """Base class for every error raised by the engine."""


class AmbientMismatch(KunzError, ValueError):
    """Operands live in different polynomial rings (or an index is out of range)."""


class BudgetExceeded(KunzError, RuntimeError):
    """A step or enumeration budget ran out before the computation finished."""

    def __init__(self, what: str, budget: int, used: Optional[int] = None):
        self.what = what
        self.budget = budget
        self.used = used
        msg = f"{what}: budget of {budget} exhausted"
        if used is not None:
            msg += f" after {used} steps"
        super().__init__(msg)


class NotWellDefined(KunzError, ValueError):
    """A proposed ring map sends some source relation to a nonzero residue."""

    def __init__(self, relation_index: int, message: str = ""):
        self.relation_index = relation_index
        super().__init__(message or f"relation #{relation_index} does not map to 0")


class NotArtinian(KunzError, ValueError):
    """A finite F_p-dimension was required but the staircase is unbounded."""


class IncompatibleBase(KunzError, ValueError):
    """The residue map does not commute with the base structure maps."""


class KunzViolation(KunzError, AssertionError):
    """
    omega_zero and frob_surjective disagree on a finitely presented input.

    On noetherian inputs this contradicts a theorem, so it always signals an
    engine bug; the witness dict is dumped verbatim by the CLI.
    """

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = witness or {}
        super().__init__(message)


@dataclass(frozen=True)
class Span:
    """Half-open source region, 1-based line and column."""
    line: int
    col: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class DslError(KunzError):
    """Base for DSL diagnostics; always carries a span."""

    def __init__(self, message: str, span: Optional[Span] = None):
        self.span = span
        self.bare_message = message
        prefix = f"{span}: " if span is not None else ""
        super().__init__(prefix + message)


class DslSyntaxError(DslError, ValueError):
    pass


class DslSemanticError(DslError, ValueError):
    pass


class CyclicBase(DslSemanticError):
    pass


class IllDefinedMap(DslSemanticError):
    """A declared map fails the relation check; relation_index names the culprit."""

    def __init__(self, message: str, span: Optional[Span] = None, relation_index: int = -1):
        self.relation_index = relation_index
        super().__init__(message, span)
