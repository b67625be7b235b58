"""Contextualized CSV: parse, resolve, load and search measurement files."""

from ._core import (
    DEFAULT_RESOURCE_BASE,
    CcsvError,
    KnowledgeBase,
    Service,
    load,
    parse_document,
    record_id,
    turtle_round_trip,
)

CcsvError.code = property(lambda self: self.args[0])
CcsvError.subject = property(lambda self: self.args[2] if len(self.args) > 2 else "")
CcsvError.__str__ = lambda self: f"[{self.args[0]}] {self.args[1]}" if len(self.args) > 1 else str(self.args)

__all__ = [
    "DEFAULT_RESOURCE_BASE",
    "CcsvError",
    "KnowledgeBase",
    "Service",
    "load",
    "parse_document",
    "record_id",
    "turtle_round_trip",
]
