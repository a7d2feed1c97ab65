"""Shared pass/fail result type for the verification operations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class Diagnostics:
    """Outcome of an exhaustive axiom check.

    ``failure`` names the first violated law in scan order, ``witness`` is a
    tuple of indices exhibiting the violation.  ``structural`` is set when the
    input is malformed (wrong shape, index out of range, operation defined on
    the wrong domain) as opposed to well-formed data breaking an axiom.
    """

    ok: bool
    failure: Optional[str] = None
    witness: Optional[tuple] = None
    structural: bool = False
    notes: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def passed(**notes: Any) -> "Diagnostics":
        return Diagnostics(ok=True, notes=dict(notes))

    @staticmethod
    def failed(failure: str, witness: tuple, structural: bool = False,
               **notes: Any) -> "Diagnostics":
        return Diagnostics(ok=False, failure=failure, witness=witness,
                           structural=structural, notes=dict(notes))

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok}
        if not self.ok:
            out["failure"] = self.failure
            out["witness"] = list(self.witness) if self.witness is not None else None
            out["structural"] = self.structural
        if self.notes:
            out["notes"] = self.notes
        return out


__all__ = ["Diagnostics"]
