from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

EQUAL = "equal"
NOT_EQUAL = "not_equal"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of an identity check.

    ``witness`` names the component that differs for ``not_equal``;
    ``reason`` explains an ``inconclusive`` outcome.
    """

    status: str
    witness: str | None = None
    reason: str | None = None
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def equal(cls, **details) -> "Verdict":
        return cls(EQUAL, details=details)

    @classmethod
    def not_equal(cls, witness: str, **details) -> "Verdict":
        return cls(NOT_EQUAL, witness=witness, details=details)

    @classmethod
    def inconclusive(cls, reason: str, **details) -> "Verdict":
        return cls(INCONCLUSIVE, reason=reason, details=details)

    @property
    def is_equal(self) -> bool:
        return self.status == EQUAL

    def __bool__(self):
        return self.is_equal

    def to_json(self) -> dict:
        out: dict[str, Any] = {"verdict": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason is not None:
            out["reason"] = self.reason
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out
