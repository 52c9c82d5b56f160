"""Solver outcomes shared by the SAP, CVP and IP front ends."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from gaugesieve.linalg import QVector, fmt_rational

SCHEMA = "gauge-sieve/1"


class SolveStatus(str, Enum):
    OK = "OK"
    EMPTY = "EMPTY"
    NOT_FOUND = "NOT_FOUND"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


class BudgetExhausted(RuntimeError):
    """The pair population ran out before the sieve reached its final radius."""

    def __init__(self, message: str, stats: Optional[dict] = None):
        super().__init__(message)
        self.stats = stats or {}


@dataclass
class SolveReport:
    kind: str
    status: SolveStatus
    vector: Optional[QVector] = None
    coeffs: Optional[tuple[int, ...]] = None
    value: Optional[Fraction] = None
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    guesses: list[dict[str, Any]] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.vector is not None

    @property
    def pairs_used(self) -> int:
        return sum(g.get("pairs", 0) for g in self.guesses)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "status": self.status.value,
            "vector": None if self.vector is None else [fmt_rational(v) for v in self.vector],
            "coeffs": None if self.coeffs is None else list(self.coeffs),
            "value": None if self.value is None else {"decimal": float(self.value), "rational": fmt_rational(self.value)},
            "seed": self.seed,
            "params": self.params,
            "budget": {"pairs": self.pairs_used, "guesses": len(self.guesses)},
            "guesses": self.guesses,
        }
