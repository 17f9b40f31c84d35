"""Global search budgets shared by saturation, enumeration and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    max_term_size: int = 11
    max_rounds: int = 6
    arity_cap: int = 2
    max_model_size: int = 3

    def __post_init__(self):
        for name in ("max_term_size", "max_rounds", "arity_cap", "max_model_size"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def with_(self, **kw) -> "Limits":
        return replace(self, **kw)


DEFAULT_LIMITS = Limits()
