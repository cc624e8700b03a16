"""Enumeration budget shared by the jet-counting and exponential-sum modules."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 10**8
ENV_VAR = "LCTLAB_BUDGET"


class BudgetExceededError(RuntimeError):
    """Raised when an exact enumeration would exceed the configured budget."""

    def __init__(self, needed: int, budget: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {needed} points, budget is {budget}")
        self.needed = needed
        self.budget = budget


def resolve_budget(budget=None) -> int:
    """Explicit argument wins, then the LCTLAB_BUDGET env var, then the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_BUDGET


def check_budget(needed: int, budget=None, what: str = "enumeration") -> int:
    limit = resolve_budget(budget)
    if needed > limit:
        raise BudgetExceededError(needed, limit, what)
    return limit
