"""Exceptions shared across modules."""


class BudgetExceeded(RuntimeError):
    """The requested computation exceeds the caller's cost limit."""
