class BudgetError(RuntimeError):
    """An exhaustive computation would exceed its size budget."""
