"""Error taxonomy: invalid inputs vs. blown computational budgets.

The CLI maps these to distinct exit codes (2 and 3 respectively), so
library code should raise the specific class, not bare ValueError.
"""


class ValidationError(ValueError):
    """An input failed a structural or numerical precondition."""


class BudgetError(RuntimeError):
    """A requested computation exceeds its enumeration/size budget."""
