class BudgetExceeded(RuntimeError):
    """An enumeration or materialization would exceed its configured budget."""


class CorrectionError(ValueError):
    """A single-error corrector could not produce a consistent codeword."""
