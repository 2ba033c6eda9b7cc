"""flowcheck: a mini-ML type checker that explains type errors as data flows."""

from .checker import CheckOutcome, check_files, check_programs

__version__ = "0.1.0"

__all__ = ["CheckOutcome", "check_files", "check_programs", "__version__"]
