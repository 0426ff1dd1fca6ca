"""Exception types shared across the package."""


class ZmlError(Exception):
    """Base class for all package errors."""


class PoleError(ZmlError):
    """Evaluation requested exactly at (or too close to) a pole."""


class DomainError(ZmlError):
    """Argument outside the validity region of an evaluator."""


class BudgetExceeded(ZmlError):
    """A truncation length, panel count or refinement depth ran out."""


class InsufficientData(ZmlError):
    """Too few usable records for a fit."""


class DegenerateFit(ZmlError):
    """Fit abscissae carry no spread."""


class EmptyInput(ZmlError):
    """An aggregate was asked of an empty record list."""
