"""Exception types shared across stataudit modules."""


class StatAuditError(Exception):
    """Base class for all package-specific errors."""


class DomainError(StatAuditError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class UndefinedCorrelationError(StatAuditError, ValueError):
    """Rank correlation is undefined (all ties in one of the vectors)."""


class DegenerateTableError(StatAuditError, ValueError):
    """A contingency table has a zero margin."""


class DegenerateDataError(StatAuditError, ValueError):
    """Input data collapses a required quantity (zero pooled SD, E=0, ...)."""


class InsufficientDataError(StatAuditError, ValueError):
    """Too few observations for the requested analysis."""


class SchemaError(StatAuditError, ValueError):
    """An input file does not conform to the documented schema."""


class UnconvertibleTestError(StatAuditError, ValueError):
    """A test lacks the inputs its effect-size conversion path needs."""


class NonFiniteEffectError(StatAuditError, ValueError):
    """The conversion ran but produced an infinite ES or variance."""
