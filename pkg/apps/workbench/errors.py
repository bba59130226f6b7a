"""Exception hierarchy for the workbench."""
from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """Base error with structured context."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.message = message
        self.context = dict(context or {})
        super().__init__(message)


class DomainError(WorkbenchError, ValueError):
    """Arguments outside an operation's domain (bad ids, capacities, parameters)."""


class InfeasibleInstanceError(DomainError):
    """Adversary capacities cannot serve every request."""

    def __init__(self, total_capacity: int, request_count: int):
        self.total_capacity = total_capacity
        self.request_count = request_count
        super().__init__(
            f"infeasible: total adversary capacity {total_capacity} < {request_count} requests",
            context={"total_capacity": total_capacity, "request_count": request_count},
        )


class InstanceFormatError(WorkbenchError):
    """Instance document could not be decoded."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field:
            where.append(f"field '{field}'")
        location = f" ({'; '.join(where)})" if where else ""
        super().__init__(f"{message}{location}", context={"line": line, "column": column, "field": field})


class GreedyInternalError(WorkbenchError):
    """Greedy found no unfull site; cannot happen on a feasible instance."""


class AnalysisError(WorkbenchError):
    """Response tree growth broke a structural invariant."""

    def __init__(self, message: str, root: Optional[int] = None, component: Optional[Dict[str, Any]] = None):
        self.root = root
        self.component = dict(component or {})
        super().__init__(
            f"response tree rooted at request {root}: {message}" if root is not None else message,
            context={"root": root, **self.component},
        )
