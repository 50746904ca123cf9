"""Exception hierarchy shared by the library and the command line.

Every error class knows the exit code the CLI returns for it.
"""


class SexticError(Exception):
    exit_code = 1


class DomainError(SexticError):
    """Invalid input: malformed block, bad syntax, odd lattice, failed precondition."""

    exit_code = 1


class ConfigError(DomainError):
    exit_code = 1


class BoundExceeded(SexticError):
    """An enumeration would exceed a configured bound; nothing is truncated silently."""

    exit_code = 2

    def __init__(self, what: str, limit: int, prime: int | None = None):
        self.what = what
        self.limit = limit
        self.prime = prime
        where = f" (prime component {prime})" if prime is not None else ""
        super().__init__(f"{what} exceeds the configured bound {limit}{where}")


class InternalInconsistency(SexticError):
    """A computed object violates an invariant that theory guarantees."""

    exit_code = 3


class WorkBudget:
    """Cooperative work counter shared by the long enumerations of one call."""

    def __init__(self, limit: int):
        if limit <= 0:
            raise DomainError(f"work budget must be positive, got {limit}")
        self.limit = limit
        self.spent = 0

    def tick(self, amount: int = 1) -> None:
        self.spent += amount
        if self.spent > self.limit:
            raise BoundExceeded("enumeration work", self.limit)


def budget_or_default(budget: "WorkBudget | None", limit: int = 2_000_000) -> WorkBudget:
    return budget if budget is not None else WorkBudget(limit)
