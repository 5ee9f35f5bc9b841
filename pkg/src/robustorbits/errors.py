"""Exceptions shared across the package."""


class ContractError(ValueError):
    """An input violates an operation's documented precondition."""


class DimensionGuardError(RuntimeError):
    """Exact enumeration was refused because the dimension exceeds the guard."""

    def __init__(self, dim: int, limit: int):
        super().__init__(
            f"exact enumeration in dimension {dim} exceeds the guard {limit}; "
            "raise --max-enum-dim or ROBUSTORBITS_MAX_ENUM_DIM to allow it")
        self.dim = dim
        self.limit = limit
