"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates an operation's precondition (bad tag, bad shape, bad domain)."""


class ResourceLimitError(RuntimeError):
    """A requested grid or search exceeds the configured size cap."""


class ConsistencyError(RuntimeError):
    """An internal identity that must hold exactly did not (signals a bug)."""
