"""Exception types shared across the package."""


class RangeError(ValueError):
    """A requested integer range is invalid or exceeds the 2**63 - 1 cap."""


class MemoryBudgetError(RuntimeError):
    """Estimated working-set size exceeds the configured memory budget."""


class CacheError(RuntimeError):
    """A binary cache file is malformed or fails its checksum."""
