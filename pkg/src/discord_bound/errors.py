"""Exception types raised on rejected input."""


class ValidationError(ValueError):
    """Input rejected because a named invariant does not hold.

    ``invariant`` is a short machine-friendly tag such as ``"psd"`` or
    ``"completeness"``; the CLI reports it verbatim.
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class DimensionError(ValidationError):
    def __init__(self, message):
        super().__init__("dimensions", message)


class DimensionCapError(ValidationError):
    """Dilated space larger than the configured cap."""

    def __init__(self, total, cap):
        super().__init__(
            "dimension_cap",
            f"fully dilated dimension {total} exceeds cap {cap}; use fewer POVM "
            "outcomes, smaller subsystems, or raise the cap explicitly",
        )
        self.total = total
        self.cap = cap
