class ConfigurationError(ValueError):
    """Inconsistent inputs: mismatched grids, degenerate polygons, bad config values."""


class IntegrationError(RuntimeError):
    """Raised when the flow integrator exceeds its step cap."""

    def __init__(self, message, *, t=None, steps=None, index=None):
        super().__init__(message)
        self.t = t
        self.steps = steps
        self.index = index
