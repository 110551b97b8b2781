"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input data or parameters (maps to CLI exit code 2)."""


class InfeasibleSamplingError(InputError):
    """Raised when a synthetic variant cannot be sampled for some instances."""

    def __init__(self, message: str, instance_ids: list[str]):
        super().__init__(message)
        self.instance_ids = list(instance_ids)
