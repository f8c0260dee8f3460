"""Exception types shared across the toolkit."""


class BoshError(Exception):
    """Base class for all toolkit-specific failures."""


class GPFitError(BoshError):
    """Model fitting failed (factorization not positive definite, or every
    hyperparameter restart failed to evaluate)."""

    def __init__(self, message: str, final_jitter: float | None = None):
        super().__init__(message)
        self.final_jitter = final_jitter


class IdentifiabilityError(GPFitError):
    """The data cannot separate the model's variance components."""


class GstarSamplingError(BoshError):
    """Sampling the maximum-value distribution failed (degenerate grid)."""


class AcquisitionNumericsError(BoshError):
    """A batch correlation matrix was not positive definite."""


class ObjectiveEvaluationError(BoshError):
    """An objective returned a non-finite value during optimization."""

    def __init__(self, message: str, x=None):
        super().__init__(message)
        self.x = x


class ConfigError(BoshError):
    """Experiment configuration failed validation; carries every problem found."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)
