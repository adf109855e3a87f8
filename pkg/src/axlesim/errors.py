"""Exception hierarchy shared across the toolkit.

Two branches matter for the CLI exit-code contract: ValidationError maps to
exit code 2, NumericalError to exit code 3. I/O problems surface as OSError
and map to 4.
"""


class AxlesimError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(AxlesimError, ValueError):
    """Bad inputs: parameters, specs, configs, out-of-range lookups."""


class NumericalError(AxlesimError, RuntimeError):
    """Computation failed: divergence, exploding training, sweep failures."""


class ParameterError(ValidationError):
    """Invalid vehicle parameters (non-positive mass, length mismatch, ...)."""


class GeometryError(ValidationError):
    """Axle geometry admits no static equilibrium."""


class RoadSpecError(ValidationError):
    """Invalid road generation spec (band, Nyquist, step)."""


class PositionError(ValidationError):
    """Road height lookup outside the profile extent."""


class ConfigError(ValidationError):
    """Invalid or incomplete run configuration."""


class SamplingError(ValidationError):
    """Invalid dataset sampling spec."""


class NormalizationError(ValidationError):
    """Degenerate normalization (zero baseline component, constant target)."""


class EvaluationError(ValidationError):
    """Model evaluation undefined for the given data."""


class DivergenceError(NumericalError):
    """Simulation state exceeded the stability limit."""

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(
            f"simulation diverged at step {step} (t = {time:.6g} s): "
            f"state magnitude exceeded limit"
        )


class TrainingError(NumericalError):
    """Non-finite loss or weight update during training."""


class SweepError(NumericalError):
    """Sensitivity sweep failed at a grid point."""


class DatasetError(NumericalError):
    """Dataset generation could not complete (e.g. baseline diverged)."""
