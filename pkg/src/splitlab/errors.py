"""Exception taxonomy shared across the package."""

from __future__ import annotations


class SplitLabError(Exception):
    """Base class for all package errors."""


class ConfigError(SplitLabError):
    """Malformed or inconsistent run/model configuration."""


class UnknownModelError(SplitLabError):
    """Zoo lookup failed."""


class ModelAssumptionError(SplitLabError):
    """A diagnostic was asked to run on a model violating its hypotheses
    (wrong dimension, dim(E) < 2, not volume preserving, ...)."""


class OrbitEscapeError(SplitLabError):
    """A chart-box orbit left the chart. Records the first escaping step."""

    def __init__(self, step: int, point):
        self.step = step
        self.point = point
        super().__init__(f"orbit escaped the chart at step {step}: {point}")


class SplittingDegeneracyError(SplitLabError):
    """The joint basis [E|F] became numerically dependent along an orbit."""

    def __init__(self, orbit_index: int, cond: float):
        self.orbit_index = orbit_index
        self.cond = cond
        super().__init__(
            f"splitting degenerate at orbit index {orbit_index} (cond={cond:.3e})"
        )


class RefinementError(SplitLabError):
    """Graph-transform refinement failed to converge; carries the angle history."""

    def __init__(self, message: str, angle_history):
        self.angle_history = angle_history
        super().__init__(message)


class FrameInstabilityError(SplitLabError):
    """Projected coordinate frame dropped rank inside the requested ball."""


class StencilEscapeError(SplitLabError):
    """A finite-difference stencil left the chart domain."""


class IntegratorError(SplitLabError):
    """Flow integration failed or left the chart."""


class OracleViolationError(SplitLabError):
    """An unconditional mathematical bound was violated numerically; carries a witness."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ReportSchemaError(SplitLabError):
    """Persisted report has an unsupported schema version or shape."""
