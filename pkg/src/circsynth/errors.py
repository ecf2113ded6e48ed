"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems (2), model or
numerics problems (3) and circuit-synthesis problems (4).
"""


class CircSynthError(Exception):
    """Base class for all package errors."""


class ConfigError(CircSynthError):
    """Bad configuration file or CLI arguments."""


class ModelError(CircSynthError):
    """Model assembly / linear-algebra failure."""


class AssemblyError(ModelError):
    """A patched boundary row made a block singular during assembly."""


class EliminationError(ModelError):
    """The algebraic block is singular (missing or duplicate potential reference)."""


class StabilityError(ModelError):
    """A matrix required to be Hurwitz is not."""


class AmbiguousSplitError(ModelError):
    """Eigenvalues fall between the integrator and Hurwitz clusters, or the
    near-zero cluster is defective."""


class DegeneracyError(ModelError):
    """A grammian is rank deficient (loss of controllability or observability)."""

    def __init__(self, grammian: str, message: str):
        self.grammian = grammian
        super().__init__(message)


class SimulationFloorError(ModelError):
    """A concentration node reached the configured floor (log singularity)."""

    def __init__(self, time: float, node: int, value: float):
        self.time = time
        self.node = node
        self.value = value
        super().__init__(
            f"concentration hit the floor at t={time:.6g} s "
            f"(state index {node}, c={value:.6g} mol/m^3)"
        )


class SynthesisError(CircSynthError):
    """Circuit synthesis failure."""


class NotPositiveRealError(SynthesisError):
    """Synthesis attempted on a function that is not positive real."""


class UnsupportedPoleStructureError(SynthesisError):
    """Repeated or complex poles where simple real poles are required."""


class NotRCRealizableError(SynthesisError):
    """A residue or continued-fraction quotient came out non-positive."""

    def __init__(self, message: str, trace: list | None = None):
        self.trace = trace or []
        super().__init__(message)


class PassivityViolationError(SynthesisError):
    """A lumped component value came out non-positive."""
