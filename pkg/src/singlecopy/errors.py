"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit failures."""


class ModelError(ToolkitError, ValueError):
    """Invalid coupling table, preset parameters, or matrix input."""


class SymbolSingularError(ToolkitError):
    """Dispersion vanishes at the requested angle (candidate Fermi point)."""

    def __init__(self, k: float):
        super().__init__(f"symbol singular at k={k!r}")
        self.k = k


class DegenerateDispersionError(ToolkitError):
    """Dispersion vanishes on a whole interval; the symbol is undefined."""


class CoefficientAccuracyError(ToolkitError):
    """Fourier-coefficient quadrature missed its tolerance within budget."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class DecompositionError(ToolkitError):
    """A matrix factorization failed or left a large residual."""


class InvalidSpectrumError(ToolkitError, ValueError):
    """Probability spectrum is unsorted, unnormalized, or out of range."""


class DegenerateGroundStateError(ToolkitError):
    """Many-body ground state is numerically degenerate; comparison refused."""


class SolverError(ToolkitError):
    """Linear program failed to converge to a verified optimum."""
