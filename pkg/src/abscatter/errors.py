"""Exception and warning types shared across the package."""


class AbScatterError(Exception):
    """Base class for all abscatter errors."""


class DomainError(AbScatterError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class PrecisionError(AbScatterError):
    """Requested evaluation cannot meet the declared accuracy budget."""


class ResolutionError(AbScatterError):
    """A sampled object is too coarse for the requested operation."""


class SamplingError(AbScatterError):
    """Adaptive sampling failed to resolve the data within its refinement cap."""


class DataInconsistencyError(AbScatterError):
    """Data that should encode a single discrete invariant disagrees internally."""


class IntegerFluxError(AbScatterError):
    """The scattering data is degenerate: flux is an integer and cannot be pinned down."""


class TooSingularError(AbScatterError):
    """A kernel perturbation is too singular for the strip-integral estimator."""


class SchemaError(AbScatterError, ValueError):
    """A configuration file or CLI argument violates the declared schema."""


class FluxConvergenceWarning(UserWarning):
    """Circulation values over the supplied radii have not settled."""


class UndersampledSinogramWarning(UserWarning):
    """Sinogram resolution is low for the requested reconstruction grid."""
