"""Exception types shared across the package."""


class EikcritError(Exception):
    """Base class for all package errors."""


class EvaluationDomainError(EikcritError):
    """A Hamiltonian or data function produced a non-finite value."""


class PreconditionError(EikcritError):
    """An operation was called with inputs violating its contract."""


class ComplexSpectrumError(EikcritError):
    """The linearization has complex eigenvalues; saddle machinery refuses."""


class AmbiguousSpectrumError(EikcritError):
    """Repeated eigenvalues (a = b); plane classification is not unique."""

    def __init__(self, msg="repeated eigenvalues: use classify_second_order for jet candidates"):
        super().__init__(msg)


class IntegrationError(EikcritError):
    """Step-size underflow or trajectory escape during flow integration."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class StripError(EikcritError):
    """Root finding for the strip-completion function failed."""


class CharacteristicDataError(EikcritError):
    """Transversality failure along a characteristic strip."""


class ReconstructionError(EikcritError):
    """Surface is not projectable; z cannot be reconstructed."""


class IngestionError(EikcritError):
    """Invalid intensity data in shape-from-shading ingestion."""


class ConfigError(EikcritError):
    """Experiment configuration failed validation."""
