"""Exception hierarchy shared across the package."""


class EchoAgentError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EchoAgentError):
    """Invalid, out-of-range, or unknown configuration values."""


class IngestError(EchoAgentError):
    """Corpus document could not be read or decoded."""


class EncoderError(EchoAgentError):
    """Text could not be embedded (e.g. no tokens, zero vector)."""


class TransportError(EchoAgentError):
    """A remote backend was unreachable or kept failing after retries."""

    def __init__(self, message: str, backend: str = "", attempts: int = 0):
        super().__init__(message)
        self.backend = backend
        self.attempts = attempts


class ContractError(EchoAgentError):
    """A value violated a declared schema or interface contract."""


class TaxonomyError(EchoAgentError):
    """A view name outside the loaded view taxonomy."""


class RegistrationError(EchoAgentError):
    """Tool registration conflict (duplicate name, malformed descriptor)."""


class FixtureError(EchoAgentError):
    """A mock backend could not find or read its fixture."""


class PgmFormatError(EchoAgentError):
    """Malformed or unsupported PGM payload."""


class IndexLoadError(EchoAgentError):
    """A persisted knowledge index failed validation on load."""


class GeometryError(EchoAgentError):
    """Mask region unusable for geometric measurement."""


class VolumeError(EchoAgentError):
    """Biplane volume could not be computed from the given views."""


class DomainError(EchoAgentError):
    """Numeric input outside a function's mathematical domain."""


class GraphError(EchoAgentError):
    """Evidence-graph structural invariant violated."""


class ResolutionError(EchoAgentError):
    """Query could not be resolved to any anatomy repository entry."""

    def __init__(self, message: str, nearest: tuple[str, ...] = ()):
        super().__init__(message)
        self.nearest = nearest


class PlanningError(EchoAgentError):
    """A repository entry demands a capability no registered tool provides."""


class DatasetError(EchoAgentError):
    """Benchmark dataset directory malformed or internally inconsistent."""


class MetricError(EchoAgentError):
    """Metric undefined for the given inputs."""
