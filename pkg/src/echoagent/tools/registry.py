"""Tool registry: uniform registration, invocation, and logging.

Every capability, whether a mock, a native function, or a remote model
behind the wire protocol, is registered under a descriptor and invoked
through one validated code path. Every invocation, including failed ones,
lands in an append-only log with a monotonically increasing id.
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .. import anatomy
from ..errors import ContractError, EchoAgentError, FixtureError, RegistrationError, TransportError
from .schema import FieldSpec, Schema, validate_value_map

__all__ = [
    "BACKENDS", "LAYERS", "BlobRef", "FieldSpec", "InvocationContext",
    "LogEntry", "ToolDescriptor", "ToolRegistry", "ToolResult",
]

LAYERS = ("perceptual", "operational", "functional")
BACKENDS = ("wire", "mock", "native")


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    layer: str
    input_schema: Schema
    output_schema: Schema
    applicable_anatomy: frozenset[str] = frozenset()  # empty = universal
    backend: str = "native"

    def __post_init__(self):
        if self.layer not in LAYERS:
            raise RegistrationError(f"tool {self.name!r}: unknown layer {self.layer!r}")
        if self.backend not in BACKENDS:
            raise RegistrationError(f"tool {self.name!r}: unknown backend {self.backend!r}")
        bad = sorted(a for a in self.applicable_anatomy if not anatomy.is_valid_group(a))
        if bad:
            raise RegistrationError(f"tool {self.name!r}: unknown anatomy {bad}")

    def applies_to(self, anatomy_name: str | None) -> bool:
        return not self.applicable_anatomy or anatomy_name in self.applicable_anatomy

    def output_fields(self) -> frozenset[str]:
        return frozenset(spec.name for spec in self.output_schema)


@dataclass
class BlobRef:
    """Content-addressed reference to a produced artifact (e.g. a mask)."""

    id: str
    media_type: str
    data: bytes | None = field(default=None, repr=False)
    path: str | None = None

    @classmethod
    def from_bytes(cls, data: bytes, media_type: str, path: str | None = None) -> "BlobRef":
        return cls(
            id=hashlib.sha256(data).hexdigest(),
            media_type=media_type,
            data=data,
            path=path,
        )


@dataclass
class ToolResult:
    tool_name: str
    invocation_id: str
    outputs: dict
    confidence: float
    artifacts: list[BlobRef] = field(default_factory=list)
    latency_ms: int = 0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ContractError(
                f"tool {self.tool_name}: confidence {self.confidence} outside [0, 1]"
            )


@dataclass
class InvocationContext:
    invocation_id: str
    attempts: int = 1


@dataclass(frozen=True)
class LogEntry:
    invocation_id: str
    tool_name: str
    status: str  # ok | contract_error | transport_error | fixture_error | tool_error
    attempts: int
    error: str | None = None


class ToolRegistry:
    """Insertion-ordered registry; immutable by convention after startup."""

    def __init__(self):
        self._tools: dict[str, tuple[ToolDescriptor, object]] = {}
        self._log: list[LogEntry] = []
        self._next_invocation = 1

    def register(self, descriptor: ToolDescriptor, handler) -> ToolDescriptor:
        """Handler signature: handler(inputs: dict, ctx: InvocationContext)
        -> (outputs: dict, confidence: float, artifacts: list[BlobRef])."""
        if descriptor.name in self._tools:
            raise RegistrationError(f"duplicate tool name {descriptor.name!r}")
        self._tools[descriptor.name] = (descriptor, handler)
        return descriptor

    def get(self, name: str) -> ToolDescriptor:
        try:
            return self._tools[name][0]
        except KeyError:
            raise RegistrationError(f"no tool registered under {name!r}") from None

    def list_tools(self, layer: str | None = None) -> list[ToolDescriptor]:
        listed = [desc for desc, _ in self._tools.values()]
        if layer is not None:
            listed = [d for d in listed if d.layer == layer]
        return listed

    def find(
        self, layer: str, anatomy_name: str | None, required_output: str
    ) -> tuple[ToolDescriptor | None, str | None]:
        """Match by layer, anatomy applicability, and an output field.

        Returns (descriptor, warning). With several matches the
        lexicographically-first name wins and the tie is reported as a
        warning; with none, (None, None).
        """
        matches = [
            d for d in self.list_tools(layer)
            if d.applies_to(anatomy_name) and required_output in d.output_fields()
        ]
        if not matches:
            return None, None
        matches.sort(key=lambda d: d.name)
        warning = None
        if len(matches) > 1:
            warning = (
                f"{len(matches)} tools provide {required_output!r} in layer {layer}; "
                f"picked {matches[0].name!r}"
            )
        return matches[0], warning

    @property
    def invocation_log(self) -> tuple[LogEntry, ...]:
        return tuple(self._log)

    def invoke(self, tool_name: str, inputs: dict) -> ToolResult:
        descriptor, handler = self._tools.get(tool_name, (None, None))
        if descriptor is None:
            raise RegistrationError(f"no tool registered under {tool_name!r}")
        ctx = InvocationContext(invocation_id=f"inv-{self._next_invocation:06d}")
        self._next_invocation += 1
        started = time.monotonic()
        try:
            validate_value_map(inputs, descriptor.input_schema, f"{tool_name} inputs")
            outputs, confidence, artifacts = handler(inputs, ctx)
            validate_value_map(outputs, descriptor.output_schema, f"{tool_name} outputs")
            result = ToolResult(
                tool_name=tool_name,
                invocation_id=ctx.invocation_id,
                outputs=outputs,
                confidence=float(confidence),
                artifacts=list(artifacts),
                latency_ms=int((time.monotonic() - started) * 1000),
            )
        except EchoAgentError as exc:
            self._log.append(
                LogEntry(
                    invocation_id=ctx.invocation_id,
                    tool_name=tool_name,
                    status=_status_of(exc),
                    attempts=ctx.attempts,
                    error=str(exc),
                )
            )
            raise
        self._log.append(
            LogEntry(
                invocation_id=ctx.invocation_id,
                tool_name=tool_name,
                status="ok",
                attempts=ctx.attempts,
            )
        )
        return result


def _status_of(exc: EchoAgentError) -> str:
    if isinstance(exc, ContractError):
        return "contract_error"
    if isinstance(exc, TransportError):
        return "transport_error"
    if isinstance(exc, FixtureError):
        return "fixture_error"
    return "tool_error"
