"""Relay-cache scheme without secrecy: pieces at users, XOR multicast per relay."""
from __future__ import annotations

from .coding.bits import BitBuffer
from .engine import decode, deliver, place
from .model import DeliveryTranscript, Library, PlacementResult
from .params import ParamError, SchemeKind, SchemeParams, params_baseline
from .topology import Topology

__all__ = ["params_baseline", "place_baseline", "deliver_baseline", "decode_user"]


def _require(params: SchemeParams, kind: SchemeKind) -> None:
    if params.kind is not kind:
        raise ParamError(f"expected {kind.value} parameters, got {params.kind.value}")


def place_baseline(library: Library, topology: Topology, params: SchemeParams, rng=None) -> PlacementResult:
    """Placement uses no randomness; ``rng`` is accepted for a uniform call shape."""
    _require(params, SchemeKind.BASELINE)
    return place(library, topology, params, rng)


def deliver_baseline(placement: PlacementResult, demand) -> DeliveryTranscript:
    _require(placement.params, SchemeKind.BASELINE)
    return deliver(placement, demand)


def decode_user(placement: PlacementResult, messages: dict, demand, k: int) -> BitBuffer:
    return decode(placement, messages, demand, k)
