"""The three secrecy variants.

Secure delivery pads every multicast sub-signal with a key K^j_S shared by
the members of S and every relay top-up with a key K^j_rho shared by the relay
and one user.  Secure caching replaces pieces by ramp shares so that a user's
cache holds too few shares of any file to learn anything about it.  Secure
both combines the two.
"""
from __future__ import annotations

from .coding.bits import BitBuffer
from .engine import decode, deliver, place
from .model import DeliveryTranscript, Library, PlacementResult
from .params import (ParamError, SchemeKind, SchemeParams, params_secure_both,
                     params_secure_caching, params_secure_delivery)
from .topology import Topology

__all__ = [
    "params_secure_delivery", "params_secure_caching", "params_secure_both",
    "place_secure_delivery", "place_secure_caching", "place_secure_both",
    "deliver_secure_delivery", "deliver_secure_caching", "deliver_secure_both",
    "decode_secure",
]


def _require(params: SchemeParams, kind: SchemeKind) -> None:
    if params.kind is not kind:
        raise ParamError(f"expected {kind.value} parameters, got {params.kind.value}")


def place_secure_delivery(library: Library, topology: Topology, params: SchemeParams, rng) -> PlacementResult:
    _require(params, SchemeKind.SECURE_DELIVERY)
    return place(library, topology, params, rng)


def place_secure_caching(library: Library, topology: Topology, params: SchemeParams, rng) -> PlacementResult:
    _require(params, SchemeKind.SECURE_CACHING)
    return place(library, topology, params, rng)


def place_secure_both(library: Library, topology: Topology, params: SchemeParams, rng) -> PlacementResult:
    _require(params, SchemeKind.SECURE_BOTH)
    return place(library, topology, params, rng)


def deliver_secure_delivery(placement: PlacementResult, demand) -> DeliveryTranscript:
    _require(placement.params, SchemeKind.SECURE_DELIVERY)
    return deliver(placement, demand)


def deliver_secure_caching(placement: PlacementResult, demand) -> DeliveryTranscript:
    _require(placement.params, SchemeKind.SECURE_CACHING)
    return deliver(placement, demand)


def deliver_secure_both(placement: PlacementResult, demand) -> DeliveryTranscript:
    _require(placement.params, SchemeKind.SECURE_BOTH)
    return deliver(placement, demand)


def decode_secure(placement: PlacementResult, messages: dict, demand, k: int, kind=None) -> BitBuffer:
    if kind is not None and SchemeKind(kind) is not placement.params.kind:
        raise ParamError(f"decoder for {SchemeKind(kind).value} given a {placement.params.kind.value} placement")
    return decode(placement, messages, demand, k)
