"""Bit-exact simulator for coded caching in combination networks whose relays
and end users both have caches, with optional secure delivery and secure
caching."""
from .baseline import decode_user, deliver_baseline, place_baseline
from .engine import DecodeError, decode, decode_all, deliver, place
from .model import DeliveryTranscript, DemandError, Library, PlacementResult
from .params import ParamError, SchemeKind, SchemeParams, grid, make_params, params_baseline
from .secure import (decode_secure, deliver_secure_both, deliver_secure_caching,
                     deliver_secure_delivery, params_secure_both, params_secure_caching,
                     params_secure_delivery, place_secure_both, place_secure_caching,
                     place_secure_delivery)
from .topology import Topology, TopologyError, build_topology, index_of

__version__ = "0.1.0"

__all__ = [
    "Topology", "TopologyError", "build_topology", "index_of",
    "Library", "PlacementResult", "DeliveryTranscript", "DemandError",
    "SchemeKind", "SchemeParams", "ParamError", "make_params", "grid",
    "params_baseline", "place_baseline", "deliver_baseline", "decode_user",
    "params_secure_delivery", "params_secure_caching", "params_secure_both",
    "place_secure_delivery", "place_secure_caching", "place_secure_both",
    "deliver_secure_delivery", "deliver_secure_caching", "deliver_secure_both",
    "decode_secure", "DecodeError", "place", "deliver", "decode", "decode_all",
]
