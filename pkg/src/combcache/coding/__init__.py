"""Coding primitives: GF(2^w) arithmetic, MDS erasure codes, ramp secret
sharing and one-time pads."""
from .bits import BitBuffer
from .gf import GF, FieldError, field
from .mds import EncodedSymbol, MDSError, mds_decode, mds_encode, mds_feasible
from .otp import Key, KeyLengthError, KeyMisuseError, KeyRegistry, KeyReuseError, keygen, otp
from .ramp import SecretSharingError, Share, ramp_feasible, ramp_reconstruct, ramp_share
from .randomness import CountingRandomness, ScriptedRandomness, draw_symbols, make_rng, spawn

__all__ = [
    "BitBuffer", "GF", "FieldError", "field",
    "EncodedSymbol", "MDSError", "mds_decode", "mds_encode", "mds_feasible",
    "Key", "KeyLengthError", "KeyMisuseError", "KeyRegistry", "KeyReuseError", "keygen", "otp",
    "SecretSharingError", "Share", "ramp_feasible", "ramp_reconstruct", "ramp_share",
    "CountingRandomness", "ScriptedRandomness", "draw_symbols", "make_rng", "spawn",
]
