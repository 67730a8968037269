"""Experiment configuration and its file formats.

Config files are JSON objects or TOML tables with the same keys as
:class:`ExperimentConfig`; ``N`` and ``M`` may be written as ``"5/2"``.
Unknown keys are rejected.
"""
from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..params import SchemeKind
from ..topology import TopologyError, build_topology

DEFAULT_SEED = 20240611
DEMAND_POLICIES = ("distinct", "random", "explicit")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    h: int
    r: int
    D: int
    scheme: SchemeKind = SchemeKind.BASELINE
    N: Fraction = Fraction(0)
    t1: int = 0
    t2: int | None = None            # also ``t`` for the shared-cache schemes
    M: Fraction | None = None        # memory budget; picks the best grid point when t2 is absent
    demand: str = "distinct"
    demands: tuple = ()              # explicit demand vectors
    n_random: int = 0                # extra uniform-random demands on top of the policy
    seed: int | str = DEFAULT_SEED   # "random" draws fresh entropy
    F_multiplier: int = 1
    width: int | None = None
    audit: bool = False
    csv: str | None = None
    dat: str | None = None
    svg: str | None = None
    dump: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeKind(self.scheme))
        object.__setattr__(self, "N", Fraction(self.N))
        if self.M is not None:
            object.__setattr__(self, "M", Fraction(self.M))
        object.__setattr__(self, "demands", tuple(tuple(int(x) for x in d) for d in self.demands))

    def validate(self) -> "ExperimentConfig":
        """Check everything that can be checked without building the instance."""
        try:
            topo = build_topology(self.h, self.r)
        except TopologyError as exc:
            raise ConfigError(str(exc)) from exc
        if self.demand not in DEMAND_POLICIES:
            raise ConfigError(f"demand policy must be one of {DEMAND_POLICIES}, got {self.demand!r}")
        if self.demand == "explicit" and not self.demands:
            raise ConfigError("explicit demand policy needs at least one demand vector")
        if self.F_multiplier < 1:
            raise ConfigError("F_multiplier must be a positive integer")
        if self.n_random < 0:
            raise ConfigError("n_random must be non-negative")
        if self.t2 is None and self.M is None:
            raise ConfigError("give a grid point (t1, t2 or t) or a memory budget M")
        if not (isinstance(self.seed, int) or self.seed == "random"):
            raise ConfigError(f"seed must be an integer or 'random', got {self.seed!r}")
        if self.D < topo.K:
            raise ConfigError(f"need K <= D, got K={topo.K}, D={self.D}")
        for d in self.demands:
            if len(d) != topo.K or not all(1 <= x <= self.D for x in d):
                raise ConfigError(f"demand {d} is not a vector of {topo.K} file indexes in 1..{self.D}")
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scheme"] = self.scheme.value
        out["N"] = str(self.N)
        out["M"] = None if self.M is None else str(self.M)
        out["demands"] = [list(d) for d in self.demands]
        return out

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


_FIELDS = {f.name for f in fields(ExperimentConfig)}


def config_from_mapping(data: dict) -> ExperimentConfig:
    data = dict(data)
    if "t" in data:
        if data.get("t2") is not None:
            raise ConfigError("give t or t2, not both")
        data["t2"] = data.pop("t")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"h", "r", "D"} - set(data)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    try:
        return ExperimentConfig(**data)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> dict:
    """Raw mapping from a .json or .toml file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        if path.suffix == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

