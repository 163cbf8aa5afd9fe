"""Flat-sectioned key=value run configuration.

The format is INI-style for diffability in experiment logs. Unknown
sections or keys are rejected outright so typos fail fast, and a master
seed is mandatory whenever a command samples anything.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Any

from .hamiltonians import HamiltonianSpec
from .partitions import PartitionSpec, reflection_partition, three_segment_partition


class ConfigError(ValueError):
    pass


_SCHEMA: dict[str, dict[str, str]] = {
    "hamiltonian": {
        "num_sites": "int", "j": "float", "j_prime": "float", "delta": "float",
        "b_field": "float", "neel_delta": "float", "pinning": "float",
        "neel_weight": "float",
    },
    "partition": {"pairs": "int", "layout": "str"},
    "protocol": {"kind": "str", "n_unitaries": "int", "n_shots": "int"},
    "ramp": {
        "t_final": "float", "dt": "float", "neel_delta": "float",
        "exponent": "int", "sample_times": "floats", "monitor": "strs",
    },
    "sweep": {
        "kinds": "strs", "mode": "str", "repetitions": "int",
        "axis_j_prime": "floats", "axis_delta": "floats", "axis_b_field": "floats",
        "axis_pairs": "floats", "axis_n_unitaries": "floats", "axis_n_shots": "floats",
    },
    "error_scan": {"axis": "str", "values": "floats", "repetitions": "int"},
    "run": {"master_seed": "int", "out": "str", "jobs": "int"},
}

_PARSERS = {
    "int": int,
    "float": float,
    "str": str,
    "floats": lambda text: tuple(float(x) for x in text.split(",")),
    "strs": lambda text: tuple(x.strip() for x in text.split(",")),
}


@dataclass
class RunConfig:
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)
    path: str = ""

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        value = self.get(section, key)
        if value is None:
            raise ConfigError(f"missing required key {section}.{key}")
        return value

    def has_section(self, section: str) -> bool:
        return section in self.sections

    def as_dict(self) -> dict:
        return {name: dict(body) for name, body in self.sections.items()}

    # -- resolved objects ---------------------------------------------------

    def hamiltonian(self) -> HamiltonianSpec:
        body = self.sections.get("hamiltonian", {})
        if "num_sites" not in body:
            raise ConfigError("missing required key hamiltonian.num_sites")
        try:
            return HamiltonianSpec(**body)
        except ValueError as exc:
            raise ConfigError(f"hamiltonian: {exc}") from exc

    def partition(self, num_sites: int) -> PartitionSpec:
        pairs = self.require("partition", "pairs")
        layout = self.get("partition", "layout", "reflection")
        try:
            if layout == "reflection":
                return reflection_partition(num_sites, pairs)
            if layout == "three_segment":
                return three_segment_partition(num_sites, pairs)
        except ValueError as exc:
            raise ConfigError(f"partition: {exc}") from exc
        raise ConfigError(f"partition.layout must be 'reflection' or 'three_segment', got {layout!r}")

    def master_seed(self) -> int:
        return self.require("run", "master_seed")


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    sections: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]
        body: dict[str, Any] = {}
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {section}.{key}")
            try:
                body[key] = _PARSERS[allowed[key]](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from exc
        sections[section] = body
    return RunConfig(sections, str(path))
