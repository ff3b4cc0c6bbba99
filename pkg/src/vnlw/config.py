"""Run configuration: defaults plus a small key=value config-file format.

Every tunable that the experiments consult lives here so that a single
config file reproduces a run exactly.  The file format is one ``key = value``
pair per line, ``#`` starts a comment, keys match the dataclass fields.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class RunConfig:
    # default factor by which every one-sided "much less than" check must hold
    margin: float = 10.0

    # Gauss-Legendre order per panel and panel-refinement policy
    quad_order: int = 8
    quad_tol: float = 1e-9
    quad_max_refine: int = 10

    # trajectory time grids: geometric, this many nodes per octave
    grid_per_octave: int = 3

    # per-axis cap on the dealiased (padded) grid, by dimension
    lattice_cap_1d: int = 8192
    lattice_cap_2d: int = 512
    lattice_cap_3d: int = 128

    # cap on the number of frequency tuples the closed-form first-iterate
    # evaluator will sum over
    tuple_cap: int = 1_000_000

    # cap on total points of any padded FFT grid
    max_padded_points: int = 2**24

    # smallness factor for the Wiener-algebra series solver time horizon
    series_time_safety: float = 0.01

    seed: int = 0

    def lattice_cap(self, d: int) -> int:
        return {1: self.lattice_cap_1d, 2: self.lattice_cap_2d, 3: self.lattice_cap_3d}[d]

    def replace(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)


DEFAULT = RunConfig()

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def load_config(path: str, base: RunConfig = DEFAULT) -> RunConfig:
    """Parse a key=value config file, overriding ``base``."""
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = text.partition("=")
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                overrides[key] = _coerce(key, raw.strip())
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return base.replace(**overrides)
