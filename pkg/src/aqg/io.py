"""
Run configuration, snapshot files and NDJSON time series.

Config files are INI-style, one section per concern::

    [grid]
    n1 = 64
    n2 = 64

    [params]
    alpha = 0.3
    beta = 0.7

    [stepper]
    dt = 0.001

    [init]
    kind = random-bandlimited
    hdot_norm = 0.01

    [run]
    t_end = 5.0
    sample_every = 10

Snapshots are little-endian binary: the magic ``AQG1``, a u32 version, u32
``n1``/``n2``, f64 ``l1``/``l2``/``t``, then ``n1*n2`` f64 physical-space
values in row-major order (x2 fastest).
"""

from __future__ import annotations

import configparser
import json
import os
import struct
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import GalerkinLevel, InitialData, StepperConfig
from .spectral import DissipationParams, GridSpec, forward_transform, inverse_transform

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "write_snapshot",
    "read_snapshot",
    "NDJSONWriter",
    "read_ndjson",
    "default_output_root",
]

SNAPSHOT_MAGIC = b"AQG1"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` points into the source file when known."""

    def __init__(self, message, line=None, source="<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def default_output_root():
    return Path(os.environ.get("AQG_OUTPUT_DIR", "runs"))


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    params: DissipationParams
    stepper: StepperConfig
    init: InitialData
    t_end: float
    sample_every: int = 1
    snapshot_every: int = 0
    galerkin: GalerkinLevel = GalerkinLevel()
    seed: int = 0
    output_dir: Optional[str] = None
    ceiling_factor: float = 1e6

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.t_end / self.stepper.dt < 1 - 1e-12:
            raise ValueError("t_end / dt must be at least 1 (t_end shorter than one step)")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 0:
            raise ValueError("snapshot_every must be a nonnegative integer")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.galerkin.check(self.grid)

    @property
    def nsteps(self):
        return int(round(self.t_end / self.stepper.dt))

    def initial_field(self, s=None):
        init = self.init
        if init.seed is None:
            init = replace(init, seed=self.seed)
        return init.build(self.grid, s)


def _opt_float(v):
    return None if v.strip().lower() == "none" else float(v)


def _opt_int(v):
    return None if v.strip().lower() == "none" else int(v)


def _bool(v):
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _galerkin(v):
    return GalerkinLevel() if v.strip().lower() == "full" else GalerkinLevel(float(v))


_SCHEMA = {
    "grid": {"n1": int, "n2": int, "l1": float, "l2": float},
    "params": {"alpha": float, "beta": float, "mu": float, "nu": float},
    "stepper": {"dt": float, "scheme": str, "dealias": str, "linear_only": _bool},
    "init": {"kind": str, "amplitude": float, "k1": int, "k2": int, "seed": _opt_int, "kmin": float,
             "kmax": _opt_float, "width": float, "hdot_norm": _opt_float},
    "run": {"t_end": float, "sample_every": int, "snapshot_every": int, "galerkin": _galerkin,
            "seed": int, "output_dir": str, "ceiling_factor": float},
}
_REQUIRED = {"grid": ("n1", "n2"), "params": ("alpha", "beta"), "stepper": ("dt",),
             "init": ("kind",), "run": ("t_end",)}


def _line_index(text):
    """Map (section, key) and section names to 1-based source lines."""
    where = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            where[(section, None)] = no
        elif section is not None:
            key = line.split("=", 1)[0].split(":", 1)[0].strip().lower()
            where[(section, key)] = no
    return where


def parse_config(text, source="<config>"):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", exc.lineno, source) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r}", exc.lineno, source) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section {exc.section!r}", exc.lineno, source) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line, source) from None
    lines = _line_index(text)
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", lines.get((section, None)), source)
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lines.get((section, key)), source)
            try:
                values[(section, key)] = _SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}", lines.get((section, key)), source) from None
    for section, keys in _REQUIRED.items():
        for key in keys:
            if (section, key) not in values:
                raise ConfigError(f"missing required key {key!r} in [{section}]",
                                  lines.get((section, None)), source)

    def anchor(section, keys, message):
        # the key named in the message, else the section header
        named = [lines[(section, k)] for k in keys if k in message and (section, k) in lines]
        return min(named, default=lines.get((section, None)))

    def build(section, cls):
        kw = {k: v for (sec, k), v in values.items() if sec == section}
        try:
            return cls(**kw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), anchor(section, kw, str(exc)), source) from None

    grid = build("grid", GridSpec)
    params = build("params", DissipationParams)
    stepper = build("stepper", StepperConfig)
    init = build("init", InitialData)
    run_kw = {k: v for (sec, k), v in values.items() if sec == "run"}
    try:
        return RunConfig(grid=grid, params=params, stepper=stepper, init=init, **run_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), anchor("run", run_kw, str(exc)), source) from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, source=str(path))


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg):
    """Serialise every field; ``parse_config(dump_config(c)) == c``."""
    out = []
    for section, obj in (("grid", cfg.grid), ("params", cfg.params),
                         ("stepper", cfg.stepper), ("init", cfg.init)):
        out.append(f"[{section}]")
        for f in fields(obj):
            out.append(f"{f.name} = {_fmt(getattr(obj, f.name))}")
        out.append("")
    out.append("[run]")
    for f in fields(cfg):
        if f.name in ("grid", "params", "stepper", "init"):
            continue
        value = getattr(cfg, f.name)
        if f.name == "output_dir" and value is None:
            continue
        out.append(f"{f.name} = {value}" if f.name == "galerkin" else f"{f.name} = {_fmt(value)}")
    out.append("")
    return "\n".join(out)


def write_snapshot(path, field, t):
    """Write ``field`` (SpectralField) at time ``t`` in physical space."""
    g = field.grid
    values = np.ascontiguousarray(inverse_transform(field), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.n1, g.n2, g.l1, g.l2, float(t)))
        fh.write(values.tobytes(order="C"))


def read_snapshot(path):
    """Return ``(field, t)`` with the spectral state rebuilt from grid values."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version, n1, n2, l1, l2, t = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    payload = data[_HEADER.size:]
    if len(payload) != n1 * n2 * 8:
        raise ValueError(f"{path}: payload has {len(payload)} bytes, expected {n1 * n2 * 8}")
    grid = GridSpec(n1, n2, l1, l2)
    values = np.frombuffer(payload, dtype="<f8").reshape(n1, n2)
    return forward_transform(values, grid), t


class NDJSONWriter:
    """Append-only line-delimited JSON; each record is flushed as it is written."""

    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8")

    def write(self, record):
        self._fh.write(json.dumps(record, allow_nan=True) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_ndjson(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
