"""Run configuration files and the binary snapshot format.

Config files are flat ``key = value`` lines under ``[section]`` headers::

    [model]
    kind = KP
    lambda = 1
    epsilon = 0.1

    [init]
    family = MODULATED_PACKET

    [grid]
    Nx = 1024
    Ny = 128
    Lx = 10
    Ly = 10

    [run]
    dt = 8e-5
    t_end = 4

Several ``key=value`` pairs may share a line, and keys given before any
section header are routed to their home section. Unknown keys are errors.

Snapshots are a 54-byte little-endian header (magic ``KPSNAP01``, version,
Nx, Ny as uint32; Lx, Ly, t, epsilon as float64; lambda as int8; model kind
as uint8) followed by ``Nx*Ny`` float64 samples, y outer / x inner.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field

import numpy as np

from .analysis import check_carrier_resolved
from .grid import RealField, SpectralGrid
from .initial import InitFamily, InitSpec
from .integrator import RunConfig
from .models import ModelKind, ModelSpec

__all__ = [
    "ConfigError",
    "SnapshotError",
    "OutputSpec",
    "Config",
    "parse_config",
    "SnapshotMeta",
    "write_snapshot",
    "read_snapshot",
    "SNAPSHOT_MAGIC",
    "SNAPSHOT_VERSION",
]


class ConfigError(ValueError):
    """Invalid configuration text; ``line`` is 1-based or None."""

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class SnapshotError(ValueError):
    pass


# section -> key -> converter name
_SCHEMA = {
    "model": {
        "kind": "kind",
        "lambda": "int",
        "epsilon": "float",
        "sigma": "float",
        "eta": "float",
        "nu": "float",
    },
    "init": {
        "family": "family",
        "x0": "float",
        "c": "float",
        "delta": "float",
        "amplitude": "float",
        "t0": "float",
    },
    "grid": {"Nx": "int", "Ny": "int", "Lx": "float", "Ly": "float"},
    "run": {
        "dt": "float",
        "t_end": "float",
        "snapshot_every": "int",
        "diagnostics_every": "int",
        "use_v_formulation": "tristate",
        "dealias": "bool",
        "enforce_constraint": "bool",
        "linear_only": "bool",
        "record_energy": "bool",
    },
    "output": {"directory": "str", "prefix": "str"},
    "sweep": {
        "epsilon": "floatlist",
        "Nx": "intlist",
        "Ny": "intlist",
        "Lx": "floatlist",
        "Ly": "floatlist",
        "dt": "floatlist",
        "lambda": "intlist",
        "sigma": "floatlist",
        "nu": "floatlist",
    },
}

_HOME = {}
for _section, _keys in _SCHEMA.items():
    if _section == "sweep":
        continue
    for _key in _keys:
        _HOME.setdefault(_key, _section)

_REQUIRED = [("model", "kind"), ("init", "family"), ("grid", "Nx"), ("grid", "Ny"),
             ("grid", "Lx"), ("grid", "Ly"), ("run", "dt"), ("run", "t_end")]

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(kind: str, raw: str, key: str, line: int):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind == "str":
            return raw
        if kind == "kind":
            return ModelKind[raw.upper()]
        if kind == "family":
            return InitFamily(raw.upper())
        if kind in ("bool", "tristate"):
            low = raw.lower()
            if kind == "tristate" and low == "auto":
                return None
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError
        if kind in ("floatlist", "intlist"):
            inner = "float" if kind == "floatlist" else "int"
            items = [s for s in re.split(r"[,\s]+", raw) if s]
            if not items:
                raise ValueError
            return [_convert(inner, s, key, line) for s in items]
    except (ValueError, KeyError):
        raise ConfigError(f"invalid value {raw!r} for {key!r}", line) from None
    raise AssertionError(kind)


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "."
    prefix: str = "run"


@dataclass(frozen=True)
class Config:
    model: ModelSpec
    init: InitSpec
    grid: SpectralGrid
    run: RunConfig
    output: OutputSpec = OutputSpec()
    sweep: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False, compare=False)


_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")


def _tokenize(text: str):
    """Yield ``(line_no, section, key, value)`` for every assignment."""
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].split(";", 1)[0].strip()
        if not stripped:
            continue
        m = _SECTION_RE.match(stripped)
        if m:
            section = m.group(1).lower()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", n)
            continue
        if "=" not in stripped:
            raise ConfigError(f"syntax error: expected 'key = value', got {stripped!r}", n)
        if stripped.count("=") > 1:
            pairs = stripped.split()
            if not all(p.count("=") == 1 and not p.startswith("=") for p in pairs):
                raise ConfigError(f"syntax error: cannot split {stripped!r} into key=value pairs", n)
        else:
            pairs = [stripped]
        for pair in pairs:
            key, value = (s.strip() for s in pair.split("=", 1))
            if not key or not value:
                raise ConfigError(f"syntax error: empty key or value in {pair!r}", n)
            yield n, section, key, value


def parse_config(text: str) -> Config:
    """Parse and validate a run configuration."""
    values: dict[tuple[str, str], tuple[object, int]] = {}
    for n, section, key, raw in _tokenize(text):
        sec = section if section is not None else _HOME.get(key)
        schema = _SCHEMA.get(sec, {})
        if key not in schema:
            where = f" in [{sec}]" if sec else ""
            raise ConfigError(f"unknown key {key!r}{where}", n)
        if (sec, key) in values:
            raise ConfigError(f"duplicate key {key!r} in [{sec}]", n)
        values[(sec, key)] = (_convert(schema[key], raw, key, n), n)

    def get(sec, key, default=None):
        return values[(sec, key)][0] if (sec, key) in values else default

    def line_of(*keys):
        lines = [values[k][1] for k in keys if k in values]
        return max(lines) if lines else None

    if ("model", "kind") not in values:
        raise ConfigError("missing required key 'kind' in [model]")

    kind = get("model", "kind")
    lam = get("model", "lambda", 1)
    eps = get("model", "epsilon", 0.0)
    sigma = get("model", "sigma", 0.0)
    eta = get("model", "eta", 1.0)

    def fail(msg, *keys):
        raise ConfigError(msg, line_of(*keys))

    if lam not in (-1, 1):
        fail(f"lambda must be +1 or -1, got {lam}", ("model", "lambda"))
    if kind is ModelKind.DS and lam != 1:
        fail("kind=DS with lambda=-1: unsupported DS regime", ("model", "kind"), ("model", "lambda"))
    if kind is ModelKind.KP and not eps > 0:
        fail("kind=KP requires epsilon > 0", ("model", "kind"), ("model", "epsilon"))
    if kind is ModelKind.KP and sigma != 0:
        fail("kind=KP requires sigma = 0 (use DKP_REG)", ("model", "kind"), ("model", "sigma"))
    if kind is ModelKind.DKP_REG and eps != 0:
        fail("kind=DKP_REG requires epsilon = 0", ("model", "kind"), ("model", "epsilon"))
    if kind is ModelKind.KDV and sigma != 0:
        fail("kind=KDV requires sigma = 0", ("model", "kind"), ("model", "sigma"))
    if kind is ModelKind.DS and not eta > 0:
        fail("kind=DS requires eta > 0", ("model", "kind"), ("model", "eta"))

    for sec, key in _REQUIRED:
        if (sec, key) not in values:
            raise ConfigError(f"missing required key {key!r} in [{sec}]")

    try:
        model = ModelSpec(kind, lam=lam, epsilon=eps, sigma=sigma, eta=eta)
    except ValueError as exc:
        raise ConfigError(str(exc), line_of(("model", "kind"))) from None

    try:
        grid = SpectralGrid(get("grid", "Nx"), get("grid", "Ny"), get("grid", "Lx"), get("grid", "Ly"))
    except ValueError as exc:
        raise ConfigError(str(exc), line_of(*[("grid", k) for k in ("Nx", "Ny", "Lx", "Ly")])) from None

    family = get("init", "family")
    nu = get("model", "nu", 1.0)
    if nu < 0:
        fail("nu must be non-negative", ("model", "nu"))
    amplitude_default = 6.0 if kind is not ModelKind.DS else 1.0
    init = InitSpec(
        family,
        x0=get("init", "x0", 0.0),
        c=get("init", "c", 1.0),
        delta=get("init", "delta", 0.0),
        amplitude=get("init", "amplitude", amplitude_default),
        nu=nu,
        epsilon=eps,
        t0=get("init", "t0", 0.0),
    )
    if family is InitFamily.MODULATED_PACKET:
        if not eps > 0:
            fail("family=MODULATED_PACKET needs epsilon > 0", ("init", "family"), ("model", "epsilon"))
        try:
            check_carrier_resolved(grid, eps)
        except ValueError as exc:
            fail(f"family=MODULATED_PACKET and grid Nx: {exc}", ("grid", "Nx"), ("model", "epsilon"))
    if family is InitFamily.LUMP and not init.c > 0:
        fail("family=LUMP requires c > 0", ("init", "family"), ("init", "c"))

    try:
        run = RunConfig(
            dt=get("run", "dt"),
            t_end=get("run", "t_end"),
            snapshot_every=get("run", "snapshot_every", 0),
            diagnostics_every=get("run", "diagnostics_every", 1),
            use_v_formulation=get("run", "use_v_formulation", None),
            dealias=get("run", "dealias", False),
            enforce_constraint=get("run", "enforce_constraint", True),
            linear_only=get("run", "linear_only", False),
            record_energy=get("run", "record_energy", False),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), line_of(*[("run", k) for k in _SCHEMA["run"]])) from None
    if run.use_v_formulation and not (model.requires_constraint and run.enforce_constraint):
        fail("use_v_formulation=true needs kind=KP or DKP_REG with enforce_constraint",
             ("run", "use_v_formulation"), ("model", "kind"))

    output = OutputSpec(get("output", "directory", "."), get("output", "prefix", "run"))
    sweep = {k: v for (sec, k), (v, _) in values.items() if sec == "sweep"}
    if sweep:
        lengths = {len(v) for v in sweep.values() if len(v) != 1}
        if len(lengths) > 1:
            fail("sweep lists must have equal lengths (or length 1)", *[("sweep", k) for k in sweep])
    raw = {f"{sec}.{key}": v for (sec, key), (v, _) in values.items()}
    return Config(model, init, grid, run, output, sweep, raw)


# --- snapshots -------------------------------------------------------------

SNAPSHOT_MAGIC = b"KPSNAP01"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIIIddddbB")


@dataclass(frozen=True)
class SnapshotMeta:
    t: float = 0.0
    epsilon: float = 0.0
    lam: int = 1
    kind: ModelKind = ModelKind.KP

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))


def write_snapshot(field_: RealField, meta: SnapshotMeta) -> bytes:
    """Serialize a real field; complex fields must be split by the caller."""
    values = np.asarray(field_.values)
    if np.iscomplexobj(values):
        raise SnapshotError("snapshots hold real samples; store real and imaginary parts separately")
    g = field_.grid
    header = _HEADER.pack(
        SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.Nx, g.Ny, g.Lx, g.Ly,
        float(meta.t), float(meta.epsilon), int(meta.lam), int(meta.kind),
    )
    return header + np.ascontiguousarray(values, dtype="<f8").tobytes()


def read_snapshot(data: bytes) -> tuple[RealField, SnapshotMeta]:
    """Inverse of :func:`write_snapshot`; raises SnapshotError on bad input."""
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise SnapshotError(f"truncated header: {len(data)} < {_HEADER.size} bytes")
    magic, version, nx, ny, lx, ly, t, eps, lam, kind = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unknown snapshot version {version}")
    expected = 8 * nx * ny
    payload = data[_HEADER.size:]
    if len(payload) != expected:
        raise SnapshotError(f"payload has {len(payload)} bytes, expected {expected}")
    try:
        grid = SpectralGrid(nx, ny, lx, ly)
        meta = SnapshotMeta(t, eps, lam, kind)
    except ValueError as exc:
        raise SnapshotError(f"invalid header: {exc}") from None
    values = np.frombuffer(payload, dtype="<f8").reshape(ny, nx).astype(float)
    return RealField(grid, values), meta
