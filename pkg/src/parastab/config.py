"""
Run-configuration format: sectioned ``key = value`` text.

::

    [run]
    experiment = stabilize        # quantize | flux-sweep | stabilize | compare
                                  # | spectroscopy | vacuum-rabi | rates
    [system]
    omega_q = 4.343 GHz
    ...
    [grid.theta]
    start = 0 deg
    stop = 180 deg
    count = 17

``#`` starts a comment anywhere on a line.  Quantities carry a unit suffix
that must match the key's dimension; frequencies are ordinary frequencies
(Hz, kHz, MHz, GHz) and are stored as angular frequencies.  A bare number
is read in the base unit of its dimension (Hz, s, H, F, rad).
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .circuitq import CircuitParams
from .errors import BadUnit, ConfigError, DuplicateKey, MissingKey, MissingSection, UnknownKey
from .hamiltonians import SystemParams

EXPERIMENTS = ("quantize", "flux-sweep", "stabilize", "compare", "spectroscopy",
               "vacuum-rabi", "rates")

TWO_PI = 2.0 * math.pi

# dimension -> {suffix: factor to SI}; frequencies are converted to rad/s
UNITS = {
    "frequency": {"Hz": TWO_PI, "kHz": TWO_PI * 1e3, "MHz": TWO_PI * 1e6, "GHz": TWO_PI * 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "inductance": {"H": 1.0, "uH": 1e-6, "nH": 1e-9, "pH": 1e-12},
    "capacitance": {"F": 1.0, "nF": 1e-9, "pF": 1e-12, "fF": 1e-15},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "number": {},
}
# unit used when writing a dimension back out
BASE_UNIT = {"frequency": "Hz", "time": "s", "inductance": "H", "capacitance": "F",
             "angle": "rad", "number": ""}


@dataclass(frozen=True)
class Key:
    kind: str  # a UNITS dimension, "int" or "str"
    default: object = None
    choices: tuple = ()


SCHEMA = {
    "run": {
        "experiment": Key("str", choices=EXPERIMENTS),
        "format": Key("str", "csv", ("csv", "json")),
        "output": Key("str", ""),
        "workers": Key("int", 1),
    },
    "system": {
        "omega_q": Key("frequency", 0.0),
        "omega_r": Key("frequency", 0.0),
        "chi": Key("frequency"),
        "g_dispersive": Key("frequency"),
        "alpha": Key("frequency", 0.0),
        "kappa": Key("frequency", 0.0),
        "gamma": Key("frequency", 0.0),
        "gamma_phi": Key("frequency", 0.0),
        "n_fock": Key("int", 4),
    },
    "circuit": {
        "L_q": Key("inductance"),
        "L_r": Key("inductance"),
        "L_g0": Key("inductance"),
        "C_q": Key("capacitance"),
        "C_r": Key("capacitance"),
        "C_g": Key("capacitance"),
        "phi_ext": Key("number", 0.0),
    },
    "drive": {
        "omega_x": Key("frequency", 0.0),
        "omega_b": Key("frequency", 0.0),
        "phase": Key("angle", 0.0),
        "omega_R": Key("frequency", 0.0),
        "coupling": Key("frequency", 0.0),
        "interactions": Key("str", "blue,red,longitudinal,purple"),
        "probe_eps": Key("frequency", 0.0),
        "g_eff": Key("frequency", 0.0),
    },
    "solver": {
        "rtol": Key("number", 1e-8),
        "atol": Key("number", 1e-10),
        "method": Key("str", "steady", ("steady", "propagate")),
    },
}
GRID_KEYS = {"start": Key("number"), "stop": Key("number"), "count": Key("int")}
# dimension of each grid axis
GRID_AXES = {"theta": "angle", "phi_ext": "number", "probe": "frequency",
             "modulation": "frequency", "time": "time"}

# sections, drive keys and grids each experiment needs
REQUIREMENTS = {
    "quantize": {"sections": ("circuit",), "drive": (), "grids": ()},
    "flux-sweep": {"sections": ("circuit",), "drive": (), "grids": ("phi_ext",)},
    "stabilize": {"sections": ("system", "drive"), "drive": ("omega_x", "omega_b"),
                  "grids": ("theta",), "system": ("omega_q", "omega_r")},
    "compare": {"sections": ("system", "drive"), "drive": ("omega_R", "coupling"),
                "grids": ("theta",)},
    "spectroscopy": {"sections": ("system", "drive"), "drive": ("omega_b", "probe_eps"),
                     "grids": ("probe", "modulation"), "system": ("omega_q", "omega_r")},
    "vacuum-rabi": {"sections": ("system", "drive"), "drive": ("g_eff",), "grids": ("time",)},
    "rates": {"sections": ("system",), "drive": (), "grids": ("theta",),
              "system": ("gamma", "gamma_phi")},
}


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int

    def values(self):
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class RunConfig:
    experiment: str
    format: str = "csv"
    output: str = ""
    workers: int = 1
    system: SystemParams = None
    circuit: CircuitParams = None
    drive: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    # resolved values of every section, SI units, in file order
    sections: dict = field(default_factory=dict)

    @property
    def output_name(self):
        return self.output or f"{self.experiment}.{self.format}"


_SECTION_RE = re.compile(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]$")
_NUMBER_RE = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)$")


def parse_quantity(text, kind, line):
    m = _NUMBER_RE.match(text)
    if not m:
        raise ConfigError(f"expected a number, got {text!r}", line)
    value, suffix = float(m.group(1)), m.group(2)
    if not math.isfinite(value):
        raise ConfigError(f"non-finite value {text!r}", line)
    if not suffix:
        return value * UNITS[kind].get(BASE_UNIT[kind], 1.0)
    factor = UNITS[kind].get(suffix)
    if factor is None:
        allowed = ", ".join(UNITS[kind]) or "none"
        raise BadUnit(f"unit {suffix!r} not valid for a {kind} (allowed: {allowed})", line)
    return value * factor


def _parse_value(text, spec, line, key):
    if spec.kind == "str":
        if spec.choices and text not in spec.choices:
            raise ConfigError(f"{key} must be one of {', '.join(spec.choices)}", line)
        return text
    if spec.kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {text!r}", line) from None
    return parse_quantity(text, spec.kind, line)


def _tokenize(text):
    """Yield ``(line_no, section, key, value)``; ``key`` is None for section headers."""
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1)
            yield no, section, None, None
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' or '[section]', got {line!r}", no)
        if section is None:
            raise ConfigError("key outside of any section", no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError("empty key or value", no)
        yield no, section, key, value


def _section_schema(name, line):
    if name in SCHEMA:
        return SCHEMA[name], None
    if name.startswith("grid."):
        axis = name[5:]
        if axis not in GRID_AXES:
            raise UnknownKey(f"unknown grid axis {axis!r} (known: {', '.join(GRID_AXES)})", line)
        return GRID_KEYS, GRID_AXES[axis]
    raise UnknownKey(f"unknown section [{name}]", line)


def parse_config(text):
    raw = {}  # section -> {key: (value_text, line)}
    header_line = {}
    for no, section, key, value in _tokenize(text):
        if key is None:
            if section in header_line:
                raise DuplicateKey(f"[{section}]", header_line[section], no)
            _section_schema(section, no)
            header_line[section] = no
            raw[section] = {}
            continue
        if key in raw[section]:
            raise DuplicateKey(key, raw[section][key][1], no)
        raw[section][key] = (value, no)

    if "run" not in raw:
        raise MissingSection("missing required section [run]", 1 if text.strip() else None)

    sections = {}
    for name, entries in raw.items():
        schema, grid_kind = _section_schema(name, header_line[name])
        values = {}
        for key, (value, no) in entries.items():
            if key not in schema:
                raise UnknownKey(f"unknown key {key!r} in [{name}]", no)
            spec = schema[key]
            if grid_kind is not None and key in ("start", "stop"):
                spec = Key(grid_kind)
            values[key] = _parse_value(value, spec, no, key)
        sections[name] = values

    def require(section, key):
        if key not in sections.get(section, {}):
            raise MissingKey(f"missing required key {key!r} in [{section}]",
                             header_line.get(section))
        return sections[section][key]

    experiment = require("run", "experiment")
    req = REQUIREMENTS[experiment]
    for name in req["sections"]:
        if name not in sections:
            raise MissingSection(f"experiment {experiment!r} needs section [{name}]",
                                 header_line["run"])
    for axis in req["grids"]:
        if f"grid.{axis}" not in sections:
            raise MissingSection(f"experiment {experiment!r} needs section [grid.{axis}]",
                                 header_line["run"])
    for key in req["drive"]:
        require("drive", key)
    for key in req.get("system", ()):
        require("system", key)

    run = _with_defaults("run", sections.get("run", {}))
    if run["workers"] < 1:
        raise ConfigError("workers must be >= 1", entries_line(raw, "run", "workers"))

    cfg = RunConfig(
        experiment=experiment,
        format=run["format"],
        output=run["output"],
        workers=run["workers"],
        drive=_with_defaults("drive", sections.get("drive", {})),
        solver=_with_defaults("solver", sections.get("solver", {})),
        sections=sections,
    )
    for key in ("rtol", "atol"):
        if not cfg.solver[key] > 0:
            raise ConfigError(f"{key} must be positive", entries_line(raw, "solver", key))

    for name, values in sections.items():
        if name.startswith("grid."):
            for key in ("start", "stop", "count"):
                require(name, key)
            if values["count"] < 1:
                raise ConfigError("grid count must be >= 1", entries_line(raw, name, "count"))
            cfg.grids[name[5:]] = GridSpec(values["start"], values["stop"], values["count"])

    if "system" in sections:
        cfg.system = _build_system(sections["system"], raw, header_line["system"])
    if "circuit" in sections:
        for key in SCHEMA["circuit"]:
            if SCHEMA["circuit"][key].default is None:
                require("circuit", key)
        try:
            cfg.circuit = CircuitParams(**_with_defaults("circuit", sections["circuit"]))
        except ValueError as exc:
            raise ConfigError(str(exc), header_line["circuit"]) from None
    return cfg


def entries_line(raw, section, key):
    return raw.get(section, {}).get(key, (None, None))[1]


def _with_defaults(section, values):
    out = {k: spec.default for k, spec in SCHEMA[section].items()}
    out.update(values)
    return out


def _build_system(values, raw, line):
    v = _with_defaults("system", values)
    g_disp = v.pop("g_dispersive")
    if v["chi"] is None:
        v["chi"] = 0.0
        if g_disp is not None:
            delta = v["omega_q"] - v["omega_r"]
            den = 2.0 * delta * (delta + v["alpha"])
            if den == 0:
                raise ConfigError("cannot derive chi: qubit and cavity are degenerate",
                                  entries_line(raw, "system", "g_dispersive"))
            v["chi"] = g_disp * g_disp * v["alpha"] / den
    elif g_disp is not None:
        raise ConfigError("give either chi or g_dispersive, not both",
                          entries_line(raw, "system", "g_dispersive"))
    try:
        return SystemParams(**v)
    except ValueError as exc:
        raise ConfigError(str(exc), line) from None


def _format_value(value, kind):
    if kind == "str":
        return value
    if kind == "int":
        return str(value)
    unit = BASE_UNIT[kind]
    factor = UNITS[kind][unit] if unit else 1.0
    x = value / factor
    # prefer the short spelling when it converts back to the identical value
    short = float(f"{x:.15g}")
    if short * factor == value:
        x = short
    return f"{x!r} {unit}".rstrip()


def serialize_config(cfg):
    """Canonical text for ``cfg``: every key that was set, in base units."""
    out = []
    for name, values in cfg.sections.items():
        schema, grid_kind = _section_schema(name, None)
        out.append(f"[{name}]")
        for key, value in values.items():
            kind = schema[key].kind
            if grid_kind is not None and key in ("start", "stop"):
                kind = grid_kind
            out.append(f"{key} = {_format_value(value, kind)}")
        out.append("")
    return "\n".join(out)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
