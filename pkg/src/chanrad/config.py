"""Strict flat key = value run configuration (TOML-compatible subset).

Every documented key has exactly one type; unknown keys are rejected so a
typo in a physics parameter can never pass silently.  Parsing materializes
every default, and serialize_config() emits a text that reparses to an
identical RunConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import BadValue, MissingKey, UnknownKey

_POTENTIALS = ("harmonic", "poschl_teller", "tabulated")
_KERNELS = ("omega2", "unit")
_PROFILES = ("sinc",)


@dataclass(frozen=True)
class RunConfig:
    charge_sign: int
    energy_ev: float
    mass_ev: float
    dp_angstrom: float
    u0_ev: float
    length_angstrom: float
    theta_in_rad: float
    potential: str
    pt_width_angstrom: float | None
    potential_file: str | None
    theta_min_rad: float
    theta_max_rad: float
    theta_count: int
    omega_min_ev: float
    omega_max_ev: float
    omega_count: int
    kernel: str
    profile: str
    out_prefix: str
    workers: int


def _parse_int(key, text):
    try:
        value = int(text, 10)
    except ValueError:
        raise BadValue(key, f"expected an integer, got {text!r}") from None
    return value


def _parse_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise BadValue(key, f"expected a number, got {text!r}") from None


def _parse_string(key, text):
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    if any(ch in text for ch in " \t\"'"):
        raise BadValue(key, f"malformed string {text!r}")
    return text


# key -> (parser, default); _REQUIRED means the key must appear.
_REQUIRED = object()
_SCHEMA = {
    "charge_sign": (_parse_int, +1),
    "energy_ev": (_parse_float, _REQUIRED),
    "mass_ev": (_parse_float, 510998.95),
    "dp_angstrom": (_parse_float, _REQUIRED),
    "u0_ev": (_parse_float, _REQUIRED),
    "length_angstrom": (_parse_float, _REQUIRED),
    "theta_in_rad": (_parse_float, _REQUIRED),
    "potential": (_parse_string, "harmonic"),
    "pt_width_angstrom": (_parse_float, None),
    "potential_file": (_parse_string, None),
    "theta_min_rad": (_parse_float, _REQUIRED),
    "theta_max_rad": (_parse_float, _REQUIRED),
    "theta_count": (_parse_int, _REQUIRED),
    "omega_min_ev": (_parse_float, _REQUIRED),
    "omega_max_ev": (_parse_float, _REQUIRED),
    "omega_count": (_parse_int, _REQUIRED),
    "kernel": (_parse_string, "omega2"),
    "profile": (_parse_string, "sinc"),
    "out_prefix": (_parse_string, "run_"),
    "workers": (_parse_int, 1),
}


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.charge_sign not in (+1, -1):
        raise BadValue("charge_sign", "must be +1 or -1")
    for key in ("energy_ev", "mass_ev", "dp_angstrom", "u0_ev", "length_angstrom"):
        if getattr(cfg, key) <= 0:
            raise BadValue(key, "must be positive")
    if cfg.potential not in _POTENTIALS:
        raise BadValue("potential", f"must be one of {_POTENTIALS}")
    if cfg.potential == "poschl_teller":
        if cfg.pt_width_angstrom is None:
            raise MissingKey("pt_width_angstrom")
        if cfg.pt_width_angstrom <= 0:
            raise BadValue("pt_width_angstrom", "must be positive")
    if cfg.potential == "tabulated" and not cfg.potential_file:
        raise MissingKey("potential_file")
    for axis in ("theta", "omega"):
        unit = "rad" if axis == "theta" else "ev"
        lo = getattr(cfg, f"{axis}_min_{unit}")
        hi = getattr(cfg, f"{axis}_max_{unit}")
        count = getattr(cfg, f"{axis}_count")
        if count < 1:
            raise BadValue(f"{axis}_count", "must be >= 1")
        if not lo < hi:
            raise BadValue(f"{axis}_min_{unit}", "axis min must be below axis max")
    if cfg.kernel not in _KERNELS:
        raise BadValue("kernel", f"must be one of {_KERNELS}")
    if cfg.profile not in _PROFILES:
        raise BadValue("profile", f"must be one of {_PROFILES}")
    if cfg.workers < 1:
        raise BadValue("workers", "must be >= 1")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and validate; every default is materialized in the result.

    Raises UnknownKey / MissingKey / BadValue, each naming the offending key.
    """
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadValue(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise UnknownKey(key)
        if key in seen:
            raise BadValue(key, "key given twice")
        if not value:
            raise BadValue(key, "empty value")
        seen[key] = _SCHEMA[key][0](key, value)
    fields = {}
    for key, (_, default) in _SCHEMA.items():
        if key in seen:
            fields[key] = seen[key]
        elif default is _REQUIRED:
            raise MissingKey(key)
        else:
            fields[key] = default
    return _validate(RunConfig(**fields))


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(serialize_config(c)) == c."""
    lines = []
    for key in _SCHEMA:
        value = getattr(cfg, key)
        if value is None:
            continue
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        elif isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: RunConfig, out_prefix=None, workers=None) -> RunConfig:
    """Apply command-line overrides on top of a parsed config."""
    updates = {}
    if out_prefix is not None:
        updates["out_prefix"] = out_prefix
    if workers is not None:
        if workers < 1:
            raise BadValue("workers", "must be >= 1")
        updates["workers"] = workers
    return replace(cfg, **updates) if updates else cfg
