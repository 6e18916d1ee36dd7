"""Config files, overrides and run manifests for the command-line harness.

Configs are INI-style key/value files.  Unknown keys are rejected with the
full list of offenders (misspellings never fall back to defaults
silently).  Every run writes a manifest next to its outputs: a flat
``key=value`` text file with the fully resolved configuration, the seed and
the package version.
"""

from __future__ import annotations

import configparser
from pathlib import Path

__all__ = [
    "ConfigError",
    "KNOWN_KEYS",
    "load_config",
    "apply_overrides",
    "section_floats",
    "write_manifest",
    "read_manifest",
]


class ConfigError(ValueError):
    """Bad configuration file or override."""


KNOWN_KEYS = {
    "model": {"a", "x0", "sigma", "alpha", "gamma", "q", "epsilon", "r"},
    "simulation": {"n", "t", "dt", "seed", "snapshot_times", "hist_width", "hist_max", "variant"},
    "fixed_point": {"t", "n_paths", "dt", "max_iter", "tol", "seed", "init"},
    "grid": {"l", "t", "n_space", "n_time"},
    "mfg": {
        "l", "t", "n_space", "n_time", "outer_tol", "outer_max",
        "newton_tol", "newton_max", "m0_center", "m0_std", "m0_radius",
    },
    "blowup": {"mu", "c", "rate_ceiling", "mass_loss_tol"},
    "stationary": {"x_max", "n_points", "a_min", "a_max", "a_steps", "x0_min", "x0_max", "x0_steps"},
    "experiment": {"tag"},
}


def load_config(path: str | Path | None) -> dict:
    """Parse an INI config into {section: {key: str}} and validate key names."""
    sections: dict = {}
    if path is None:
        return sections
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"config file not found: {path}")
    unknown = []
    for sec in parser.sections():
        if sec not in KNOWN_KEYS:
            unknown.append(f"[{sec}]")
            continue
        sections[sec] = {}
        for key, value in parser.items(sec):
            if key not in KNOWN_KEYS[sec]:
                unknown.append(f"{sec}.{key}")
            else:
                sections[sec][key] = value
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(unknown)))
    return sections


def apply_overrides(sections: dict, overrides: list[str] | None) -> dict:
    """Apply ``--set section.key=value`` pairs on top of the parsed config."""
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        target, value = item.split("=", 1)
        sec, key = target.split(".", 1)
        if sec not in KNOWN_KEYS or key not in KNOWN_KEYS[sec]:
            raise ConfigError(f"unknown config key in override: {sec}.{key}")
        sections.setdefault(sec, {})[key] = value
    return sections


def section_floats(sections: dict, name: str) -> dict:
    """Numeric view of one section (strings left untouched where not numeric)."""
    out = {}
    for key, value in sections.get(name, {}).items():
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def write_manifest(path: str | Path, entries: dict) -> None:
    lines = [f"{key}={entries[key]}" for key in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> dict:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
