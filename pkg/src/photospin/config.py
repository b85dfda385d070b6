"""Line-oriented ``key = value`` configuration files with ``#`` comments."""

import numpy as np


class ConfigError(ValueError):
    pass


def parse_entries(text, source="<config>"):
    """``[(lineno, key, value), ...]`` with comments and blank lines dropped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        entries.append((lineno, key, value))
    return entries


def parse_grid(value):
    """``start stop step`` -> inclusive grid ``start + k * step``."""
    parts = value.split()
    if len(parts) != 3:
        raise ValueError(f"grid needs 'start stop step', got {value!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {value!r}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def parse_floats(value):
    return [float(p) for p in value.split()]


def parse_bool(value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


class Settings:
    """Typed view over parsed entries, validated against a schema of defaults.

    ``schema`` maps key -> (parser, default string).
    """

    def __init__(self, entries, schema, source="<config>"):
        self._values = {}
        seen = {}
        for lineno, key, value in entries:
            if key not in schema:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            if key in seen:
                raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first on line {seen[key]})")
            seen[key] = lineno
            parser, _ = schema[key]
            try:
                self._values[key] = parser(value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from exc
        for key, (parser, default) in schema.items():
            if key not in self._values:
                self._values[key] = None if default is None else parser(default)

    def __getitem__(self, key):
        return self._values[key]
