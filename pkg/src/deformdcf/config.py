"""Line-oriented ``key = value`` configuration with a fixed schema.

Precedence, lowest to highest: built-in defaults, config file values,
command-line overrides.  Unknown keys and malformed values are rejected.
"""

from __future__ import annotations

from .errors import ConfigurationError
from .tracker import TrackerParams


def _int_or_auto(text: str):
    return "auto" if text == "auto" else int(text)


def _str_or_none(text: str):
    return None if text.lower() in ("", "none") else text


SCHEMA = {
    "parts": _int_or_auto,
    "deformation": str,
    "position_weight": float,
    "features": str,
    "precomputed_path": _str_or_none,
    "precomputed_scale": float,
    "cell_size": int,
    "padding": float,
    "patch_shape": str,
    "scale_count": int,
    "scale_step": float,
    "scale_penalty": float,
    "scale_min": float,
    "scale_max": float,
    "learning_rate": float,
    "memory_size": int,
    "label_sigma_factor": float,
    "label_amplitude": float,
    "reg_base": float,
    "reg_steepness": float,
    "cg_init_iters": int,
    "cg_update_iters": int,
    "cg_tol": float,
    "bb_iters": int,
    "bb_initial_step": float,
    "bb_step_min": float,
    "bb_step_max": float,
    "min_cells": int,
    "max_cells": int,
    "oversample": int,
    "newton_iters": int,
}


def parse_value(key: str, text: str):
    """Parse one raw string value against the schema."""
    caster = SCHEMA.get(key)
    if caster is None:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    try:
        return caster(text.strip())
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad value for {key!r}: {text!r} ({exc})") from exc


def parse_config_file(path: str) -> dict:
    """Read ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                )
            key, text = line.split("=", 1)
            key = key.strip()
            values[key] = parse_value(key, text)
    return values


def parse_overrides(pairs: list[str]) -> dict:
    """Parse repeated ``key=value`` command-line overrides."""
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"override {pair!r} is not key=value")
        key, text = pair.split("=", 1)
        key = key.strip()
        values[key] = parse_value(key, text)
    return values


def resolve_params(file_values: dict | None = None,
                   overrides: dict | None = None) -> TrackerParams:
    """Merge defaults, file values and overrides into validated parameters."""
    merged = {}
    merged.update(file_values or {})
    merged.update(overrides or {})
    try:
        return TrackerParams(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc
