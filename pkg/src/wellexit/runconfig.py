"""Run configuration: sectioned text format, validation, manifests, CSV io.

Configs are flat INI files with string/number/array values.  Unknown
sections or keys are rejected with their full key path.  Every run emits
a manifest that echoes the fully resolved configuration plus seeds and
version pins; re-running a manifest reproduces byte-identical outputs.
"""

from __future__ import annotations

import configparser
import csv
import io
import os

import numpy as np

from .errors import ConfigError

FLOAT_FORMAT = "%.17g"

_SCHEMA = {
    "experiment": {"figure": str, "h_grid": "floats", "n_exit_samples": int},
    "potential": {"name": str, "a": float, "delta": float, "coeffs": "floats",
                  "z1": float, "z2": float, "strict": "bool"},
    "domain": {"kind": str},
    "simulation": {"dt": float, "h": float, "seed": int, "max_steps": int,
                   "n_samples": int, "workers": int, "block_size": int},
    "qsd": {"n_particles": int, "n_chains": int, "r_threshold": float,
            "snapshot_stride": int, "max_steps": int, "min_snapshots": int},
    "windows": {"sigma1": "window", "sigma2": "window", "sigma3": "window",
                "sigma4": "window"},
    "output": {"dir": str, "emit_events": "bool"},
}

_DEFAULTS = {
    "potential": {"name": "quadratic-disc-caps"},
    "simulation": {"dt": 0.005, "seed": 20240801, "max_steps": 20_000_000,
                   "n_samples": 10_000, "workers": 1, "block_size": 65_536},
    "qsd": {"n_particles": 20_000, "n_chains": 4, "r_threshold": 1.02,
            "snapshot_stride": 10, "max_steps": 400_000, "min_snapshots": 20},
    "output": {"dir": "out", "emit_events": False},
}


def _parse_value(section, key, raw):
    kind = _SCHEMA[section][key]
    try:
        if kind is str:
            return raw.strip()
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
        if kind == "bool":
            val = raw.strip().lower()
            if val in ("true", "1", "yes"):
                return True
            if val in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "floats":
            return tuple(float(tok) for tok in raw.replace(",", " ").split())
        if kind == "window":
            raw = raw.strip()
            if raw == "auto":
                return "auto"
            toks = tuple(float(tok) for tok in raw.replace(",", " ").split())
            if len(toks) != 2:
                raise ValueError("window needs two arclength values or 'auto'")
            return toks
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: {err}") from err
    raise ConfigError(f"[{section}] {key}: unhandled kind {kind}")


def load_config(path=None, text=None, overrides=None):
    """Parse and validate a config file into a nested dict with defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if text is not None:
        parser.read_string(text)
    elif path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            try:
                parser.read_file(fh)
            except configparser.Error as err:
                raise ConfigError(f"malformed config {path}: {err}") from err
    cfg = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            cfg.setdefault(section, {})[key] = _parse_value(section, key, raw)
    for section, vals in (overrides or {}).items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, val in vals.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            if val is not None:
                cfg.setdefault(section, {})[key] = val
    return cfg


def format_value(val):
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        return FLOAT_FORMAT % val
    if isinstance(val, (tuple, list, np.ndarray)):
        return ", ".join(format_value(v) for v in val)
    return str(val)


def manifest_text(cfg, versions=None):
    """Deterministic INI text of the resolved configuration."""
    out = io.StringIO()
    for section in sorted(cfg):
        vals = cfg[section]
        if not vals:
            continue
        out.write(f"[{section}]\n")
        for key in sorted(vals):
            out.write(f"{key} = {format_value(vals[key])}\n")
        out.write("\n")
    if versions:
        out.write("# versions: " + ", ".join(f"{k}={v}"
                                             for k, v in sorted(versions.items())))
        out.write("\n")
    return out.getvalue()


def write_csv(path, header, rows):
    """RFC-4180 CSV with a header row; floats at 17 significant digits."""

    def fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return FLOAT_FORMAT % v
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return v

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return header, rows


def landscape_from_config(cfg):
    from . import landscape as ls

    pot = cfg.get("potential", {})
    name = pot.get("name", "quadratic-disc-caps")
    params = {k: v for k, v in pot.items() if k not in ("name", "strict")}
    strict = pot.get("strict", True)
    try:
        lan = ls.make_builtin_landscape(name, params, strict=strict)
    except ls.UnknownName as err:
        raise ConfigError(str(err)) from err
    except ls.InvalidParams as err:
        raise ConfigError(str(err)) from err
    kind = cfg.get("domain", {}).get("kind", "auto")
    if kind not in ("auto", lan.domain.kind):
        raise ConfigError(
            f"[domain] kind = {kind!r} conflicts with the {name!r} landscape "
            f"(its domain kind is {lan.domain.kind!r})")
    return lan


def sim_config_from(cfg, h=None):
    from .langevin import SimConfig

    sim = cfg["simulation"]
    if h is None:
        if "h" not in sim:
            raise ConfigError("[simulation] h is required (or pass an h grid)")
        h = sim["h"]
    return SimConfig(dt=sim["dt"], h=float(h), seed=sim["seed"],
                     max_steps=sim["max_steps"])


def qsd_config_from(cfg):
    from .qsd import QsdConfig

    q = cfg["qsd"]
    return QsdConfig(n_particles=q["n_particles"], n_chains=q["n_chains"],
                     r_threshold=q["r_threshold"],
                     snapshot_stride=q["snapshot_stride"],
                     max_steps=q["max_steps"],
                     min_snapshots=q["min_snapshots"])


def windows_from_config(cfg, landscape, inventory):
    from .langevin import BoundaryWindow, saddle_windows_for

    entries = cfg.get("windows", {})
    if not entries:
        return saddle_windows_for(landscape, inventory)
    auto = saddle_windows_for(landscape, inventory)
    wins = []
    for label in sorted(entries):
        val = entries[label]
        if val == "auto":
            match = [w for w in auto if w.label == label]
            if not match:
                raise ConfigError(f"[windows] {label}: no automatic window")
            wins.append(match[0])
        else:
            wins.append(BoundaryWindow(label=label, s_lo=val[0], s_hi=val[1]))
    return wins
