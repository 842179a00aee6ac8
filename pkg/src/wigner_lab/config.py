"""Experiment configuration files.

A config is an INI-style file of ``key = value`` lines grouped in sections.
Every key is checked against :data:`SCHEMA`; unknown sections or keys and
malformed values raise :class:`ConfigError` with the offending line number.
Missing keys take the defaults below.
"""
import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .io import config_hash


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _opt_float(text):
    return None if text.strip().lower() in ("none", "") else float(text)


def _opt_str(text):
    return None if text.strip().lower() in ("none", "") else text.strip()


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {t!r}")
        return t

    return parse


SCHEMA = {
    "experiment": {
        "name": (str, ""),
        "seed": (int, 0),
        "out": (str, "out"),
    },
    "system": {
        "beta_mhz": (float, 20.0),
        "dim": (int, 40),
        "t1": (_opt_float, None),
        "t2": (_opt_float, None),
    },
    "pulse": {
        "fwhm": (float, 1.6),
        "step": (float, 0.01),
        "cutoff": (_opt_float, None),
    },
    "tomography": {
        "level": (int, 1),
        "genome": (_opt_str, None),
        "d": (int, 6),
        "n_samples": (int, 200),
        "radius": (float, 2.0),
        "regularization": (float, 0.0),
        "projection": (_choice("simplex", "clip"), "simplex"),
        "phase_dt": (_opt_float, None),
        "mode": (_choice("pulsed", "pulsed+decoherence", "pulsed+decoherence+shot-noise"), "pulsed"),
        "repetitions": (int, 900),
        "grid_radius": (float, 2.5),
        "grid_n": (int, 61),
    },
    "displace": {
        "alpha_min": (float, -2.5),
        "alpha_max": (float, 2.5),
        "n_alpha": (int, 51),
        "levels": (int, 13),
    },
    "chirp": {
        "beta_mhz": (float, 25.0),
        "dim": (int, 20),
        "t1": (float, 120.0),
        "t2": (_opt_float, 150.0),
        "rabi_mhz": (float, 66.0),
        "f_start_ghz": (float, 0.320),
        "f_end_ghz": (float, -0.050),
        "duration": (float, 20.0),
        "t_end": (float, 600.0),
        "sample_every": (float, 5.0),
        "snapshots": (_floats, (0.0, 5.0, 10.0, 15.0, 20.0, 40.0, 80.0, 160.0, 320.0, 600.0)),
        "grid_radius": (float, 4.0),
        "grid_n": (int, 81),
        "fit_delay": (float, 100.0),
    },
    "optimizer": {
        "target_level": (int, 1),
        "n_genomes": (int, 30),
        "n_elite": (int, 8),
        "n_timesteps": (int, 15),
        "max_amp": (_opt_float, None),
        "noise_frac": (float, 0.05),
        "n_rep": (int, 5),
        "repetitions": (int, 900),
        "generations": (int, 200),
        "plateau_generations": (int, 30),
        "plateau_tol": (float, 0.003),
        "remeasure": (_bool, True),
    },
    "compare": {
        "ensemble": (int, 50),
        "wt_repetitions": (int, 900),
        "wt_pulses": (_ints, (20, 30, 45, 68, 100, 150, 225, 340)),
        "sst_repetitions": (_ints, (100, 170, 300, 500, 900, 1600, 3000)),
        "projection": (_choice("simplex", "clip"), "clip"),
        "target_df": (float, 0.02),
    },
}

_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")
_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text):
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index = {}
    section = None
    for no, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), no)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None and not line[:1].isspace():
            index.setdefault((section, m.group(1).strip().lower()), no)
    return index


@dataclass
class ExperimentConfig:
    """Validated settings for one experiment, one dict per section."""

    sections: dict
    text: str = ""
    path: Optional[str] = None
    hash: str = field(default="")

    def __getitem__(self, section):
        return self.sections[section]

    @property
    def seed(self):
        return self.sections["experiment"]["seed"]

    @property
    def out(self):
        return self.sections["experiment"]["out"]


def defaults():
    return {s: {k: v[1] for k, v in keys.items()} for s, keys in SCHEMA.items()}


def parse_config(text, path=None):
    parser = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False)
    try:
        parser.read_string(text, source=str(path) if path else "<config>")
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("key outside of any [section]", e.lineno, path) from None
    except configparser.DuplicateOptionError as e:
        raise ConfigError(f"duplicate key {e.option!r} in [{e.section}]", e.lineno, path) from None
    except configparser.DuplicateSectionError as e:
        raise ConfigError(f"duplicate section [{e.section}]", e.lineno, path) from None
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise ConfigError("malformed line", lineno, path) from None
    lines = _line_index(text)
    sections = defaults()
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(
                f"unknown section [{name}]; expected one of {', '.join(SCHEMA)}", lines.get((name, None)), path
            )
        for key, raw in parser.items(name):
            line = lines.get((name, key))
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in [{name}]", line, path)
            conv = SCHEMA[name][key][0]
            try:
                sections[name][key] = conv(raw)
            except ValueError as e:
                raise ConfigError(f"bad value for {name}.{key}: {e}", line, path) from None
    _check(sections, lines, path)
    return ExperimentConfig(sections, text, str(path) if path else None, config_hash(text))


def _check(s, lines, path):
    def need(cond, section, key, msg):
        if not cond:
            raise ConfigError(f"{section}.{key}: {msg}", lines.get((section, key)), path)

    need(s["system"]["dim"] >= 2, "system", "dim", "must be >= 2")
    need(s["pulse"]["fwhm"] > 0, "pulse", "fwhm", "must be positive")
    need(s["pulse"]["step"] > 0, "pulse", "step", "must be positive")
    t = s["tomography"]
    need(t["d"] >= 2, "tomography", "d", "must be >= 2")
    need(t["radius"] > 0, "tomography", "radius", "must be positive")
    need(1 <= t["level"] < t["d"], "tomography", "level", "must satisfy 1 <= level < d")
    need(t["repetitions"] >= 1, "tomography", "repetitions", "must be >= 1")
    need(t["grid_n"] >= 2, "tomography", "grid_n", "must be >= 2")
    need(s["displace"]["n_alpha"] >= 1, "displace", "n_alpha", "must be >= 1")
    o = s["optimizer"]
    need(2 * o["n_elite"] < o["n_genomes"], "optimizer", "n_elite", "need 2 * n_elite < n_genomes")
    need(1 <= o["target_level"] < 6, "optimizer", "target_level", "must be in 1..5")
    need(o["repetitions"] >= 0, "optimizer", "repetitions", "must be >= 0 (0 means noiseless)")
    c = s["compare"]
    need(c["ensemble"] >= 2, "compare", "ensemble", "must be >= 2")
    need(len(c["wt_pulses"]) >= 2, "compare", "wt_pulses", "need at least two values")
    need(len(c["sst_repetitions"]) >= 2, "compare", "sst_repetitions", "need at least two values")


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", path=path) from None
    return parse_config(text, path)
