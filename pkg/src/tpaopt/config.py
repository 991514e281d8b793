"""Flat INI-style run configuration (``[section]`` headers, ``key = value`` lines)."""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .grid import DEFAULT_TAIL_CUT, FrequencyGrid, graded_grid, reference_grid, uniform_grid
from .model import LevelSystem, SinglePath, Symmetric, TwoAtom, from_rubidium, make_system
from .rubidium import DEFAULT_BAND, STUDY_LEVELS
from .sweep import AxisRange, SweepSpec, WindowGrid

ALLOWED = {
    "system": {"gamma_f", "delta", "mu_ge", "mu_ef", "field_norm", "mode", "preset", "gamma_e2", "delta_atoms"},
    "grid": {"kind", "center", "centers", "halfwidth", "scale", "scales", "n", "tail_cut", "tail_correction"},
    "run": {"out", "workers", "seed", "t", "photon_number", "modes"},
    "sweep": {"delta_min", "delta_max", "delta_count", "small_min", "small_max", "small_count", "margin", "n", "t"},
    "dynamics": {"times"},
    "rubidium": {"band_min", "band_max", "levels"},
}

DEFAULT_TIMES = (-30.0, 30.0, 601)


def _float(section: str, key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"[{section}] {key}: value must be finite")
    return v


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None


def _list(section: str, key: str, raw: str, conv) -> list:
    return [conv(section, key, part.strip()) for part in raw.split(",") if part.strip()]


def _bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")


def parse_times(raw: str) -> tuple[float, float, int]:
    """``min:max:count`` -> (min, max, count)."""
    parts = raw.split(":")
    if len(parts) != 3:
        raise ConfigError(f"times must look like min:max:count (got {raw!r})")
    tmin = _float("dynamics", "times", parts[0])
    tmax = _float("dynamics", "times", parts[1])
    count = _int("dynamics", "times", parts[2])
    if count < 2 or not tmax > tmin:
        raise ConfigError(f"times needs min < max and count >= 2 (got {raw!r})")
    return tmin, tmax, count


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)
    source: Optional[str] = None

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def normalized(self) -> dict:
        return {k: dict(sorted(v.items())) for k, v in sorted(self.sections.items())}

    # system ---------------------------------------------------------------
    def system(self) -> LevelSystem:
        s = self.section("system")
        kwargs = {}
        for key in ("mu_ge", "mu_ef", "field_norm"):
            if key in s:
                kwargs[key] = _float("system", key, s[key])
        preset = s.get("preset", "").strip().lower()
        if preset:
            if preset != "rubidium":
                raise ConfigError(f"[system] preset: unknown preset {preset!r} (known: rubidium)")
            clash = {"gamma_f", "delta", "mode", "gamma_e2", "delta_atoms"} & set(s)
            if clash:
                raise ConfigError(f"[system] preset=rubidium fixes {sorted(clash)}; remove them")
            return from_rubidium(**kwargs)
        mode_name = s.get("mode", "symmetric").strip().lower()
        if mode_name == "symmetric":
            mode = Symmetric()
        elif mode_name == "single_path":
            mode = SinglePath()
        elif mode_name == "two_atom":
            mode = TwoAtom(
                gamma_e2=_float("system", "gamma_e2", s.get("gamma_e2", "1")),
                delta_atoms=_float("system", "delta_atoms", s.get("delta_atoms", "0")),
            )
        else:
            raise ConfigError(f"[system] mode: expected symmetric, single_path or two_atom (got {mode_name!r})")
        if mode_name != "two_atom" and ({"gamma_e2", "delta_atoms"} & set(s)):
            raise ConfigError("[system] gamma_e2/delta_atoms only apply to mode = two_atom")
        gamma_f = _float("system", "gamma_f", s.get("gamma_f", "2"))
        delta = _float("system", "delta", s.get("delta", "0"))
        return make_system(gamma_f, delta, coupling_mode=mode, **kwargs)

    # grid -----------------------------------------------------------------
    def grid(self, system: LevelSystem) -> FrequencyGrid:
        g = self.section("grid")
        kind = g.get("kind", "auto").strip().lower()
        if kind == "auto":
            n = _int("grid", "n", g["n"]) if "n" in g else 801
            return reference_grid(system, n)
        if kind == "uniform":
            center = _float("grid", "center", g.get("center", str(0.5 * system.delta_cap)))
            halfwidth = _float("grid", "halfwidth", g.get("halfwidth", "40"))
            n = _int("grid", "n", g.get("n", "801"))
            return uniform_grid(center, halfwidth, n)
        if kind == "graded":
            raw_centers = g.get("centers", g.get("center"))
            if raw_centers is None:
                raise ConfigError("[grid] graded grids need centers = c1, c2, ...")
            centers = _list("grid", "centers", raw_centers, _float)
            scales = _list("grid", "scales", g.get("scales", g.get("scale", "1")), _float)
            ns = _list("grid", "n", g.get("n", "801"), _int)
            if len(scales) == 1:
                scales = scales * len(centers)
            if len(ns) == 1:
                ns = ns * len(centers)
            if not len(centers) == len(scales) == len(ns):
                raise ConfigError("[grid] centers, scales and n must have matching lengths")
            tail_cut = _float("grid", "tail_cut", g.get("tail_cut", str(DEFAULT_TAIL_CUT)))
            tail_correction = _bool("grid", "tail_correction", g.get("tail_correction", "true"))
            return graded_grid(list(zip(centers, scales, ns)), tail_cut, tail_correction)
        raise ConfigError(f"[grid] kind: expected auto, uniform or graded (got {kind!r})")

    # run ------------------------------------------------------------------
    def workers(self) -> int:
        w = _int("run", "workers", self.section("run").get("workers", "1"))
        if w < 1:
            raise ConfigError(f"[run] workers must be >= 1 (got {w})")
        return w

    def seed(self) -> int:
        return _int("run", "seed", self.section("run").get("seed", "12345"))

    def target_time(self) -> float:
        return _float("run", "t", self.section("run").get("t", "0"))

    def photon_number(self) -> float:
        N = _float("run", "photon_number", self.section("run").get("photon_number", "1"))
        if not N > 0:
            raise ConfigError(f"[run] photon_number must be > 0 (got {N})")
        return N

    def export_modes(self) -> int:
        return _int("run", "modes", self.section("run").get("modes", "10"))

    def out_dir(self, override: Optional[str] = None) -> Path:
        if override:
            return Path(override)
        if "out" in self.section("run"):
            return Path(self.section("run")["out"])
        return Path(os.environ.get("TPAOPT_OUT", "tpaopt_out"))

    # sweep ----------------------------------------------------------------
    def sweep_spec(self) -> SweepSpec:
        s = self.section("sweep")
        d = SweepSpec()
        D = AxisRange(
            _float("sweep", "delta_min", s.get("delta_min", str(d.delta_cap_range.lo))),
            _float("sweep", "delta_max", s.get("delta_max", str(d.delta_cap_range.hi))),
            _int("sweep", "delta_count", s.get("delta_count", str(d.delta_cap_range.count))),
        )
        small = AxisRange(
            _float("sweep", "small_min", s.get("small_min", str(d.delta_small_range.lo))),
            _float("sweep", "small_max", s.get("small_max", str(d.delta_small_range.hi))),
            _int("sweep", "small_count", s.get("small_count", str(d.delta_small_range.count))),
        )
        grid = WindowGrid(
            margin=_float("sweep", "margin", s.get("margin", str(d.grid.margin))),
            n=_int("sweep", "n", s.get("n", str(d.grid.n))),
        )
        t = _float("sweep", "t", s.get("t", "0"))
        return SweepSpec(D, small, grid, t)

    # dynamics ---------------------------------------------------------------
    def times(self, override: Optional[str] = None) -> tuple[float, float, int]:
        if override:
            return parse_times(override)
        raw = self.section("dynamics").get("times")
        return parse_times(raw) if raw else DEFAULT_TIMES

    # rubidium ---------------------------------------------------------------
    def rubidium_band(self) -> tuple[float, float]:
        r = self.section("rubidium")
        lo = _float("rubidium", "band_min", r.get("band_min", str(DEFAULT_BAND[0])))
        hi = _float("rubidium", "band_max", r.get("band_max", str(DEFAULT_BAND[1])))
        return lo, hi

    def rubidium_levels(self):
        raw = self.section("rubidium").get("levels")
        if not raw:
            return STUDY_LEVELS
        levels = []
        for part in raw.split(","):
            reach, _, n = part.strip().partition(":")
            levels.append((_float("rubidium", "levels", reach), _int("rubidium", "levels", n)))
        return tuple(levels)


def parse_config_text(text: str, source: Optional[str] = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    sections = {}
    for name in parser.sections():
        if name not in ALLOWED:
            raise ConfigError(f"unknown config section [{name}] (known: {', '.join(sorted(ALLOWED))})")
        items = dict(parser.items(name))
        unknown = set(items) - ALLOWED[name]
        if unknown:
            raise ConfigError(f"[{name}]: unknown keys {sorted(unknown)}")
        sections[name] = items
    return RunConfig(sections, source)


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, str(p))
