"""Flat ``[section]`` / ``key = value`` run configuration.

Every key has a typed default, so an empty file resolves to the reference
gain set. Vectors are comma-separated lists; ``#`` starts a comment. Errors
carry the file name and line number of the offending entry.

Example::

    [filter]
    rho = 1.0
    filt_eps = 0.1

    [trajectory]
    kind = figure_eight
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cfilter import CompGains, FilterParams
from .controller import CtrlGains, TriggerParams
from .mathcore import SwitchParams
from .nnapprox import NNConfig
from .plant import PlantParams
from .sim import CONTROLLERS, ControllerConfig, PIDGains, SimConfig
from .trajectory import TrajectorySpec

FLOAT, INT, STR, VEC = "float", "int", "str", "vec"

# section -> (target, {key: type}); target names the ControllerConfig/RunConfig slot
SCHEMA = {
    "plant": ("plant", {"m_t": FLOAT, "g": FLOAT, "visc": VEC, "coul": VEC, "v_s": FLOAT,
                        "dist_amp": VEC, "dist_freq": VEC, "dist_phase": VEC,
                        "delta_bar": FLOAT, "v_limit": FLOAT}),
    "switch": ("sw", {"p_exp": FLOAT, "switch_eps": FLOAT}),
    "comp": ("comp", {"c1": VEC, "c2": VEC, "k": VEC, "k1": VEC, "k2": VEC}),
    "ctrl": ("ctrl", {"beta1": VEC, "gamma1": VEC, "beta2": VEC, "gamma2": VEC}),
    "filter": ("filt", {"zeta": FLOAT, "rho": FLOAT, "filt_eps": FLOAT}),
    "nn": ("nn", {"n0": INT, "n1": INT, "n2": INT, "vbar0": FLOAT, "vbar1": FLOAT,
                  "gamma0": VEC, "gamma1": VEC, "init_scale": FLOAT}),
    "trigger": ("trigger", {"sigma": FLOAT, "delta": FLOAT, "kappa0": FLOAT}),
    "pid": ("pid", {"kp": VEC, "ki": VEC, "kd": VEC, "integral_limit": FLOAT, "integral_init": STR}),
    "trajectory": ("traj", {"kind": STR, "center": VEC, "a": FLOAT, "b": FLOAT,
                            "altitude_amp": FLOAT, "omega": FLOAT, "ramp": FLOAT}),
    "sim": ("sim", {"dt_plant": FLOAT, "control_period": FLOAT, "t_end": FLOAT, "seed": INT,
                    "weight_decimation": INT}),
    "run": ("run", {"controller": STR, "p0_offset": VEC, "output_dir": STR, "name": STR,
                    "window_start": FLOAT}),
}


class ConfigError(ValueError):
    """Invalid configuration; ``str()`` is ``file:line: message``."""

    def __init__(self, message: str, path: str = "<config>", line: int | None = None):
        self.path = path
        self.line = line
        self.message = message
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


@dataclass
class RunConfig:
    model: ControllerConfig = field(default_factory=ControllerConfig)
    output_dir: str = "out"
    name: str = ""
    # start of the error-statistics window (s)
    window_start: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.window_start < self.model.sim.t_end:
            raise ValueError(
                f"window_start must satisfy 0 <= window_start < t_end, got {self.window_start}"
            )


def _parse_value(raw: str, kind: str, path: str, line: int, key: str):
    raw = raw.strip()
    try:
        if kind == FLOAT:
            v = float(raw)
            if math.isnan(v):
                raise ValueError("nan")
            return v
        if kind == INT:
            return int(raw)
        if kind == VEC:
            parts = [p.strip() for p in raw.split(",")]
            if not raw or any(not p for p in parts):
                raise ValueError("empty component")
            arr = np.array([float(p) for p in parts])
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite component")
            return arr
    except ValueError:
        expected = {FLOAT: "a number", INT: "an integer", VEC: "a comma-separated list of numbers"}[kind]
        raise ConfigError(f"{key}: expected {expected}, got {raw!r}", path, line) from None
    return raw


def iter_entries(text: str, path: str = "<config>"):
    """Yield ``(section, key, raw_value, line)`` for each entry of the flat dialect."""
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"malformed section header {stripped!r}", path, lineno)
            section = stripped[1:-1].strip()
            yield section, None, None, lineno
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", path, lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", path, lineno)
        key, raw = (s.strip() for s in stripped.split("=", 1))
        yield section, key, raw, lineno


def parse_text(text: str, path: str = "<config>"):
    """Return ``{section: {key: (value, line)}}`` with syntax and key checks only."""
    entries: dict[str, dict[str, tuple]] = {}
    for section, key, raw, lineno in iter_entries(text, path):
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; known: {', '.join(SCHEMA)}", path, lineno)
        entries.setdefault(section, {})
        if key is None:
            continue
        keys = SCHEMA[section][1]
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in [{section}]", path, lineno)
        if key in entries[section]:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", path, lineno)
        entries[section][key] = (_parse_value(raw, keys[key], path, lineno, key), lineno)
    return entries


def _blame(msg: str, given: dict):
    """Line of the key named earliest in ``msg``, if any."""
    hits = []
    for key, (_, line) in given.items():
        m = re.search(rf"\b{re.escape(key)}\b", msg)
        if m:
            hits.append((m.start(), line))
    return min(hits)[1] if hits else None


def _build(cls, section: str, entries: dict, path: str, **extra):
    """Instantiate ``cls`` from parsed entries, mapping validation errors to a line."""
    given = entries.get(section, {})
    kwargs = {k: v for k, (v, _) in given.items()}
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        line = _blame(msg, given)
        if line is None and given:
            line = min(ln for _, ln in given.values())
        raise ConfigError(f"[{section}] {msg}", path, line) from None


def config_from_text(text: str, path: str = "<config>") -> RunConfig:
    entries = parse_text(text, path)
    sw = _build(SwitchParams, "switch", entries, path)
    sim = _build(SimConfig, "sim", entries, path)
    run = {k: v for k, (v, _) in entries.get("run", {}).items()}
    model_kwargs = dict(
        plant=_build(PlantParams, "plant", entries, path),
        comp=_build(CompGains, "comp", entries, path, sw=sw),
        ctrl=_build(CtrlGains, "ctrl", entries, path, sw=sw),
        filt=_build(FilterParams, "filter", entries, path),
        nn=_build(NNConfig, "nn", entries, path),
        trigger=_build(TriggerParams, "trigger", entries, path),
        pid=_build(PIDGains, "pid", entries, path),
        traj=_build(TrajectorySpec, "trajectory", entries, path),
        sim=sim,
    )
    run_lines = entries.get("run", {})
    if "controller" in run and run["controller"] not in CONTROLLERS:
        raise ConfigError(f"controller must be one of {CONTROLLERS}, got {run['controller']!r}",
                          path, run_lines["controller"][1])
    try:
        model = ControllerConfig(**model_kwargs,
                                 **{k: run[k] for k in ("controller", "p0_offset") if k in run})
        return RunConfig(model=model, **{k: run[k] for k in ("output_dir", "name", "window_start") if k in run})
    except ValueError as exc:
        line = _blame(str(exc), run_lines)
        raise ConfigError(f"[run] {exc}", path, line) from None


def load_config(path) -> RunConfig:
    """Read and fully validate a configuration file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(p)) from None
    cfg = config_from_text(text, str(p))
    if not cfg.name:
        cfg.name = p.stem
    return cfg


def _fmt(value, kind: str) -> str:
    if kind == VEC:
        return ", ".join(repr(float(x)) for x in np.asarray(value).reshape(-1))
    if kind == FLOAT:
        v = float(value)
        return "inf" if math.isinf(v) and v > 0 else repr(v)
    return str(value)


def _section_source(cfg: RunConfig, target: str):
    m = cfg.model
    if target == "sw":
        return m.comp.sw
    if target == "run":
        return {"controller": m.controller, "p0_offset": m.p0_offset, "output_dir": cfg.output_dir,
                "name": cfg.name, "window_start": cfg.window_start}
    return getattr(m, target)


def dump_config(cfg: RunConfig) -> str:
    """Fully resolved configuration in the same dialect; reloads to an equal config."""
    lines = []
    for section, (target, keys) in SCHEMA.items():
        src = _section_source(cfg, target)
        lines.append(f"[{section}]")
        for key, kind in keys.items():
            value = src[key] if isinstance(src, dict) else getattr(src, key)
            lines.append(f"{key} = {_fmt(value, kind)}")
        lines.append("")
    return "\n".join(lines)


def configs_equal(a: RunConfig, b: RunConfig) -> bool:
    """Field-wise equality, comparing arrays exactly."""
    for _, (target, keys) in SCHEMA.items():
        sa, sb = _section_source(a, target), _section_source(b, target)
        for key in keys:
            va = sa[key] if isinstance(sa, dict) else getattr(sa, key)
            vb = sb[key] if isinstance(sb, dict) else getattr(sb, key)
            if isinstance(va, np.ndarray) or isinstance(vb, np.ndarray):
                if not np.array_equal(np.asarray(va), np.asarray(vb)):
                    return False
            elif va != vb:
                return False
    return True


SHIPPED_DIR = Path(__file__).resolve().parent / "configs"


def shipped_config(name: str) -> Path:
    """Path of a configuration bundled with the package, e.g. ``"ellipse_et_nn"``."""
    path = SHIPPED_DIR / f"{name}.cfg"
    if not path.is_file():
        known = sorted(p.stem for p in SHIPPED_DIR.glob("*.cfg"))
        raise FileNotFoundError(f"no shipped config {name!r}; available: {', '.join(known)}")
    return path
