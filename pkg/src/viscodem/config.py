"""Scenario configuration: INI-style sections, strict validation, canonical
round-trip serialization.

Sections: [scenario], [geometry], [material], [loads], [growth],
[stepping], [output].  Unknown sections or keys are rejected; every error
message names the offending key and all errors are reported together.
Canonical files shipped under viscodem/configs are in normalized form, so
parse -> serialize reproduces them byte for byte.
"""
from __future__ import annotations

import configparser
import io as _io
from dataclasses import dataclass, field, fields as dfields
from importlib import resources
from pathlib import Path

from .errors import ConfigError

SCENARIOS = ("relaxation", "creep", "beam_buckle", "shell_buckle",
             "growth_uniform", "growth_differential")
GEOMETRIES = ("beam", "quarter_annulus", "half_annulus")
DIRECTIONS = {"axial_tension": (1.0, 0.0), "axial_compression": (-1.0, 0.0),
              "radial_inward": (-1.0, 0.0)}

_SCENARIO_GEOMETRY = {
    "relaxation": "beam", "creep": "beam", "beam_buckle": "beam",
    "shell_buckle": "quarter_annulus",
    "growth_uniform": "half_annulus", "growth_differential": "half_annulus",
}


@dataclass
class GeometryConfig:
    kind: str = "beam"
    L: float = 10.0
    h: float = 1.0
    nx: int = 100
    ny: int = 10
    r_i: float = 0.9
    r_o: float = 1.0
    nr: int = 20
    nt: int = 90


@dataclass
class MaterialConfig:
    E_inf: float = 4.0
    E_1: float = 6.0
    xi: float = 18.0
    nu: float = 0.35
    # explicit Prony alternative; overrides the standard-solid keys if set
    G_inf: float | None = None
    lambda_inf: float | None = None
    branches: str | None = None   # "G:lambda:tau; G:lambda:tau; ..."


@dataclass
class LoadsConfig:
    pressure: float = 0.0
    boundary: str | None = None
    direction: str | None = None
    stretch: float = 0.0
    body_force: tuple = (0.0, 0.0)


@dataclass
class GrowthConfig:
    law: str = "isotropic"
    k: float = 0.5
    b_g: float | None = None
    b_g_factor: float | None = None
    b_g_r: float | None = None
    b_g_theta: float | None = None


@dataclass
class SteppingConfig:
    delta_t: float = 1.0
    steps: int = 9
    first_iterations: int = 3000
    iterations: int = 1000
    learning_rate: float = 1e-3
    seed: int = 0
    warm_start: bool = True
    network: str = "single"
    hidden: tuple = (20, 20, 20)


@dataclass
class OutputConfig:
    dir: str = "out/run"
    fields: bool = True
    vtk: bool = True
    every: int = 1


@dataclass
class ScenarioConfig:
    kind: str
    geometry: GeometryConfig
    material: MaterialConfig
    loads: LoadsConfig
    growth: GrowthConfig | None
    stepping: SteppingConfig
    output: OutputConfig

    def to_text(self) -> str:
        return serialize(self)


# -- formatting --------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


_GEOM_KEYS = {"beam": ("kind", "L", "h", "nx", "ny"),
              "quarter_annulus": ("kind", "r_i", "r_o", "nr", "nt"),
              "half_annulus": ("kind", "r_i", "r_o", "nr", "nt")}


def serialize(cfg: ScenarioConfig) -> str:
    out = _io.StringIO()
    out.write("[scenario]\nkind = " + cfg.kind + "\n\n")
    out.write("[geometry]\n")
    for k in _GEOM_KEYS[cfg.geometry.kind]:
        out.write(f"{k} = {_fmt(getattr(cfg.geometry, k))}\n")
    out.write("\n[material]\n")
    m = cfg.material
    if m.G_inf is not None:
        for k in ("G_inf", "lambda_inf", "branches", "nu"):
            v = getattr(m, k)
            if v is not None:
                out.write(f"{k} = {_fmt(v)}\n")
    else:
        for k in ("E_inf", "E_1", "xi", "nu"):
            out.write(f"{k} = {_fmt(getattr(m, k))}\n")
    ld = cfg.loads
    if ld.pressure or ld.stretch or any(ld.body_force):
        out.write("\n[loads]\n")
        if ld.stretch:
            out.write(f"stretch = {_fmt(ld.stretch)}\n")
        if ld.pressure:
            out.write(f"pressure = {_fmt(ld.pressure)}\n")
            out.write(f"boundary = {ld.boundary}\n")
            out.write(f"direction = {ld.direction}\n")
        if any(ld.body_force):
            out.write(f"body_force = {_fmt(ld.body_force)}\n")
    if cfg.growth is not None:
        g = cfg.growth
        out.write("\n[growth]\n")
        out.write(f"law = {g.law}\n")
        out.write(f"k = {_fmt(g.k)}\n")
        for k in ("b_g", "b_g_factor", "b_g_r", "b_g_theta"):
            v = getattr(g, k)
            if v is not None:
                out.write(f"{k} = {_fmt(v)}\n")
    out.write("\n[stepping]\n")
    s = cfg.stepping
    for k in ("delta_t", "steps", "first_iterations", "iterations",
              "learning_rate", "seed", "warm_start", "network", "hidden"):
        out.write(f"{k} = {_fmt(getattr(s, k))}\n")
    out.write("\n[output]\n")
    o = cfg.output
    for k in ("dir", "fields", "vtk", "every"):
        out.write(f"{k} = {_fmt(getattr(o, k))}\n")
    return out.getvalue()


# -- parsing / validation ------------------------------------------------------

_KNOWN = {
    "scenario": {"kind"},
    "geometry": {"kind", "L", "h", "nx", "ny", "r_i", "r_o", "nr", "nt"},
    "material": {"E_inf", "E_1", "xi", "nu", "G_inf", "lambda_inf", "branches"},
    "loads": {"pressure", "boundary", "direction", "stretch", "body_force"},
    "growth": {"law", "k", "b_g", "b_g_factor", "b_g_r", "b_g_theta"},
    "stepping": {"delta_t", "steps", "first_iterations", "iterations",
                 "learning_rate", "seed", "warm_start", "network", "hidden"},
    "output": {"dir", "fields", "vtk", "every"},
}


class _Check:
    def __init__(self):
        self.errors = []

    def err(self, key, msg):
        self.errors.append(f"{key}: {msg}")

    def get(self, sec, name, conv, default=None, required=False):
        if name not in sec:
            if required:
                self.err(name, "required key missing")
            return default
        raw = sec[name]
        try:
            return conv(raw)
        except (TypeError, ValueError) as e:
            self.err(name, f"cannot parse {raw!r} ({e})")
            return default


def _bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("true", "yes", "1", "on"):
        return True
    if s in ("false", "no", "0", "off"):
        return False
    raise ValueError("not a boolean")


def _int_tuple(s: str) -> tuple:
    return tuple(int(x) for x in s.split(","))


def _float_pair(s: str) -> tuple:
    parts = [float(x) for x in s.split(",")]
    if len(parts) != 2:
        raise ValueError("need two comma-separated numbers")
    return tuple(parts)


def validate(text: str):
    """Parse + validate config text: returns (ScenarioConfig, []) or
    (None, [error messages])."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        return None, [f"parse error: {e}"]
    ck = _Check()

    for sec in cp.sections():
        if sec not in _KNOWN:
            ck.err(sec, "unknown section")
        else:
            for key in cp[sec]:
                if key not in _KNOWN[sec]:
                    ck.err(f"{sec}.{key}", "unknown key")
    if ck.errors:
        return None, ck.errors

    if "scenario" not in cp:
        return None, ["scenario: section missing"]
    kind = cp["scenario"].get("kind", "")
    if kind not in SCENARIOS:
        return None, [f"scenario.kind: must be one of {SCENARIOS}, got {kind!r}"]

    # geometry
    gsec = cp["geometry"] if "geometry" in cp else {}
    gkind = gsec.get("kind", _SCENARIO_GEOMETRY[kind]) if hasattr(gsec, "get") else _SCENARIO_GEOMETRY[kind]
    geo = GeometryConfig(kind=gkind)
    if gkind not in GEOMETRIES:
        ck.err("geometry.kind", f"must be one of {GEOMETRIES}")
    elif gkind != _SCENARIO_GEOMETRY[kind]:
        ck.err("geometry.kind", f"scenario {kind} requires {_SCENARIO_GEOMETRY[kind]}")
    if gkind == "beam":
        geo.L = ck.get(gsec, "L", float, 10.0)
        geo.h = ck.get(gsec, "h", float, 1.0)
        geo.nx = ck.get(gsec, "nx", int, 100)
        geo.ny = ck.get(gsec, "ny", int, 10)
        if geo.L is not None and geo.L <= 0:
            ck.err("geometry.L", "must be positive")
        if geo.h is not None and geo.h <= 0:
            ck.err("geometry.h", "must be positive")
        for k in ("nx", "ny"):
            v = getattr(geo, k)
            if v is not None and v < 2:
                ck.err(f"geometry.{k}", "needs at least 2 cells")
    else:
        geo.r_i = ck.get(gsec, "r_i", float, 0.9)
        geo.r_o = ck.get(gsec, "r_o", float, 1.0)
        geo.nr = ck.get(gsec, "nr", int, 20 if gkind == "quarter_annulus" else 10)
        geo.nt = ck.get(gsec, "nt", int, 90 if gkind == "quarter_annulus" else 180)
        if geo.r_i is not None and geo.r_i <= 0:
            ck.err("geometry.r_i", "must be positive")
        if None not in (geo.r_i, geo.r_o) and geo.r_i >= geo.r_o:
            ck.err("geometry.r_i", "must be smaller than r_o")
        for k in ("nr", "nt"):
            v = getattr(geo, k)
            if v is not None and v < 2:
                ck.err(f"geometry.{k}", "needs at least 2 cells")

    # material
    msec = cp["material"] if "material" in cp else {}
    mat = MaterialConfig()
    if hasattr(msec, "get") and ("G_inf" in msec or "lambda_inf" in msec or "branches" in msec):
        mat.G_inf = ck.get(msec, "G_inf", float, required=True)
        mat.lambda_inf = ck.get(msec, "lambda_inf", float, required=True)
        mat.branches = ck.get(msec, "branches", str)
        mat.nu = ck.get(msec, "nu", float, 0.35)
        if mat.G_inf is not None and mat.G_inf <= 0:
            ck.err("material.G_inf", "must be positive")
        if mat.lambda_inf is not None and mat.lambda_inf <= 0:
            ck.err("material.lambda_inf", "must be positive")
        if mat.branches:
            for i, chunk in enumerate(mat.branches.split(";")):
                try:
                    g, lam, tau = (float(x) for x in chunk.split(":"))
                    if g <= 0 or lam <= 0 or tau <= 0:
                        raise ValueError("entries must be positive")
                except ValueError as e:
                    ck.err(f"material.branches[{i}]", str(e))
    else:
        mat.E_inf = ck.get(msec, "E_inf", float, 4.0)
        mat.E_1 = ck.get(msec, "E_1", float, 6.0)
        mat.xi = ck.get(msec, "xi", float, 18.0)
        mat.nu = ck.get(msec, "nu", float, 0.35)
        if mat.E_inf is not None and mat.E_inf <= 0:
            ck.err("material.E_inf", "must be positive")
        if mat.E_1 is not None and mat.E_1 < 0:
            ck.err("material.E_1", "must be non-negative")
        if mat.E_1 and mat.xi is not None and mat.xi <= 0:
            ck.err("material.xi", "must be positive for a viscous branch")
    if mat.nu is not None and not 0.0 < mat.nu < 0.5:
        ck.err("material.nu", f"need 0 < nu < 0.5, got {mat.nu}")

    # loads
    lsec = cp["loads"] if "loads" in cp else {}
    loads = LoadsConfig()
    loads.pressure = ck.get(lsec, "pressure", float, 0.0)
    loads.boundary = ck.get(lsec, "boundary", str)
    loads.direction = ck.get(lsec, "direction", str)
    loads.stretch = ck.get(lsec, "stretch", float, 0.0)
    loads.body_force = ck.get(lsec, "body_force", _float_pair, (0.0, 0.0))
    if loads.pressure is not None and loads.pressure < 0:
        ck.err("loads.pressure", "must be non-negative (direction sets the sense)")
    if loads.pressure:
        if loads.direction not in DIRECTIONS:
            ck.err("loads.direction", f"must be one of {tuple(DIRECTIONS)}")
        want_boundary = "outer_surface" if kind == "shell_buckle" else "right_end"
        if loads.boundary != want_boundary:
            ck.err("loads.boundary", f"scenario {kind} loads act on {want_boundary}")
    if kind == "relaxation" and (not loads.stretch or loads.stretch <= 0):
        ck.err("loads.stretch", "relaxation needs a positive held end displacement")
    if kind in ("creep", "beam_buckle", "shell_buckle") and not loads.pressure:
        ck.err("loads.pressure", f"scenario {kind} needs a positive pressure")

    # growth
    growth = None
    if kind in ("growth_uniform", "growth_differential"):
        gr = cp["growth"] if "growth" in cp else {}
        if not hasattr(gr, "get"):
            ck.err("growth", "section required for growth scenarios")
        growth = GrowthConfig()
        growth.law = ck.get(gr, "law", str,
                            "isotropic" if kind == "growth_uniform" else "differential")
        want = "isotropic" if kind == "growth_uniform" else "differential"
        if growth.law != want:
            ck.err("growth.law", f"scenario {kind} uses the {want} law")
        growth.k = ck.get(gr, "k", float, 0.5)
        if growth.k is not None and growth.k <= 0:
            ck.err("growth.k", "must be positive")
        growth.b_g = ck.get(gr, "b_g", float)
        growth.b_g_factor = ck.get(gr, "b_g_factor", float)
        growth.b_g_r = ck.get(gr, "b_g_r", float)
        growth.b_g_theta = ck.get(gr, "b_g_theta", float)
        if growth.b_g is None and growth.b_g_factor is None:
            ck.err("growth.b_g", "set b_g (absolute) or b_g_factor (fraction of E_0)")
    elif "growth" in cp:
        ck.err("growth", f"section not allowed for scenario {kind}")

    # stepping
    ssec = cp["stepping"] if "stepping" in cp else {}
    st = SteppingConfig()
    st.delta_t = ck.get(ssec, "delta_t", float, 1.0)
    st.steps = ck.get(ssec, "steps", int, 9)
    st.first_iterations = ck.get(ssec, "first_iterations", int, 3000)
    st.iterations = ck.get(ssec, "iterations", int, 1000)
    st.learning_rate = ck.get(ssec, "learning_rate", float, 1e-3)
    st.seed = ck.get(ssec, "seed", int, 0)
    st.warm_start = ck.get(ssec, "warm_start", _bool, True)
    st.network = ck.get(ssec, "network", str, "single")
    st.hidden = ck.get(ssec, "hidden", _int_tuple, (20, 20, 20))
    if st.delta_t is not None and st.delta_t <= 0:
        ck.err("stepping.delta_t", "must be positive")
    if st.steps is not None and st.steps < 0:
        ck.err("stepping.steps", "must be >= 0")
    for k in ("first_iterations", "iterations"):
        v = getattr(st, k)
        if v is not None and v < 1:
            ck.err(f"stepping.{k}", "must be >= 1")
    if st.learning_rate is not None and st.learning_rate <= 0:
        ck.err("stepping.learning_rate", "must be positive")
    if st.network not in ("single", "split"):
        ck.err("stepping.network", "must be 'single' or 'split'")
    if st.hidden is not None and any(h < 1 for h in st.hidden):
        ck.err("stepping.hidden", "layer widths must be >= 1")

    # output
    osec = cp["output"] if "output" in cp else {}
    outc = OutputConfig()
    outc.dir = ck.get(osec, "dir", str, f"out/{kind}")
    outc.fields = ck.get(osec, "fields", _bool, True)
    outc.vtk = ck.get(osec, "vtk", _bool, True)
    outc.every = ck.get(osec, "every", int, 1)
    if outc.every is not None and outc.every < 1:
        ck.err("output.every", "must be >= 1")

    if ck.errors:
        return None, ck.errors
    return ScenarioConfig(kind, geo, mat, loads, growth, st, outc), []


def parse_config(text: str) -> ScenarioConfig:
    cfg, errors = validate(text)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def apply_overrides(text: str, overrides) -> str:
    """Apply 'section.key=value' strings on top of config text."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    for ov in overrides or ():
        try:
            target, value = ov.split("=", 1)
            sec, key = target.strip().split(".", 1)
        except ValueError:
            raise ConfigError([f"override {ov!r}: expected section.key=value"])
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key.strip(), value.strip())
    buf = _io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# -- canonical configs ----------------------------------------------------------

CANONICAL = ("relax", "creep", "beam_elastic_buckle", "beam_subcritical",
             "beam_creep_buckle", "beam_creep_subcritical",
             "shell_creep_buckle", "growth_uniform", "growth_differential")


def canonical_text(name: str) -> str:
    if name not in CANONICAL:
        raise ConfigError([f"unknown canonical config {name!r}"])
    return resources.files("viscodem.configs").joinpath(name + ".cfg").read_text()


def canonical_config(name: str) -> ScenarioConfig:
    return parse_config(canonical_text(name))
