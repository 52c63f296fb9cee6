"""Scenario configuration: TOML parsing, validation, and serialization.

Configs are flat key = value files with three nested sections (group,
surface, experiment).  Validation is strict: unknown keys are rejected
so that typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:        # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

import numpy as np

from . import group as grp
from . import surface as srf


class ConfigError(ValueError):
    pass


KINDS = ("slab", "stack", "nikodym", "identity-suite")

_TOP_KEYS = {"name", "kind", "seed", "out_dir", "group", "surface",
             "experiment"}
_GROUP_KEYS = {"d", "m", "J", "Lambda"}
_SURFACE_KEYS = {"kind", "n_res", "chi_center", "chi_radius", "chi_order",
                 "patch"}
_EXPERIMENT_KEYS = {
    "slab": {"theta", "omega0", "eps", "p", "delta_list", "n_samples"},
    "stack": {"theta", "omega0", "eps", "m_list", "n_samples"},
    "nikodym": {"p", "eta_list", "N", "n_samples", "level"},
    "identity-suite": {"s_list", "n_samples", "n_res_reduction"},
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    kind: str
    seed: int
    out_dir: str
    group: dict
    surface: dict
    experiment: dict
    raw: dict = field(repr=False, default_factory=dict)


def _check_keys(section: dict, allowed, where: str) -> None:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    _check_keys(data, _TOP_KEYS, "top level")
    for key in ("name", "kind"):
        if key not in data:
            raise ConfigError(f"missing required key: {key}")
    kind = data["kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind: {kind!r}")
    group = data.get("group", {})
    surface = data.get("surface", {})
    experiment = data.get("experiment", {})
    if kind != "identity-suite" or group:
        _check_keys(group, _GROUP_KEYS, "[group]")
    if kind != "identity-suite" or surface:
        _check_keys(surface, _SURFACE_KEYS, "[surface]")
    _check_keys(experiment, _EXPERIMENT_KEYS[kind], "[experiment]")
    if kind in ("slab", "stack", "nikodym"):
        for key in ("d", "m", "J", "Lambda"):
            if key not in group:
                raise ConfigError(f"[group] missing key: {key}")
        for key in ("kind", "n_res"):
            if key not in surface:
                raise ConfigError(f"[surface] missing key: {key}")
    return ScenarioConfig(name=str(data["name"]), kind=kind,
                          seed=int(data.get("seed", 0)),
                          out_dir=str(data.get("out_dir", ".")),
                          group=group, surface=surface,
                          experiment=experiment, raw=data)


def load_config(path) -> ScenarioConfig:
    with open(path, "rb") as fh:
        text = fh.read().decode()
    return parse_config(text)


def build_group(section: dict) -> grp.GroupStructure:
    d, m = int(section["d"]), int(section["m"])
    J = np.asarray(section["J"], dtype=float)
    Lam = np.asarray(section["Lambda"], dtype=float)
    if J.shape != (m, d, d):
        raise ConfigError(f"J must have shape ({m}, {d}, {d}), got {J.shape}")
    if Lam.shape != (m, d):
        raise ConfigError(f"Lambda must have shape ({m}, {d}), got {Lam.shape}")
    return grp.GroupStructure(d=d, m=m, J=J, Lambda=Lam)


def build_surface(section: dict, d: int) -> srf.SurfaceMeasure:
    kind = section["kind"]
    if kind != "sphere":
        raise ConfigError(f"unsupported surface kind in configs: {kind!r}")
    n_res = int(section["n_res"])
    chi = None
    patch = {}
    if "chi_center" in section:
        center = np.asarray(section["chi_center"], dtype=float)
        if center.shape != (d,):
            raise ConfigError("chi_center length must equal d")
        radius = float(section["chi_radius"])
        order = int(section.get("chi_order", 4))
        chi = srf.bump(center, radius, order)
        if section.get("patch", True):
            patch = {"patch_center": center, "patch_radius": radius}
    return srf.sphere_measure(d, n_res, chi, **patch)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        out = format(v, ".17g")
        return out if ("." in out or "e" in out or "inf" in out) else out + ".0"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize value of type {type(v).__name__}")


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical TOML text; parse(serialize(parse(text))) == parse(text)."""
    lines = []
    data = cfg.raw
    for key in ("name", "kind", "seed", "out_dir"):
        if key in data:
            lines.append(f"{key} = {_fmt_value(data[key])}")
    for section in ("group", "surface", "experiment"):
        body = data.get(section)
        if body is None:
            continue
        lines.append("")
        lines.append(f"[{section}]")
        for key in sorted(body):
            lines.append(f"{key} = {_fmt_value(body[key])}")
    return "\n".join(lines) + "\n"
