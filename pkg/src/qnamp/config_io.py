"""Run configuration files: INI-style sections mirroring the five design
parameter groups (ifo, sqz, amp, coat, sus) plus run controls.

Units are embedded in the key names (``length_m``, ``detuning_hz``,
``mass_g``). Dimensionless fractions additionally accept suffixed literals
("30 ppm", "0.89 %") which are normalized at parse time. Unknown sections or
keys are rejected.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import replace

from .amplifier import PumpParams, RingCavityParams
from .budget import ChainConfig
from .coating import quarter_wave_stack
from .filter_cavity import FilterCavityParams
from .grid import FrequencyGrid
from .interferometer import IfoParams, SqueezerParams
from .technical_noise import RinModel, SuspensionParams


class ConfigError(ValueError):
    """Malformed run configuration."""


_F, _I, _B = "float", "int", "bool"

_IFC_KEYS = ("length_m", "t_in_sq", "roundtrip_loss", "detuning_hz")
_MAX_IFC = 4

SCHEMA = {
    "ifo": {
        "arm_loss": _F, "src_loss": _F, "readout_loss": _F,
        "lambda_m": _F, "mass_kg": _F, "arm_length_m": _F,
        "arm_power_w": _F, "bandwidth_hz": _F,
    },
    "sqz": {
        "db": _F, "angle_rad": _F, "injection_loss": _F,
        **{f"ifc{i}_{k}": _F for i in range(1, _MAX_IFC + 1) for k in _IFC_KEYS},
    },
    "amp": {
        "t_a": _F, "length_m": _F, "l1_m": _F, "mass_g": _F,
        "pend_freq_hz": _F, "roundtrip_loss": _F,
        "p_source_w": _F, "lambda0_m": _F,
        "ofc_length_m": _F, "ofc_t_in_sq": _F, "ofc_roundtrip_loss": _F,
        "ofc_detuning_hz": _F,
        "cmrr_db": _F, "cmrr_ref_hz": _F,
        "rin_floor": _F, "rin_corner_hz": _F,
    },
    "coat": {
        "n_high": _F, "n_low": _F, "n_pairs": _I,
        "phi_high": _F, "phi_low": _F,
        "n_substrate": _F, "beam_radius_mm": _F,
    },
    "sus": {
        "mass_g": _F, "temperature_k": _F,
        "fiber_width_um": _F, "fiber_thickness_um": _F, "n_fibers": _I,
        "pendulum_length_m": _F,
        "phi_surface": _F, "phi_bulk": _F, "surface_depth_um": _F,
        "young_modulus_gpa": _F, "cte_per_k": _F, "dlogy_dt_per_k": _F,
        "heat_capacity_j_kgk": _F, "conductivity_w_mk": _F,
        "density_kg_m3": _F,
    },
    "run": {
        "f_min_hz": _F, "f_max_hz": _F, "n_points": _I, "seed": _I,
        "amplifier_on": _B, "exact_io": _B, "ofc_on": _B, "zeta0_rad": _F,
    },
}

_SECTION_ORDER = ("ifo", "sqz", "amp", "coat", "sus", "run")


def _parse_number(section, key, raw):
    text = raw.strip()
    scale = 1.0
    low = text.lower()
    if low.endswith("ppm"):
        scale, text = 1e-6, text[:-3]
    elif text.endswith("%"):
        scale, text = 1e-2, text[:-1]
    try:
        return float(text) * scale
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse number {raw!r}")


def _parse_bool(section, key, raw):
    v = raw.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")


def parse_config(text: str) -> dict:
    """Parse and validate a run configuration into {section: {key: value}}."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"invalid config syntax: {exc}") from exc
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        out[section] = {}
        for key, raw in cp.items(section):
            kind = SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            if kind == _B:
                out[section][key] = _parse_bool(section, key, raw)
            elif kind == _I:
                val = _parse_number(section, key, raw)
                if val != int(val):
                    raise ConfigError(f"[{section}] {key}: expected an integer")
                out[section][key] = int(val)
            else:
                out[section][key] = _parse_number(section, key, raw)
    return out


def serialize_config(cfg: dict) -> str:
    """Canonical text form: fixed section and key order, repr numbers."""
    buf = io.StringIO()
    for section in _SECTION_ORDER:
        if section not in cfg:
            continue
        buf.write(f"[{section}]\n")
        for key in SCHEMA[section]:
            if key in cfg[section]:
                val = cfg[section][key]
                if isinstance(val, bool):
                    buf.write(f"{key} = {'true' if val else 'false'}\n")
                else:
                    buf.write(f"{key} = {val!r}\n")
        buf.write("\n")
    return buf.getvalue()


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]


def to_chain(cfg: dict) -> ChainConfig:
    """Build a ChainConfig from a parsed configuration dict."""
    base = ChainConfig(grid=FrequencyGrid.default())
    ifo_kw = dict(cfg.get("ifo", {}))
    ifo = replace(base.ifo, **ifo_kw) if ifo_kw else base.ifo

    sqz = dict(cfg.get("sqz", {}))
    ifcs = []
    for i in range(1, _MAX_IFC + 1):
        keys = [f"ifc{i}_{k}" for k in _IFC_KEYS]
        present = [k for k in keys if k in sqz]
        if not present:
            continue
        if len(present) != len(keys):
            raise ConfigError(f"incomplete ifc{i} group in [sqz]")
        ifcs.append(FilterCavityParams(*(sqz.pop(k) for k in keys)))
    squeezer = replace(base.squeezer, ifc_list=tuple(ifcs), **sqz)

    amp_cfg = dict(cfg.get("amp", {}))
    pump = PumpParams(
        p_source_w=amp_cfg.pop("p_source_w", base.pump.p_source_w),
        lambda0_m=amp_cfg.pop("lambda0_m", base.pump.lambda0_m))
    ofc = None
    if "ofc_length_m" in amp_cfg or "ofc_t_in_sq" in amp_cfg:
        needed = ("ofc_length_m", "ofc_t_in_sq", "ofc_roundtrip_loss",
                  "ofc_detuning_hz")
        missing = [k for k in needed if k not in amp_cfg]
        if missing:
            raise ConfigError(f"incomplete ofc group in [amp]: missing {missing}")
        ofc = FilterCavityParams(*(amp_cfg.pop(k) for k in needed))
    cmrr_db = amp_cfg.pop("cmrr_db", base.cmrr_db)
    cmrr_ref = amp_cfg.pop("cmrr_ref_hz", base.cmrr_ref_hz)
    rin_model = RinModel(floor=amp_cfg.pop("rin_floor", base.rin_model.floor),
                         corner_hz=amp_cfg.pop("rin_corner_hz",
                                               base.rin_model.corner_hz))
    if "mass_g" in amp_cfg:
        amp_cfg["mass_kg"] = amp_cfg.pop("mass_g") * 1e-3
    amp = replace(base.amp, **amp_cfg)

    coat = dict(cfg.get("coat", {}))
    beam_radius_m = coat.pop("beam_radius_mm", 5.0) * 1e-3
    stack = quarter_wave_stack(
        n_pairs=coat.pop("n_pairs", 12),
        lambda_m=pump.lambda0_m,
        n_substrate=coat.pop("n_substrate", 3.5),
        high={"n": coat.pop("n_high", 3.65), "phi": coat.pop("phi_high", 3e-5),
              "material": "aSi"},
        low={"n": coat.pop("n_low", 2.17), "phi": coat.pop("phi_low", 2e-5),
             "material": "SiN"})

    sus_cfg = dict(cfg.get("sus", {}))
    conv = {"mass_g": ("mass_kg", 1e-3),
            "fiber_width_um": ("fiber_width_m", 1e-6),
            "fiber_thickness_um": ("fiber_thickness_m", 1e-6),
            "surface_depth_um": ("surface_depth_m", 1e-6),
            "young_modulus_gpa": ("young_modulus_pa", 1e9)}
    for key, (target, scale) in conv.items():
        if key in sus_cfg:
            sus_cfg[target] = sus_cfg.pop(key) * scale
    suspension = replace(base.suspension, **sus_cfg)
    temperature = suspension.temperature_k

    run = dict(cfg.get("run", {}))
    grid = FrequencyGrid.default(run.pop("f_min_hz", 5.0),
                                 run.pop("f_max_hz", 1e4),
                                 run.pop("n_points", 1000))
    if not run.pop("ofc_on", True):
        ofc = None
    return ChainConfig(
        grid=grid, ifo=ifo, squeezer=squeezer, amp=amp, pump=pump, ofc=ofc,
        suspension=suspension, coating=stack, rin_model=rin_model,
        beam_radius_m=beam_radius_m, temperature_k=temperature,
        zeta0_rad=run.pop("zeta0_rad", 0.0), cmrr_db=cmrr_db,
        cmrr_ref_hz=cmrr_ref,
        amplifier_on=run.pop("amplifier_on", True),
        exact_io=run.pop("exact_io", True),
        seed=run.pop("seed", 0),
    )


def from_chain(c: ChainConfig) -> dict:
    """Express a ChainConfig as a configuration dict (round-trippable)."""
    cfg = {
        "ifo": {
            "arm_loss": c.ifo.arm_loss, "src_loss": c.ifo.src_loss,
            "readout_loss": c.ifo.readout_loss, "lambda_m": c.ifo.lambda_m,
            "mass_kg": c.ifo.mass_kg, "arm_length_m": c.ifo.arm_length_m,
            "arm_power_w": c.ifo.arm_power_w,
            "bandwidth_hz": c.ifo.bandwidth_hz,
        },
        "sqz": {
            "db": c.squeezer.db, "angle_rad": c.squeezer.angle_rad,
            "injection_loss": c.squeezer.injection_loss,
        },
        "amp": {
            "t_a": c.amp.t_a, "length_m": c.amp.length_m, "l1_m": c.amp.l1_m,
            "mass_g": c.amp.mass_kg * 1e3,
            "pend_freq_hz": c.amp.pend_freq_hz,
            "roundtrip_loss": c.amp.roundtrip_loss,
            "p_source_w": c.pump.p_source_w, "lambda0_m": c.pump.lambda0_m,
            "cmrr_db": c.cmrr_db, "cmrr_ref_hz": c.cmrr_ref_hz,
            "rin_floor": c.rin_model.floor,
            "rin_corner_hz": c.rin_model.corner_hz,
        },
        "coat": {
            "n_pairs": max(1, len(c.coating.layers) // 2),
            "n_substrate": c.coating.n_substrate,
            "beam_radius_mm": c.beam_radius_m * 1e3,
        },
        "sus": {
            "mass_g": c.suspension.mass_kg * 1e3,
            "temperature_k": c.suspension.temperature_k,
            "fiber_width_um": c.suspension.fiber_width_m * 1e6,
            "fiber_thickness_um": c.suspension.fiber_thickness_m * 1e6,
            "n_fibers": c.suspension.n_fibers,
            "pendulum_length_m": c.suspension.pendulum_length_m,
            "phi_surface": c.suspension.phi_surface,
            "phi_bulk": c.suspension.phi_bulk,
            "surface_depth_um": c.suspension.surface_depth_m * 1e6,
            "young_modulus_gpa": c.suspension.young_modulus_pa * 1e-9,
            "cte_per_k": c.suspension.cte_per_k,
            "dlogy_dt_per_k": c.suspension.dlogy_dt_per_k,
            "heat_capacity_j_kgk": c.suspension.heat_capacity_j_kgk,
            "conductivity_w_mk": c.suspension.conductivity_w_mk,
            "density_kg_m3": c.suspension.density_kg_m3,
        },
        "run": {
            "f_min_hz": float(c.grid.f_hz[0]),
            "f_max_hz": float(c.grid.f_hz[-1]),
            "n_points": c.grid.n, "seed": c.seed,
            "amplifier_on": c.amplifier_on, "exact_io": c.exact_io,
            "ofc_on": c.ofc is not None, "zeta0_rad": c.zeta0_rad,
        },
    }
    if c.coating.layers:
        cfg["coat"]["n_high"] = c.coating.layers[0].n
        cfg["coat"]["phi_high"] = c.coating.layers[0].phi_mech
        if len(c.coating.layers) > 1:
            cfg["coat"]["n_low"] = c.coating.layers[1].n
            cfg["coat"]["phi_low"] = c.coating.layers[1].phi_mech
    for i, fc in enumerate(c.squeezer.ifc_list, start=1):
        cfg["sqz"][f"ifc{i}_length_m"] = fc.length_m
        cfg["sqz"][f"ifc{i}_t_in_sq"] = fc.t_in_sq
        cfg["sqz"][f"ifc{i}_roundtrip_loss"] = fc.roundtrip_loss
        cfg["sqz"][f"ifc{i}_detuning_hz"] = fc.detuning_hz
    if c.ofc is not None:
        cfg["amp"]["ofc_length_m"] = c.ofc.length_m
        cfg["amp"]["ofc_t_in_sq"] = c.ofc.t_in_sq
        cfg["amp"]["ofc_roundtrip_loss"] = c.ofc.roundtrip_loss
        cfg["amp"]["ofc_detuning_hz"] = c.ofc.detuning_hz
    return cfg
