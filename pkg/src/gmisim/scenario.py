"""Scenario configuration: TOML parsing, defaults, provenance, presets.

Angle conventions at this boundary: the arm bias values phi_n_deg/phi_e_deg
are round-trip phases in degrees of the antisymmetric operating point.  Any
deviation of phi_e_deg from -phi_n_deg, and the explicit delta_off_deg key,
is a DC offset realized as an end-mirror displacement: being a one-way
tuning, it contributes TWICE its value to that arm's round-trip phase, and
corresponds to the one-way length deg*(pi/180)/k0.  This is the convention
under which the published steady-state power levels of the reference
operating point reproduce.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import (
    CarrierParams,
    FrequencySweep,
    GroverCoinParams,
    ValidationError,
    degrees_to_roundtrip_phase as d2r,
)
from .presets import build_aligo, build_gmi, build_gmi_recycled, build_mi

PRESETS = ("gmi", "mi", "aligo-simplified", "gmi-pr", "gmi-sr", "gmi-dr")

MODES = ("transmission", "transfer", "nsr", "power", "noise-budget",
         "validate", "find-bias")


@dataclass
class ScenarioConfig:
    """Fully resolved run configuration; all angles in degrees here."""

    preset: str = "gmi"
    # carrier
    wavelength_nm: float = 1064.0
    power_w: float = 125.0
    # arm bias (round-trip degrees; see module docstring for the offset rule)
    phi_n_deg: float = 0.06
    phi_e_deg: float = -0.06
    delta_off_deg: float = 0.0
    # coin internals (round-trip degrees for the mirrors, one-way for theta)
    phi1_deg: float = 0.0
    phi2_deg: float = 0.0
    theta_deg: float = 0.0
    coin_r1: float = 1.0
    coin_r2: float = 1.0
    # arms and mirrors
    arm_length_m: float = 4000.0
    end_transmittance: float = 0.0
    end_loss: float = 0.0
    coin_mirror_transmittance: float = 0.0
    coin_mirror_loss: float = 0.0
    bs_loss: float = 0.0
    # recycling
    prm_transmittance: float = 0.03
    srm_transmittance: float = 0.20
    itm_transmittance: float = 0.014
    component_loss: float = 1e-8
    etm_relative_phase_deg: float = 180.0 - 0.00025
    prm_tuning_deg: float = 0.0
    srm_tuning_deg: float = 0.0
    gmi_prm_transmittance: float = 0.001
    # frequency sweep
    f_min_hz: float = 1.0
    f_max_hz: float = 1.0e4
    sweep_points: int = 200
    sweep_spacing: str = "log"
    include_notches: bool = False
    # transmission mode
    transmission_phi_n_deg: tuple = (12.0, 32.0, 52.0)
    transmission_points: int = 721
    # noise-budget mode
    frequency_noise_asd: str = ""
    intensity_noise_asd: str = ""
    include_ctn: bool = True
    include_shot: bool = True
    # find-bias mode
    find_bias_target: str = "gain"
    target_gain: float = 1.0e6
    target_nsr: float = 1.0e-22
    target_frequency_hz: float = 100.0
    # bookkeeping
    provenance: dict = field(default_factory=dict)

    # ------------------------------------------------------------------

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValidationError(
                f"unknown preset {self.preset!r}; expected one of {PRESETS}"
            )
        if self.power_w < 0 or self.wavelength_nm <= 0:
            raise ValidationError("carrier needs positive wavelength and power >= 0")
        if self.arm_length_m <= 0:
            raise ValidationError("arm length must be positive")
        if self.find_bias_target not in ("gain", "nsr-at-frequency"):
            raise ValidationError(
                "find_bias target must be 'gain' or 'nsr-at-frequency', got "
                f"{self.find_bias_target!r}"
            )

    def carrier(self) -> CarrierParams:
        return CarrierParams(self.wavelength_nm * 1e-9, self.power_w)

    def coin(self) -> GroverCoinParams:
        return GroverCoinParams(
            r1=self.coin_r1, phi1=d2r(self.phi1_deg),
            r2=self.coin_r2, phi2=d2r(self.phi2_deg),
            theta=d2r(self.theta_deg),
        )

    @property
    def offset_deg(self) -> float:
        """Total DC offset in one-way tuning degrees."""
        return -(self.phi_n_deg + self.phi_e_deg) + self.delta_off_deg

    def roundtrip_phases(self) -> tuple[float, float]:
        """Resolved round-trip arm phases [rad]; the offset doubles."""
        phi_n = d2r(self.phi_n_deg)
        phi_e = -phi_n - 2.0 * d2r(self.offset_deg)
        return phi_n, phi_e

    def offset_length(self) -> float:
        """One-way DC offset length [m] entering the transfer formulas."""
        return d2r(self.offset_deg) / self.carrier().k0

    def sweep(self) -> FrequencySweep:
        extra = ()
        if self.include_notches:
            c = 299792458.0
            first = c / (2.0 * self.arm_length_m)
            n_max = int(self.f_max_hz / first) + 1
            extra = tuple(n * first for n in range(1, n_max + 1)
                          if self.f_min_hz <= n * first <= self.f_max_hz)
        return FrequencySweep(self.f_min_hz, self.f_max_hz, self.sweep_points,
                              self.sweep_spacing, extra=extra)

    def build_network(self, phi_n: float | None = None,
                      phi_e: float | None = None, corrupt: bool = False):
        """Instantiate the preset's optical network at the resolved bias."""
        if phi_n is None or phi_e is None:
            phi_n, phi_e = self.roundtrip_phases()
        if self.preset == "mi":
            return build_mi(self.power_w, self.arm_length_m, phi_n, phi_e,
                            self.end_transmittance, self.end_loss, self.bs_loss)
        if self.preset == "gmi":
            return build_gmi(self.power_w, self.arm_length_m, phi_n, phi_e,
                             self.coin(), self.end_transmittance, self.end_loss,
                             self.coin_mirror_transmittance,
                             self.coin_mirror_loss, self.bs_loss,
                             corrupt=corrupt)
        if self.preset == "aligo-simplified":
            return build_aligo(self.power_w, self.arm_length_m,
                               self.prm_transmittance, self.srm_transmittance,
                               self.itm_transmittance, self.component_loss,
                               math.radians(180.0 - self.etm_relative_phase_deg),
                               d2r(self.prm_tuning_deg) / 2.0,
                               d2r(self.srm_tuning_deg) / 2.0)
        kind = self.preset.split("-")[1]
        return build_gmi_recycled(
            kind, self.power_w, self.arm_length_m, phi_n, phi_e, self.coin(),
            self.end_transmittance, self.end_loss, self.coin_mirror_loss,
            self.bs_loss,
            prm_transmittance=(self.gmi_prm_transmittance if kind == "pr"
                               else self.prm_transmittance),
            srm_transmittance=self.srm_transmittance,
            recycling_loss=self.component_loss,
            prm_tuning=d2r(self.prm_tuning_deg) / 2.0,
            srm_tuning=d2r(self.srm_tuning_deg) / 2.0,
        )

    def resolved(self) -> dict:
        """Plain-value view of every setting, for run metadata."""
        out = {}
        for f in fields(self):
            if f.name == "provenance":
                continue
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


# Mapping from config-file sections/keys to ScenarioConfig attributes.
_KEY_MAP = {
    ("", "preset"): "preset",
    ("carrier", "wavelength_nm"): "wavelength_nm",
    ("carrier", "power_w"): "power_w",
    ("bias", "phi_n_deg"): "phi_n_deg",
    ("bias", "phi_e_deg"): "phi_e_deg",
    ("bias", "delta_off_deg"): "delta_off_deg",
    ("bias", "phi1_deg"): "phi1_deg",
    ("bias", "phi2_deg"): "phi2_deg",
    ("bias", "theta_deg"): "theta_deg",
    ("coin", "r1"): "coin_r1",
    ("coin", "r2"): "coin_r2",
    ("coin", "mirror_transmittance"): "coin_mirror_transmittance",
    ("coin", "mirror_loss"): "coin_mirror_loss",
    ("coin", "bs_loss"): "bs_loss",
    ("arms", "length_m"): "arm_length_m",
    ("arms", "end_transmittance"): "end_transmittance",
    ("arms", "end_loss"): "end_loss",
    ("recycling", "prm_transmittance"): "prm_transmittance",
    ("recycling", "srm_transmittance"): "srm_transmittance",
    ("recycling", "itm_transmittance"): "itm_transmittance",
    ("recycling", "component_loss"): "component_loss",
    ("recycling", "etm_relative_phase_deg"): "etm_relative_phase_deg",
    ("recycling", "prm_tuning_deg"): "prm_tuning_deg",
    ("recycling", "srm_tuning_deg"): "srm_tuning_deg",
    ("recycling", "gmi_prm_transmittance"): "gmi_prm_transmittance",
    ("sweep", "f_min_hz"): "f_min_hz",
    ("sweep", "f_max_hz"): "f_max_hz",
    ("sweep", "points"): "sweep_points",
    ("sweep", "spacing"): "sweep_spacing",
    ("sweep", "include_notches"): "include_notches",
    ("transmission", "phi_n_deg"): "transmission_phi_n_deg",
    ("transmission", "points"): "transmission_points",
    ("noise", "frequency_asd"): "frequency_noise_asd",
    ("noise", "intensity_asd"): "intensity_noise_asd",
    ("noise", "include_ctn"): "include_ctn",
    ("noise", "include_shot"): "include_shot",
    ("find_bias", "target"): "find_bias_target",
    ("find_bias", "gain"): "target_gain",
    ("find_bias", "nsr"): "target_nsr",
    ("find_bias", "frequency_hz"): "target_frequency_hz",
}

_FLOAT_FIELDS = {
    attr for (_, _), attr in _KEY_MAP.items()
    if attr not in ("preset", "sweep_spacing", "include_notches", "sweep_points",
                    "transmission_phi_n_deg", "transmission_points",
                    "frequency_noise_asd", "intensity_noise_asd",
                    "include_ctn", "include_shot", "find_bias_target")
}


def _assign(values: dict, provenance: dict, section: str, key: str, value,
            origin: str):
    attr = _KEY_MAP.get((section, key))
    if attr is None:
        where = f"[{section}] {key}" if section else key
        raise ValidationError(f"unknown configuration key: {where}")
    if attr == "transmission_phi_n_deg":
        if not isinstance(value, (list, tuple)) or not value:
            raise ValidationError("transmission.phi_n_deg must be a non-empty list")
        value = tuple(float(v) for v in value)
    elif attr in ("sweep_points", "transmission_points"):
        value = int(value)
    elif attr in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{section}.{key} must be a number, got {value!r}")
        value = float(value)
    values[attr] = value
    provenance[attr] = origin


def parse_scenario(path=None, overrides: list[str] | None = None,
                   preset: str | None = None) -> ScenarioConfig:
    """Load a scenario from a TOML file plus command-line overrides.

    Every resolved value remembers where it came from (default, file, or
    override) for the run metadata.  Unknown keys and malformed values are
    rejected; TOML syntax errors surface with their line number.
    """
    values: dict = {}
    provenance: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except FileNotFoundError:
            raise ValidationError(f"config file not found: {path}")
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"config syntax error in {path}: {exc}")
        for section, content in doc.items():
            if isinstance(content, dict):
                for key, value in content.items():
                    _assign(values, provenance, section, key, value, "file")
            else:
                _assign(values, provenance, "", section, content, "file")
    if preset is not None:
        _assign(values, provenance, "", "preset", preset, "override")
    for item in overrides or ():
        if "=" not in item:
            raise ValidationError(f"override must look like section.key=value: {item!r}")
        dotted, _, raw = item.partition("=")
        parts = dotted.strip().split(".")
        if len(parts) == 1:
            section, key = "", parts[0]
        elif len(parts) == 2:
            section, key = parts
        else:
            raise ValidationError(f"override key too deep: {dotted!r}")
        try:
            value = tomllib.loads(f"v = {raw.strip()}")["v"]
        except tomllib.TOMLDecodeError:
            value = raw.strip()
        _assign(values, provenance, section, key, value, "override")
    config = ScenarioConfig(**values)
    full_prov = {f.name: provenance.get(f.name, "default")
                 for f in fields(config) if f.name != "provenance"}
    config.provenance = full_prov
    return config
