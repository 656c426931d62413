"""Strain-referred noise curves: sampled ASDs, coating thermal noise, budgets.

Curves are exchanged as amplitude spectral densities; power spectral
densities are accepted with an explicit flag and square-rooted on ingest.
Interpolation is linear in log-log space, which is exact on power laws.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ValidationError

#: Units a curve may declare, and the transfer kind each one projects with.
ASD_UNITS = ("Hz/rtHz", "W/rtHz", "m/rtHz", "strain/rtHz")

UNIT_TO_TRANSFER = {"Hz/rtHz": "frequency", "W/rtHz": "intensity"}


class OutOfBandWarning(UserWarning):
    """A curve was queried outside its sampled support and clamped."""


@dataclass(frozen=True)
class NoiseASD:
    """Sampled noise amplitude spectral density with log-log interpolation."""

    name: str
    frequencies: np.ndarray
    values: np.ndarray
    unit: str = "strain/rtHz"

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "values", vals)
        if self.unit not in ASD_UNITS:
            raise ValidationError(
                f"unknown ASD unit {self.unit!r}; expected one of {ASD_UNITS}"
            )
        if freqs.ndim != 1 or len(freqs) < 1 or freqs.shape != vals.shape:
            raise ValidationError("ASD needs matching 1-d frequency/value arrays")
        if not (freqs > 0).all():
            raise ValidationError("ASD frequencies must be positive")
        if len(freqs) > 1 and not (np.diff(freqs) > 0).all():
            raise ValidationError("ASD frequencies must be strictly increasing")
        if not (vals >= 0).all():
            raise ValidationError("ASD values must be non-negative")

    @classmethod
    def from_psd(cls, name, frequencies, psd_values, unit="strain/rtHz"):
        """Ingest a power spectral density, square-rooting to an ASD."""
        return cls(name, np.asarray(frequencies, float),
                   np.sqrt(np.asarray(psd_values, float)), unit)

    def __call__(self, f) -> np.ndarray:
        """Interpolate at frequency f [Hz]; out-of-band queries clamp to the
        nearest sample with a warning rather than extrapolating."""
        f = np.asarray(f, dtype=float)
        if np.any(f <= 0):
            raise ValidationError("query frequencies must be positive")
        lo, hi = self.frequencies[0], self.frequencies[-1]
        if np.any(f < lo) or np.any(f > hi):
            warnings.warn(
                f"ASD {self.name!r} queried outside [{lo:g}, {hi:g}] Hz; "
                "clamping to the nearest sample",
                OutOfBandWarning,
                stacklevel=2,
            )
        fc = np.clip(f, lo, hi)
        if len(self.frequencies) == 1:
            out = np.full_like(fc, self.values[0])
        else:
            # zeros cannot ride through the log; patch them afterwards
            with np.errstate(divide="ignore"):
                logv = np.log(self.values)
            out = np.exp(np.interp(np.log(fc), np.log(self.frequencies), logv))
            out = np.where(np.isfinite(out), out, 0.0)
        return out if out.ndim else float(out)

    # -- file exchange ----------------------------------------------------

    def write(self, path):
        """Two-column CSV with the unit on a comment line; floats as repr so
        a read round-trips bit-exactly."""
        lines = [f"# unit: {self.unit}", "frequency_hz,asd"]
        lines += [f"{float(f)!r},{float(v)!r}"
                  for f, v in zip(self.frequencies, self.values)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path):
        path = Path(path)
        unit = "strain/rtHz"
        freqs, vals = [], []
        header_seen = False
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("unit:"):
                    unit = body[5:].strip()
                continue
            if not header_seen:
                if line.replace(" ", "") != "frequency_hz,asd":
                    raise ValidationError(
                        f"{path}:{lineno}: expected header 'frequency_hz,asd', "
                        f"got {line!r}"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected two columns")
            try:
                freqs.append(float(parts[0]))
                vals.append(float(parts[1]))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if not header_seen:
            raise ValidationError(f"{path}: missing 'frequency_hz,asd' header")
        return cls(path.stem, np.asarray(freqs), np.asarray(vals), unit)


def ctn_strain_asd(f, cavity_length: float):
    """Coating-plus-substrate thermal noise as strain ASD [1/rtHz].

    Displacement ASD 1.13e-20 * (100 Hz / f)^0.45 m/rtHz, referred to strain
    by the cavity length; the single-mirror to differential-motion transfer
    ratio is taken as unity.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValidationError("frequency must be positive")
    if cavity_length <= 0:
        raise ValidationError("cavity length must be positive")
    out = 1.13e-20 * (100.0 / f) ** 0.45 / cavity_length
    return out if out.ndim else float(out)


def ctn_curve(frequencies, cavity_length: float) -> NoiseASD:
    return NoiseASD("coating_thermal", np.asarray(frequencies, float),
                    ctn_strain_asd(frequencies, cavity_length))


def project_laser_noise(asd: NoiseASD, tf_mags, gw_tf_mags,
                        frequencies) -> NoiseASD:
    """Refer a laser-noise curve to strain: asd(f) * |tf(f)| / |gw_tf(f)|.

    tf_mags must answer the unit's transfer kind (frequency noise with a
    Hz/rtHz curve, intensity with W/rtHz); rows where the signal transfer
    vanishes get an infinite strain contribution.
    """
    if asd.unit not in UNIT_TO_TRANSFER:
        raise ValidationError(
            f"cannot project a curve in {asd.unit!r}; need one of "
            f"{sorted(UNIT_TO_TRANSFER)}"
        )
    frequencies = np.asarray(frequencies, dtype=float)
    tf_mags = np.asarray(tf_mags, dtype=float)
    gw_tf_mags = np.asarray(gw_tf_mags, dtype=float)
    if not (frequencies.shape == tf_mags.shape == gw_tf_mags.shape):
        raise ValidationError("frequency grid and transfer arrays must align")
    source = asd(frequencies)
    with np.errstate(divide="ignore", invalid="ignore"):
        strain = np.where(gw_tf_mags > 0.0, source * tf_mags / gw_tf_mags, np.inf)
    strain = np.where(source * tf_mags == 0.0, 0.0, strain)
    return NoiseASD(asd.name, frequencies, strain)


@dataclass(frozen=True)
class BudgetRecord:
    """Per-frequency strain contributions by source plus their quadrature sum."""

    frequencies: np.ndarray
    contributions: dict
    total: np.ndarray = field(default=None)

    def __post_init__(self):
        # accumulate in name order so the total is independent of the order
        # the contributions were supplied in
        tot = np.zeros_like(np.asarray(self.frequencies, dtype=float))
        for name in sorted(self.contributions):
            tot = tot + np.asarray(self.contributions[name], float) ** 2
        object.__setattr__(self, "total", np.sqrt(tot))


def compose_budget(contributions: list[NoiseASD],
                   frequencies=None) -> BudgetRecord:
    """Root-sum-square a set of strain-referred curves on a common grid."""
    if not contributions:
        raise ValidationError("budget needs at least one contribution")
    for c in contributions:
        if c.unit != "strain/rtHz":
            raise ValidationError(
                f"budget contributions must be strain-referred; {c.name!r} "
                f"is in {c.unit!r}"
            )
    if frequencies is None:
        frequencies = contributions[0].frequencies
    frequencies = np.asarray(frequencies, dtype=float)
    cols = {c.name: c(frequencies) for c in contributions}
    return BudgetRecord(frequencies, cols)
