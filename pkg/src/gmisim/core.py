"""Shared domain types, physical constants, and unit conventions.

All phases are radians internally; degrees appear only at the config/CLI
boundary.  Arm biases are stored as explicit tunings on top of macroscopic
lengths so that picometre-scale offsets never cancel against kilometre-scale
paths in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Speed of light [m/s].
C_LIGHT = 299792458.0

#: Reduced Planck constant [J s].
HBAR = 1.054571817e-34

TWO_PI = 2.0 * math.pi


class ValidationError(ValueError):
    """A parameter record or input violates its physical constraints."""


class ResonanceSingularityError(ArithmeticError):
    """A lossless configuration sits exactly on a cavity resonance.

    The steady-state field there is unbounded; callers must detune the bias
    or add loss rather than expect a finite answer.
    """


class DegeneratePointError(ArithmeticError):
    """Both arm phases vanish mod 2*pi, where the output phase is undefined."""


def normalize_phase(x: float) -> float:
    """Reduce an angle to the principal interval (-pi, pi]."""
    if not math.isfinite(x):
        raise ValidationError(f"phase must be finite, got {x!r}")
    r = math.remainder(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


def degrees_to_roundtrip_phase(deg: float) -> float:
    """Convert a bias quoted in degrees into radians of round-trip phase."""
    if not math.isfinite(deg):
        raise ValidationError(f"angle must be finite, got {deg!r}")
    return deg * math.pi / 180.0


@dataclass(frozen=True)
class CarrierParams:
    """Input carrier: wavelength [m] and power [W]."""

    wavelength: float = 1.064e-6
    power: float = 125.0

    def __post_init__(self):
        if not (self.wavelength > 0.0 and math.isfinite(self.wavelength)):
            raise ValidationError(f"wavelength must be positive, got {self.wavelength!r}")
        if not (self.power >= 0.0 and math.isfinite(self.power)):
            raise ValidationError(f"power must be non-negative, got {self.power!r}")

    @property
    def omega0(self) -> float:
        """Angular frequency [rad/s]."""
        return TWO_PI * C_LIGHT / self.wavelength

    @property
    def k0(self) -> float:
        """Wavenumber [rad/m]."""
        return TWO_PI / self.wavelength


@dataclass(frozen=True)
class MirrorParams:
    """Power reflectance/transmittance/loss budget of one mirror surface."""

    reflectance: float
    transmittance: float = 0.0
    loss: float = 0.0
    tuning: float = 0.0  # one-way phase [rad]; reflections pick up twice this

    def __post_init__(self):
        for name in ("reflectance", "transmittance", "loss"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")
        residual = self.reflectance + self.transmittance + self.loss - 1.0
        if abs(residual) > 1e-12:
            raise ValidationError(
                "power budget R + T + loss must equal 1: residual "
                f"{residual:+.3e} for R={self.reflectance!r}, "
                f"T={self.transmittance!r}, loss={self.loss!r}"
            )

    @property
    def r(self) -> float:
        """Amplitude reflectance sqrt(R)."""
        return math.sqrt(self.reflectance)

    @property
    def t(self) -> float:
        """Amplitude transmittance sqrt(T)."""
        return math.sqrt(self.transmittance)


def validate_mirror(reflectance: float, transmittance: float, loss: float,
                    tuning: float = 0.0) -> MirrorParams:
    """Build MirrorParams, enforcing the unit power budget."""
    return MirrorParams(reflectance, transmittance, loss, tuning)


def mirror_from_loss(transmittance: float = 0.0, loss: float = 0.0,
                     tuning: float = 0.0) -> MirrorParams:
    """Mirror with reflectance taking up the rest of the power budget."""
    return MirrorParams(1.0 - transmittance - loss, transmittance, loss, tuning)


@dataclass(frozen=True)
class GroverCoinParams:
    """Internal state of the two-splitter coin.

    r1/phi1 and r2/phi2 are the internal mirror amplitude reflectances and
    round-trip phases; theta is the one-way phase between the two splitters.
    The pure coin has r1*e^{j*phi1} = r2*e^{j*phi2} = e^{j*theta} = 1.
    """

    r1: float = 1.0
    phi1: float = 0.0
    r2: float = 1.0
    phi2: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def is_pure(self) -> bool:
        return (
            self.r1 == 1.0 and self.r2 == 1.0
            and normalize_phase(self.phi1) == 0.0
            and normalize_phase(self.phi2) == 0.0
            and normalize_phase(self.theta) == 0.0
        )


#: Pure Grover coin (all internal phasors equal to 1).
PURE_COIN = GroverCoinParams()


@dataclass(frozen=True)
class ArmState:
    """End-mirror reflectances and round-trip phases of the two arms.

    phi_n/phi_e are the full round-trip phases (macroscopic 2*k0*L plus bias
    tuning); offset is the one-way DC-offset length [m] used by the
    transfer-function formulas.
    """

    phi_n: float
    phi_e: float
    r_n: float = 1.0
    r_e: float = 1.0
    length_n: float = 4000.0
    length_e: float = 4000.0
    offset: float = 0.0

    def __post_init__(self):
        if not (self.length_n > 0.0 and self.length_e > 0.0):
            raise ValidationError("arm lengths must be positive")
        for name in ("r_n", "r_e"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def mean_length(self) -> float:
        """Common arm length (L_N + L_E) / 2 [m]."""
        return 0.5 * (self.length_n + self.length_e)

    @property
    def phase_sum(self) -> float:
        """Theta = phi_n + phi_e, principal value."""
        return normalize_phase(self.phi_n + self.phi_e)

    @property
    def phase_diff(self) -> float:
        """phi = phi_n - phi_e, principal value."""
        return normalize_phase(self.phi_n - self.phi_e)


@dataclass(frozen=True)
class GwSignal:
    """Plus-polarized strain wave: amplitude, angular frequency, phase."""

    h0: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if self.h0 < 0.0:
            raise ValidationError(f"strain amplitude must be non-negative, got {self.h0!r}")
        if not self.omega > 0.0:
            raise ValidationError(f"angular frequency must be positive, got {self.omega!r}")

    @property
    def k(self) -> float:
        """Wavenumber omega/c [rad/m]."""
        return self.omega / C_LIGHT


@dataclass(frozen=True)
class FrequencySweep:
    """Frequency grid specification [Hz]."""

    f_min: float
    f_max: float
    points: int = 200
    spacing: str = "log"
    extra: tuple = field(default=())  # extra frequencies merged into the grid

    def __post_init__(self):
        if not (0.0 < self.f_min < self.f_max):
            raise ValidationError(
                f"need 0 < f_min < f_max, got ({self.f_min!r}, {self.f_max!r})"
            )
        if self.points < 2:
            raise ValidationError(f"need at least 2 points, got {self.points!r}")
        if self.spacing not in ("log", "linear"):
            raise ValidationError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")

    def grid(self) -> np.ndarray:
        """Strictly increasing frequency grid."""
        if self.spacing == "log":
            g = np.geomspace(self.f_min, self.f_max, self.points)
        else:
            g = np.linspace(self.f_min, self.f_max, self.points)
        if self.extra:
            inside = [f for f in self.extra if self.f_min <= f <= self.f_max]
            g = np.unique(np.concatenate([g, np.asarray(inside, dtype=float)]))
        return g
