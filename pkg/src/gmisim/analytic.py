"""Closed-form response of the Grover-Michelson interferometer.

The coin couples the two mirror arms into a pair of phase-dependent cavities.
Everything here is expressed relative to the input amplitude, so fields are
dimensionless and powers are fractions of the input power.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    HBAR,
    C_LIGHT,
    ArmState,
    CarrierParams,
    DegeneratePointError,
    GroverCoinParams,
    GwSignal,
    ResonanceSingularityError,
    ValidationError,
    normalize_phase,
)

#: Guard on resonance denominators; smaller magnitudes are treated as singular.
EPS_SINGULAR = 1e-12


@dataclass(frozen=True)
class CavityFields:
    """Relative field amplitudes in the two coupled cavities."""

    e_n: complex
    e_e: complex

    @property
    def e_avg(self) -> complex:
        """Average cavity field (E_N - E_E)/2; the sign difference comes from
        one recirculating field reflecting off the coin back into its own
        cavity while the other transmits through."""
        return 0.5 * (self.e_n - self.e_e)


@dataclass(frozen=True)
class OutputFields:
    """Relative transmitted/reflected amplitudes and the output phase."""

    e_t: complex
    e_r: complex
    gamma: float

    @property
    def transmission(self) -> float:
        return abs(self.e_t) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.e_r) ** 2


@dataclass(frozen=True)
class FringeSolution:
    """Transmission extrema of a scan over phi_e at fixed phi_n.

    maxima hold genuine bright-fringe locations (phi_n + phi_e = 0 mod 2*pi);
    spurious_zeros hold the dark crossings at phi_e = 0 mod 2*pi.  When
    phi_n = 0 mod 2*pi the entire scan line is dark and all_spurious is set.
    """

    phi_n: float
    maxima: tuple
    spurious_zeros: tuple
    all_spurious: bool = False


def _one_minus_phasor(r: float, phi: float) -> complex:
    """1 - r e^{j phi} without cancellation near r = 1, phi = 0."""
    return complex(
        (1.0 - r) + 2.0 * r * math.sin(0.5 * phi) ** 2,
        -r * math.sin(phi),
    )


def _phasor_pair_deficit(r_a: float, p_a: float, r_b: float, p_b: float) -> complex:
    """(1 - r_a e^{j p_a}) + (1 - r_b e^{j p_b}), evaluated stably.

    The real parts are individually non-negative so micro-radian biases
    survive in full precision; for matched amplitudes the imaginary part uses
    the sum-to-product identity so antisymmetric phases cancel exactly.
    """
    d_a = _one_minus_phasor(r_a, p_a)
    d_b = _one_minus_phasor(r_b, p_b)
    re = d_a.real + d_b.real
    if r_a == r_b:
        im = -2.0 * r_a * math.sin(0.5 * (p_a + p_b)) * math.cos(0.5 * (p_a - p_b))
    else:
        im = d_a.imag + d_b.imag
    return complex(re, im)


def _coupling_denominator(coin: GroverCoinParams, arms: ArmState) -> complex:
    """2 - r2 e^{j phi2} (r_N e^{j phi_N} + r_E e^{j phi_E})."""
    return _phasor_pair_deficit(
        coin.r2 * arms.r_n, coin.phi2 + arms.phi_n,
        coin.r2 * arms.r_e, coin.phi2 + arms.phi_e,
    )


def cavity_fields(coin: GroverCoinParams, arms: ArmState) -> CavityFields:
    """Steady-state cavity amplitudes relative to the input field.

    Each cavity is driven through the coin and fed by both its own
    retro-reflection and the cross coupling through the second internal
    mirror; solving the coupled pair gives

        E_N = e^{j theta} (1 - r_E r_2 e^{j(phi_E + phi_2)}) / D
        E_E = e^{j theta} (1 - r_N r_2 e^{j(phi_N + phi_2)}) / D
        D   = 2 - r_2 e^{j phi_2} (r_N e^{j phi_N} + r_E e^{j phi_E})
    """
    den = _coupling_denominator(coin, arms)
    if abs(den) <= EPS_SINGULAR:
        raise ResonanceSingularityError(
            "coupled cavities are exactly resonant at bias "
            f"(phi_n={arms.phi_n!r}, phi_e={arms.phi_e!r}); "
            "the lossless steady state is unbounded"
        )
    pref = cmath.exp(1j * coin.theta)
    e_n = pref * _one_minus_phasor(arms.r_e * coin.r2, arms.phi_e + coin.phi2) / den
    e_e = pref * _one_minus_phasor(arms.r_n * coin.r2, arms.phi_n + coin.phi2) / den
    return CavityFields(e_n, e_e)


def output_fields_general(coin: GroverCoinParams, arms: ArmState) -> OutputFields:
    """Transmitted and reflected amplitudes for arbitrary coin parameters.

    The output is the superposition of the field returning from the first
    internal mirror and the field leaking back out of the coupled cavities;
    the two output ports differ only in the sign of the internal-mirror term.
    """
    den = _coupling_denominator(coin, arms)
    if abs(den) <= EPS_SINGULAR:
        raise ResonanceSingularityError(
            "coupled cavities are exactly resonant at bias "
            f"(phi_n={arms.phi_n!r}, phi_e={arms.phi_e!r})"
        )
    # Numerator rewritten as deficits from unity so the bright fringe comes
    # out exactly 1: r_N e^{j phi_N} + r_E e^{j phi_E} - 2 r2 r_N r_E e^{j Phi}
    # = -[(1 - r_N e^{j phi_N}) + (1 - r_E e^{j phi_E}) - 2 (1 - r2 r_N r_E e^{j Phi})]
    big_phi = coin.phi2 + arms.phi_n + arms.phi_e
    arm_deficit = _phasor_pair_deficit(arms.r_n, arms.phi_n, arms.r_e, arms.phi_e)
    loop_deficit = _one_minus_phasor(coin.r2 * arms.r_n * arms.r_e, big_phi)
    bracket = (arm_deficit - 2.0 * loop_deficit) / den
    recirc = cmath.exp(2j * coin.theta) * bracket
    m1 = coin.r1 * cmath.exp(1j * coin.phi1)
    e_t = 0.5 * (recirc + m1)
    e_r = 0.5 * (recirc - m1)
    # Output phase: recirculating branch referenced to the internal-mirror
    # branch.  For the pure coin with unit end mirrors this is the nonlinear
    # phase whose cosine gives the fringe.
    gamma = normalize_phase(cmath.phase(recirc) - cmath.phase(m1)) if coin.r1 > 0.0 \
        else normalize_phase(cmath.phase(recirc))
    return OutputFields(e_t, e_r, gamma)


def gamma_phase(phi_n: float, phi_e: float) -> float:
    """Nonlinear output phase of the ideal device, in (-pi, pi].

    gamma = atan2(sin T - sin phi_n - sin phi_e,
                  cos T - cos phi_n - cos phi_e + (1 + cos p)/2)

    with T = phi_n + phi_e and p = phi_n - phi_e.  Undefined when both
    phases vanish mod 2*pi.
    """
    pn = normalize_phase(phi_n)
    pe = normalize_phase(phi_e)
    if abs(pn) <= EPS_SINGULAR and abs(pe) <= EPS_SINGULAR:
        raise DegeneratePointError(
            "output phase is undefined when both round-trip phases vanish "
            f"mod 2*pi (phi_n={phi_n!r}, phi_e={phi_e!r})"
        )
    big = phi_n + phi_e
    num = math.sin(big) - math.sin(phi_n) - math.sin(phi_e)
    den = (
        math.cos(big) - math.cos(phi_n) - math.cos(phi_e)
        + 0.5 * (1.0 + math.cos(phi_n - phi_e))
    )
    return math.atan2(num, den)


def ideal_transmission(phi_n: float, phi_e: float) -> float:
    """Transmitted power fraction cos^2(gamma/2) of the ideal device."""
    return math.cos(0.5 * gamma_phase(phi_n, phi_e)) ** 2


def transmission_extrema(phi_n: float) -> FringeSolution:
    """Locate bright fringes and spurious dark crossings of a phi_e scan.

    The extremum condition factors as
    sin(phi_n/2) * sin(phi_e/2) * sin((phi_n + phi_e)/2) = 0: the last factor
    gives the genuine maxima at phi_e = -phi_n mod 2*pi, the first two are
    dark crossings where the cavity return cancels the internal-mirror path.
    """
    if not math.isfinite(phi_n):
        raise ValidationError(f"phi_n must be finite, got {phi_n!r}")
    pn = normalize_phase(phi_n)
    if abs(pn) <= EPS_SINGULAR:
        # Whole scan line is dark: the would-be maximum coincides with the
        # spurious factor.
        return FringeSolution(phi_n=pn, maxima=(), spurious_zeros=(0.0,),
                              all_spurious=True)
    return FringeSolution(
        phi_n=pn,
        maxima=(normalize_phase(-phi_n),),
        spurious_zeros=(0.0,),
    )


def power_gain(theta_b: float, reflectance: float) -> float:
    """Broadband cavity power-enhancement factor at bias phi_n = -phi_e = theta_b.

        G = R sin^2(theta) / (2 + 2 R cos^2(theta) - 4 R cos(theta))

    For R = 1 this reduces to (1 + cos theta) / (2 (1 - cos theta)).
    """
    if not (0.0 <= reflectance <= 1.0):
        raise ValidationError(f"reflectance must lie in [0, 1], got {reflectance!r}")
    # Factored denominator 2[(1 - cos)(1 - R cos) + cos (1 - R)] avoids the
    # catastrophic cancellation of the textbook form at micro-radian biases.
    c = math.cos(theta_b)
    one_minus_c = 2.0 * math.sin(0.5 * theta_b) ** 2
    one_minus_rc = (1.0 - reflectance) + reflectance * one_minus_c
    den = 2.0 * (one_minus_c * one_minus_rc + c * (1.0 - reflectance))
    if den <= 0.0:
        raise ResonanceSingularityError(
            f"gain diverges at theta_b={theta_b!r} with R={reflectance!r}: "
            "bias sits exactly on the cavity resonance"
        )
    return reflectance * math.sin(theta_b) ** 2 / den


def bias_for_gain(gain: float) -> float:
    """Bias angle achieving a target power gain for unit-reflectance mirrors.

    Inverts G = (1 + cos theta)/(2 (1 - cos theta)) as
    theta = arccos((2 G - 1)/(2 G + 1)).
    """
    if not (gain > 0.0 and math.isfinite(gain)):
        raise ValidationError(f"target gain must be positive, got {gain!r}")
    # arccos((2G-1)/(2G+1)) in the half-angle form, stable for large G
    return 2.0 * math.asin(math.sqrt(1.0 / (2.0 * gain + 1.0)))


def gw_phase_modulation(gw: GwSignal, carrier: CarrierParams, length: float) -> float:
    """Phase-modulation envelope accumulated over a one-way path [rad].

        delta_phi = (h0 omega0 / omega_gw) sin(omega_gw L / (2 c))

    The full time dependence carries cos(omega_gw t + phase - omega_gw L / c);
    only the envelope matters for transfer functions.
    """
    if length <= 0.0:
        raise ValidationError(f"path length must be positive, got {length!r}")
    return (
        gw.h0 * carrier.omega0 / gw.omega
        * math.sin(gw.omega * length / (2.0 * C_LIGHT))
    )


def gw_modulation_phase(gw: GwSignal, length: float, t: float = 0.0) -> float:
    """Instantaneous phase of the modulation cosine at time t."""
    return gw.omega * t + gw.phase - gw.omega * length / C_LIGHT


def gm_transfer_function(carrier: CarrierParams, arms: ArmState,
                         e_c_mag: float, f_gw: float) -> float:
    """Detector power per unit strain [W/h].

        T = P0 |E_c| (omega0/omega_gw) sin(k0 d_off) sin(omega_gw Lbar / c)

    With |E_c| = 1 this is the plain-Michelson baseline; the coupled-cavity
    device is the same response scaled by the average cavity field.  Zeros of
    the last sine are genuine notches, returned as 0.
    """
    if not f_gw > 0.0:
        raise ValidationError(f"frequency must be positive, got {f_gw!r}")
    omega_gw = 2.0 * math.pi * f_gw
    return abs(
        carrier.power * e_c_mag * (carrier.omega0 / omega_gw)
        * math.sin(carrier.k0 * arms.offset)
        * math.sin(omega_gw * arms.mean_length / C_LIGHT)
    )


def transfer_notch_frequency(mean_length: float, order: int = 1) -> float:
    """Frequency of the n-th transfer-function notch, f = n c / (2 Lbar)."""
    return order * C_LIGHT / (2.0 * mean_length)


def _notch_order(mean_length: float, f_gw: float) -> float:
    """Distance of f_gw from the nearest transfer notch, in notch units."""
    x = 2.0 * mean_length * f_gw / C_LIGHT
    return x - round(x)


def gm_nsr(carrier: CarrierParams, gain: float, mean_length: float,
           f_gw: float) -> float:
    """Shot-noise-limited noise-to-signal ratio [strain/sqrt(Hz)].

        NSR = sqrt(2 hbar / (omega0 P0 G)) * omega_gw / sin(omega_gw Lbar / c)

    Gain G = 1 gives the plain-Michelson baseline.  At transfer-function
    notches the ratio diverges; math.inf is returned as the divergence
    marker instead of raising.
    """
    if not gain > 0.0:
        raise ValidationError(f"gain must be positive, got {gain!r}")
    if not f_gw > 0.0:
        raise ValidationError(f"frequency must be positive, got {f_gw!r}")
    if carrier.power <= 0.0:
        raise ValidationError("carrier power must be positive for a noise ratio")
    x = 2.0 * mean_length * f_gw / C_LIGHT
    if round(x) >= 1 and abs(_notch_order(mean_length, f_gw)) <= 1e-9 * max(1.0, abs(x)):
        return math.inf
    omega_gw = 2.0 * math.pi * f_gw
    sine = math.sin(omega_gw * mean_length / C_LIGHT)
    if sine == 0.0:
        return math.inf
    return abs(
        math.sqrt(2.0 * HBAR / (carrier.omega0 * carrier.power * gain))
        * omega_gw / sine
    )


_PORTS = ("a", "b", "c", "d")


def grover_matrix() -> np.ndarray:
    """4x4 coin matrix: -1/2 on the diagonal, +1/2 elsewhere."""
    return 0.5 * (np.ones((4, 4)) - 2.0 * np.eye(4))


def grover_scatter(input_port: str) -> np.ndarray:
    """Output amplitudes over ports (a, b, c, d) for a unit input."""
    if input_port not in _PORTS:
        raise ValidationError(
            f"unknown port {input_port!r}; expected one of {_PORTS}"
        )
    return grover_matrix()[:, _PORTS.index(input_port)]
