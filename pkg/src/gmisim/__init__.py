"""Frequency-domain simulator and analytic toolkit for coin-based
(Grover-Michelson) and conventional laser interferometers."""

from .core import (
    ArmState,
    CarrierParams,
    FrequencySweep,
    GroverCoinParams,
    GwSignal,
    MirrorParams,
    PURE_COIN,
    ResonanceSingularityError,
    ValidationError,
    degrees_to_roundtrip_phase,
    normalize_phase,
    validate_mirror,
)
from .analytic import (
    CavityFields,
    FringeSolution,
    OutputFields,
    bias_for_gain,
    cavity_fields,
    gamma_phase,
    gm_nsr,
    gm_transfer_function,
    grover_scatter,
    gw_phase_modulation,
    ideal_transmission,
    output_fields_general,
    power_gain,
    transfer_notch_frequency,
    transmission_extrema,
)
from .network import (
    BeamSplitter,
    Detector,
    FieldState,
    InjectionSpec,
    Laser,
    Mirror,
    OpticalNetwork,
    SidebandState,
    Space,
)
from .noise import BudgetRecord, NoiseASD, compose_budget, ctn_strain_asd, project_laser_noise
from .presets import build_aligo, build_gmi, build_gmi_recycled, build_mi
from .response import (
    SpectrumRecord,
    gw_transfer_spectrum,
    laser_noise_tf,
    nsr_spectrum,
    power_budget,
    shot_noise_asd,
    validate_against_analytic,
)
from .scenario import ScenarioConfig, parse_scenario
from .runner import find_bias, run_sweep

__version__ = "0.1.0"
