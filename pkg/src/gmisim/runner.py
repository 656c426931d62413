"""Run modes: sweeps to CSV plus JSON metadata, validation, bias search.

Output files are byte-deterministic: floats are written with repr (shortest
round-trip form), infinities as the literal token `inf`, and metadata JSON
with sorted keys and no timestamps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .analytic import bias_for_gain, gm_nsr, power_gain, transfer_notch_frequency
from .core import FrequencySweep, ValidationError
from .network import COND_WARN, SOLVE_TOL, InjectionSpec
from .noise import NoiseASD, compose_budget, ctn_curve, project_laser_noise
from .presets import LOSS_FLOOR
from .response import (
    gw_arm_mean_length,
    gw_transfer_spectrum,
    laser_noise_tf,
    power_budget,
    validate_against_analytic,
)
from .scenario import MODES, ScenarioConfig

#: Approximation labels stamped into every affected run's metadata.
APPROXIMATIONS = {
    "shot": "shot-noise-at-detector-dc (no vacuum injection from lossy ports)",
    "floor": f"minimum-mirror-loss-floor-{LOSS_FLOOR:g}",
    "laser": "laser-noise-projected-with-quadrature-envelope",
}

#: Searchable bias domain for the noise-ratio target [rad].
BIAS_SEARCH_DOMAIN = (1e-6, math.pi - 1e-3)


@dataclass
class RunResult:
    files: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    ok: bool = True


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {obj!r}")


def _write_metadata(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2,
                               default=_jsonable) + "\n")
    return path


def _base_metadata(config: ScenarioConfig, mode: str) -> dict:
    return {
        "mode": mode,
        "config": config.resolved(),
        "provenance": config.provenance,
        "solver": {
            "residual_tolerance": SOLVE_TOL,
            "condition_warning": COND_WARN,
            "loss_floor": LOSS_FLOOR,
        },
        "approximations": [APPROXIMATIONS["shot"], APPROXIMATIONS["floor"]],
        "angle_conventions": {
            "arm_bias": "round-trip degrees of the antisymmetric point",
            "dc_offset": "one-way mirror-tuning degrees; doubles per round trip",
        },
    }


def _spectrum_rows(records):
    return [(r.frequency, r.tf_mag, r.tf_phase, r.shot_asd, r.nsr, r.diverged)
            for r in records]


SPECTRUM_HEADER = ["frequency_hz", "tf_mag_w_per_h", "tf_phase_rad",
                   "shot_asd_w_rthz", "nsr_strain_rthz", "diverged"]


def _resolve_asd(spec: str, config_dir: Path | None) -> NoiseASD:
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        ref = resources.files("gmisim").joinpath(f"data/{name}.csv")
        with resources.as_file(ref) as p:
            return NoiseASD.read(p)
    path = Path(spec)
    if not path.is_absolute() and config_dir is not None:
        path = config_dir / path
    return NoiseASD.read(path)


def _slug(value: float) -> str:
    return repr(float(value)).replace("-", "m").replace(".", "p")


def run_sweep(config: ScenarioConfig, mode: str, out_dir,
              config_dir: Path | None = None) -> RunResult:
    """Execute one mode and write its CSV products plus JSON metadata."""
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = RunResult(metadata=_base_metadata(config, mode))
    carrier = config.carrier()

    if mode == "transmission":
        if config.preset == "aligo-simplified":
            raise ValidationError(
                "transmission scans sweep an arm phase; use an arm-phase "
                "preset (mi, gmi, gmi-pr/sr/dr)"
            )
        step = 360.0 / (config.transmission_points + 1)
        phi_e_grid = [step * (k + 1) for k in range(config.transmission_points)]
        for phi_n_deg in config.transmission_phi_n_deg:
            rows = []
            for phi_e_deg in phi_e_grid:
                net = config.build_network(phi_n=math.radians(phi_n_deg),
                                           phi_e=math.radians(phi_e_deg))
                t = net.solve_carrier(carrier).detector_power("DET") / carrier.power
                rows.append((phi_e_deg, t))
            path = out_dir / f"transmission_phin_{_slug(phi_n_deg)}.csv"
            result.files.append(_write_csv(path, ["phi_e_deg", "transmission"], rows))
        result.metadata["transmission"] = {
            "phi_n_deg": list(config.transmission_phi_n_deg),
            "points": config.transmission_points,
        }

    elif mode in ("transfer", "nsr"):
        net = config.build_network()
        records = gw_transfer_spectrum(net, carrier, config.sweep())
        path = out_dir / f"{mode}.csv"
        result.files.append(_write_csv(path, SPECTRUM_HEADER,
                                       _spectrum_rows(records)))
        result.metadata["divergences"] = [r.frequency for r in records if r.diverged]

    elif mode == "power":
        net = config.build_network()
        budget = power_budget(net, carrier)
        rows = sorted(budget.items())
        path = out_dir / "power.csv"
        result.files.append(_write_csv(path, ["component", "power_w"],
                                       [(k, v) for k, v in rows]))

    elif mode == "noise-budget":
        net = config.build_network()
        sweep = config.sweep()
        records = gw_transfer_spectrum(net, carrier, sweep)
        freqs = np.array([r.frequency for r in records])
        gw_mags = np.array([r.tf_mag for r in records])
        contributions = []
        if config.include_shot:
            shot_strain = np.array([r.nsr for r in records])
            contributions.append(NoiseASD("shot", freqs,
                                          np.where(np.isfinite(shot_strain),
                                                   shot_strain, 0.0)))
        if config.include_ctn:
            contributions.append(ctn_curve(freqs, gw_arm_mean_length(net)))
        state = net.solve_carrier(carrier)
        for key, kind in (("frequency_noise_asd", "frequency"),
                          ("intensity_noise_asd", "intensity")):
            spec = getattr(config, key)
            if not spec:
                continue
            asd = _resolve_asd(spec, config_dir)
            tf_mags = np.array([
                laser_noise_tf(net, carrier, f, kind, state=state).envelope
                for f in freqs
            ])
            curve = project_laser_noise(asd, tf_mags, gw_mags, freqs)
            name = "laser_frequency" if kind == "frequency" else "laser_intensity"
            contributions.append(NoiseASD(name, freqs,
                                          np.where(np.isfinite(curve.values),
                                                   curve.values, 0.0)))
            result.metadata.setdefault("noise_sources", {})[name] = {
                "file": spec, "unit": asd.unit,
            }
        if not contributions:
            raise ValidationError("noise budget has no enabled contributions")
        budget = compose_budget(contributions, freqs)
        names = sorted(budget.contributions)
        header = (["frequency_hz"] + [f"{n}_strain_rthz" for n in names]
                  + ["total_strain_rthz"])
        diverged_rows = [r.frequency for r in records if r.diverged]
        rows = []
        for i, f in enumerate(freqs):
            shot_val = records[i].nsr
            row = [f]
            for n in names:
                v = budget.contributions[n][i]
                if n == "shot" and not math.isfinite(shot_val):
                    v = math.inf
                row.append(v)
            row.append(budget.total[i]
                       if math.isfinite(shot_val) or not config.include_shot
                       else math.inf)
            rows.append(row)
        path = out_dir / "budget.csv"
        result.files.append(_write_csv(path, header, rows))
        result.metadata["approximations"].append(APPROXIMATIONS["laser"])
        result.metadata["divergences"] = diverged_rows

    elif mode == "validate":
        report = validate_against_analytic(carrier)
        result.ok = report.passed
        result.metadata["validation"] = {
            "transmission_max_abs_dev": report.transmission_dev,
            "transmission_tolerance": report.TRANSMISSION_TOL,
            "transmission_ok": report.transmission_ok,
            "transfer_max_rel_dev": report.transfer_dev,
            "nsr_max_rel_dev": report.nsr_dev,
            "spectrum_tolerance": report.SPECTRUM_TOL,
            "transfer_ok": report.transfer_ok,
            "nsr_ok": report.nsr_ok,
            "note": (
                "the closed-form transfer/noise references scale the plain "
                "Michelson response by the average cavity field and carry a "
                "known systematic of about sqrt(2); the solver resolves the "
                "coin's 50/50 signal-sideband split exactly"
            ),
        }
        path = out_dir / "validate.json"
        result.files.append(_write_metadata(path, result.metadata["validation"]))

    elif mode == "find-bias":
        report = find_bias(config)
        path = out_dir / "find_bias.json"
        result.files.append(_write_metadata(path, report))
        result.metadata["find_bias"] = report

    meta_path = out_dir / f"{mode.replace('-', '_')}_metadata.json"
    result.files.append(_write_metadata(meta_path, result.metadata))
    return result


def _network_nsr(config: ScenarioConfig, theta: float, f: float) -> float:
    """Noise ratio of the coin preset at antisymmetric bias theta (plus the
    configured DC offset) and frequency f; inf when unsolvable."""
    from .core import GwSignal, ResonanceSingularityError

    carrier = config.carrier()
    delta = 2.0 * math.radians(config.offset_deg)
    try:
        net = config.build_network(phi_n=theta, phi_e=-(theta + delta))
        state = net.solve_carrier(carrier)
        sb = net.solve_sidebands(state, f,
                                 InjectionSpec("gw", GwSignal(1.0, 2 * math.pi * f)))
    except ResonanceSingularityError:
        return math.inf
    mag = abs(sb.demodulated("DET"))
    if mag == 0.0:
        return math.inf
    shot = math.sqrt(2.0 * 1.054571817e-34 * carrier.omega0
                     * state.detector_power("DET"))
    return shot / mag


def _golden_minimize(fun, lo: float, hi: float, iterations: int = 60) -> float:
    """Golden-section minimum of fun on [lo, hi] (log-spaced argument)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(math.exp(c)), fun(math.exp(d))
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(math.exp(d))
    return math.exp(0.5 * (a + b))


def find_bias(config: ScenarioConfig) -> dict:
    """Solve for the bias angle reaching a gain or noise-ratio target.

    Gain targets invert the closed form directly.  Noise-ratio targets start
    from that inverse and refine on the full network with a golden-section
    search; the report carries both routes and their disagreement.
    """
    carrier = config.carrier()
    f = config.target_frequency_hz
    arm = config.arm_length_m
    if config.find_bias_target == "gain":
        if config.target_gain <= 0:
            raise ValidationError("target gain must be positive")
        theta = bias_for_gain(config.target_gain)
        achieved = power_gain(theta, 1.0)
        nsr_net = _network_nsr(config, theta, f)
        nsr_an = gm_nsr(carrier, achieved, arm, f)
        return {
            "target": "gain",
            "target_value": config.target_gain,
            "theta_b_rad": theta,
            "theta_b_deg": math.degrees(theta),
            "gain_analytic": achieved,
            "nsr_network": nsr_net,
            "nsr_analytic": nsr_an,
            "network_vs_analytic": nsr_net / nsr_an if nsr_an > 0 else math.inf,
            "frequency_hz": f,
        }

    # noise-ratio target
    target = config.target_nsr
    if target <= 0:
        raise ValidationError("target noise ratio must be positive")
    notch = transfer_notch_frequency(arm)
    if f >= notch:
        raise ValidationError(
            f"target frequency {f:g} Hz is not below the first transfer "
            f"notch at {notch:.3f} Hz"
        )
    lo, hi = BIAS_SEARCH_DOMAIN
    # the noise ratio is not monotone in the bias at a fixed DC offset
    # (the fringe narrows faster than the gain grows), so scan first
    grid = np.geomspace(lo, hi, 40)
    values = np.array([_network_nsr(config, t, f) for t in grid])
    finite = np.isfinite(values)
    if not finite.any():
        raise ValidationError("no solvable bias point in the search domain")
    floor = values[finite].min()
    if target < floor:
        raise ValidationError(
            f"target noise ratio {target:g} lies below the minimum "
            f"{floor:.3e} attainable in the bias range [{lo:g}, {hi:g}] rad "
            f"at {f:g} Hz with DC offset {config.offset_deg:g} deg"
        )
    # closed-form seed for picking among crossings
    g_seed = 2.0 * 1.054571817e-34 * (2 * math.pi * f) ** 2 / (
        carrier.omega0 * carrier.power * target ** 2
        * math.sin(2 * math.pi * f * arm / 299792458.0) ** 2
    )
    theta_seed = bias_for_gain(max(g_seed, 1e-12))
    crossings = [i for i in range(len(grid) - 1)
                 if finite[i] and finite[i + 1]
                 and (values[i] - target) * (values[i + 1] - target) <= 0.0]
    if not crossings:
        raise ValidationError(
            f"target noise ratio {target:g} is not reached anywhere in the "
            f"bias range [{lo:g}, {hi:g}] rad at {f:g} Hz"
        )
    best = min(crossings, key=lambda i: abs(math.log(grid[i] / theta_seed)))

    def objective(theta: float) -> float:
        value = _network_nsr(config, theta, f)
        if not math.isfinite(value) or value <= 0:
            return math.inf
        return abs(math.log(value / target))

    theta = _golden_minimize(objective, grid[best], grid[best + 1])
    achieved = _network_nsr(config, theta, f)
    gain = power_gain(theta, 1.0)
    nsr_an = gm_nsr(carrier, gain, arm, f)
    return {
        "target": "nsr-at-frequency",
        "target_value": target,
        "frequency_hz": f,
        "theta_b_rad": theta,
        "theta_b_deg": math.degrees(theta),
        "theta_seed_rad": theta_seed,
        "gain_analytic": gain,
        "nsr_network": achieved,
        "nsr_analytic": nsr_an,
        "network_vs_analytic": achieved / nsr_an if nsr_an > 0 else math.inf,
        "target_miss": achieved / target - 1.0,
    }
