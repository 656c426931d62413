"""Frequency-domain scattering network: components, port graph, field solver.

The steady state is one linear equation per connected directed port: the
amplitude leaving a component through a port equals its scattering response
to the amplitudes entering through the component's other ports, plus any
source. Macroscopic lengths are taken as whole numbers of carrier
wavelengths, so a space contributes only its explicit tuning at the carrier
and the sideband-offset phase dw*L/c away from it; microscopic operating
points live entirely in mirror/space tunings and never fight km-scale
lengths for mantissa bits.

Sign conventions follow the dielectric-splitter picture: mirrors reflect
with -r e^{2j*tuning} on the front face and +r e^{-2j*tuning} on the back,
transmission is phase-free, and one splitter input side carries the minus.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    C_LIGHT,
    CarrierParams,
    GwSignal,
    MirrorParams,
    ResonanceSingularityError,
    ValidationError,
)

#: Relative residual above which a carrier/sideband solve is rejected.
SOLVE_TOL = 1e-12

#: Condition number beyond which a warning is attached to the result.
COND_WARN = 1e14

#: Condition number beyond which the solution carries no significant digits
#: and the configuration is treated as an exact resonance.
COND_SINGULAR = 1e16

INV_SQRT2 = 1.0 / math.sqrt(2.0)


class NetworkStructureError(ValidationError):
    """The port graph is malformed (dangling port, duplicate edge, ...)."""


class IllConditionedWarning(UserWarning):
    """The steady-state system is close to singular."""


@dataclass
class Laser:
    """Source component; absorbs anything sent back into it."""

    name: str
    power: float

    ports = ("out",)

    def couplings(self, dw: float):
        return ()


@dataclass
class Mirror:
    """Two-sided mirror; `params.tuning` is the one-way displacement phase."""

    name: str
    params: MirrorParams

    ports = ("front", "back")

    def couplings(self, dw: float):
        r, t = self.params.r, self.params.t
        ph = cmath.exp(2j * self.params.tuning)
        return (
            ("front", "front", -r * ph),
            ("back", "back", r / ph),
            ("front", "back", t),
            ("back", "front", t),
        )


@dataclass
class BeamSplitter:
    """Balanced splitter: inputs (a, b) couple to outputs (c, d) and back.

    Port b carries the film-side pi phase: the b<->c couplings are negative.
    orientation=-1 moves the film to the a side instead (a<->c negative),
    which is the other physically valid mounting of the same part.

    corrupt=True flips the sign of the single directed coupling b->c,
    breaking reciprocity; it exists only as a negative control for
    validation checks and never represents a physical part.
    """

    name: str
    loss: float = 0.0
    orientation: int = 1
    corrupt: bool = False

    ports = ("a", "b", "c", "d")

    def couplings(self, dw: float):
        s = INV_SQRT2 * math.sqrt(1.0 - self.loss)
        neg = "b" if self.orientation >= 0 else "a"
        out = []
        for p, q in (("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")):
            amp = -s if q == neg and p == "c" else s
            out.append((p, q, amp))
            out.append((q, p, amp))
        if self.corrupt:
            out = [(p, q, -amp) if (p, q) == ("c", "b") else (p, q, amp)
                   for p, q, amp in out]
        return tuple(out)


@dataclass
class Space:
    """Free propagation over `length`; gw_sign = +/-1 marks an arm that a
    passing strain wave stretches (+) or squeezes (-)."""

    name: str
    length: float
    tuning: float = 0.0  # one-way phase at the carrier [rad]
    gw_sign: int = 0

    ports = ("a", "b")

    def propagation(self, dw: float) -> complex:
        return cmath.exp(1j * (self.tuning + dw * self.length / C_LIGHT))

    def couplings(self, dw: float):
        p = self.propagation(dw)
        return (("b", "a", p), ("a", "b", p))


@dataclass
class Detector:
    """Photodetector; absorbs its input."""

    name: str

    ports = ("in",)

    def couplings(self, dw: float):
        return ()


Component = Laser | Mirror | BeamSplitter | Space | Detector


@dataclass(frozen=True)
class InjectionSpec:
    """What drives the sidebands: a strain wave or laser technical noise.

    kind 'gw' uses `gw` and modulates every gw-signed space; 'frequency' and
    'intensity' put phase/amplitude-modulation sidebands on the laser with
    unit source ASD (Hz/sqrt(Hz) and W/sqrt(Hz) respectively).
    """

    kind: str = "gw"
    gw: GwSignal | None = None

    def __post_init__(self):
        if self.kind not in ("gw", "frequency", "intensity"):
            raise ValidationError(f"unknown injection kind {self.kind!r}")
        if self.kind == "gw" and self.gw is None:
            raise ValidationError("gw injection needs a GwSignal")


class OpticalNetwork:
    """Directed port graph of optical components."""

    def __init__(self):
        self.components: dict[str, Component] = {}
        self.edges: list[tuple[tuple[str, str], tuple[str, str]]] = []
        self._partner: dict[tuple[str, str], tuple[str, str]] = {}
        self._index: dict[tuple[str, str], int] = {}
        self._sealed = False

    def add(self, comp: Component) -> Component:
        if comp.name in self.components:
            raise NetworkStructureError(f"duplicate component name {comp.name!r}")
        self.components[comp.name] = comp
        return comp

    def connect(self, a: tuple[str, str], b: tuple[str, str]):
        for ref in (a, b):
            name, port = ref
            if name not in self.components:
                raise NetworkStructureError(f"unknown component {name!r} in edge {a} -- {b}")
            if port not in self.components[name].ports:
                raise NetworkStructureError(
                    f"component {name!r} has no port {port!r} (ports: "
                    f"{self.components[name].ports})"
                )
            if ref in self._partner:
                raise NetworkStructureError(
                    f"port {ref[0]}.{ref[1]} is already connected"
                )
        if a == b:
            raise NetworkStructureError(f"cannot connect port {a[0]}.{a[1]} to itself")
        self.edges.append((a, b))
        self._partner[a] = b
        self._partner[b] = a

    def partner(self, ref: tuple[str, str]) -> tuple[str, str] | None:
        return self._partner.get(ref)

    # -- validation / indexing -------------------------------------------

    def seal(self):
        """Validate the graph and freeze the port index."""
        lasers = [c for c in self.components.values() if isinstance(c, Laser)]
        detectors = [c for c in self.components.values() if isinstance(c, Detector)]
        if not lasers:
            raise NetworkStructureError("network has no laser")
        if not detectors:
            raise NetworkStructureError("network has no photodetector")
        for comp in self.components.values():
            if isinstance(comp, (Laser, Detector, Space)):
                # single-port and through components must be fully wired
                for port in comp.ports:
                    if (comp.name, port) not in self._partner:
                        raise NetworkStructureError(
                            f"dangling port {comp.name}.{port}"
                        )
        # reachability from each laser over edges
        adjacency: dict[str, set[str]] = {n: set() for n in self.components}
        for (na, _), (nb, _) in self.edges:
            adjacency[na].add(nb)
            adjacency[nb].add(na)
        seen = set()
        stack = [lasers[0].name]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adjacency[n] - seen)
        unreachable = [d.name for d in detectors if d.name not in seen]
        if unreachable:
            raise NetworkStructureError(
                f"detectors not connected to the laser: {unreachable}"
            )
        self._index = {ref: i for i, ref in enumerate(sorted(self._partner))}
        self._sealed = True
        return self

    @property
    def size(self) -> int:
        return len(self._index)

    def index(self, ref: tuple[str, str]) -> int:
        return self._index[ref]

    # -- system assembly --------------------------------------------------

    def _matrix(self, dw: float) -> np.ndarray:
        n = self.size
        a = np.eye(n, dtype=complex)
        for comp in self.components.values():
            for dst, src, amp in comp.couplings(dw):
                dst_ref = (comp.name, dst)
                src_ref = (comp.name, src)
                if dst_ref not in self._index:
                    continue
                feed = self._partner.get(src_ref)
                if feed is None:
                    continue  # unconnected input sees vacuum
                a[self._index[dst_ref], self._index[feed]] -= amp
        return a

    def _solve(self, matrix: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float, float]:
        try:
            x = np.linalg.solve(matrix, rhs)
        except np.linalg.LinAlgError as exc:
            raise ResonanceSingularityError(
                "steady-state system is singular (lossless configuration on "
                f"an exact cavity resonance): {exc}"
            ) from exc
        # backward-error normalization: deep cavity buildup makes ||x|| huge,
        # and an accurate LU solve still leaves ||Ax-b|| ~ eps*||A||*||x||
        scale = np.linalg.norm(matrix, "fro") * np.linalg.norm(x) + np.linalg.norm(rhs)
        residual = float(np.linalg.norm(matrix @ x - rhs) / scale) if scale > 0 else 0.0
        cond = float(np.linalg.cond(matrix))
        if cond > COND_SINGULAR:
            raise ResonanceSingularityError(
                f"steady-state system condition number {cond:.3e} leaves no "
                "significant digits; a lossless configuration sits on an "
                "exact cavity resonance"
            )
        if cond > COND_WARN:
            warnings.warn(
                f"steady-state system condition number {cond:.3e} exceeds "
                f"{COND_WARN:.0e}; results may be inaccurate",
                IllConditionedWarning,
                stacklevel=3,
            )
        if residual > SOLVE_TOL:
            raise ResonanceSingularityError(
                f"solver residual {residual:.3e} exceeds tolerance {SOLVE_TOL:.0e}; "
                "configuration is numerically singular"
            )
        return x, residual, cond

    def solve_carrier(self, carrier: CarrierParams) -> "FieldState":
        """Steady-state carrier amplitudes at every connected directed port."""
        if not self._sealed:
            self.seal()
        rhs = np.zeros(self.size, dtype=complex)
        for comp in self.components.values():
            if isinstance(comp, Laser):
                rhs[self._index[(comp.name, "out")]] = math.sqrt(comp.power)
        matrix = self._matrix(0.0)
        x, residual, cond = self._solve(matrix, rhs)
        return FieldState(self, carrier, x, residual, cond)

    def solve_sidebands(self, state: "FieldState", f_signal: float,
                        injection: InjectionSpec) -> "SidebandState":
        """First-order sideband amplitudes at carrier +/- 2*pi*f_signal.

        GW injection: every gw-signed space adds, per traversal direction, a
        source at its output proportional to the carrier entering it times
        the one-way modulation envelope; the two arms get opposite signs.
        Laser-noise injection puts modulation sidebands directly on the
        source. Everything is linear in the injected amplitude.
        """
        if state.network is not self:
            raise ValidationError("carrier state belongs to a different network")
        if not f_signal > 0.0:
            raise ValidationError(f"signal frequency must be positive, got {f_signal!r}")
        omega = 2.0 * math.pi * f_signal
        rhs_u = np.zeros(self.size, dtype=complex)
        rhs_l = np.zeros(self.size, dtype=complex)
        if injection.kind == "gw":
            gw = injection.gw
            if abs(gw.omega - omega) > 1e-6 * omega:
                raise ValidationError("GwSignal frequency must match the sideband solve")
            omega0 = state.carrier.omega0
            for comp in self.components.values():
                if not (isinstance(comp, Space) and comp.gw_sign):
                    continue
                transit = comp.length / C_LIGHT
                envelope = gw.h0 * omega0 / omega * math.sin(0.5 * omega * transit)
                prop = comp.propagation(0.0)
                psi = gw.phase - 0.5 * omega * transit
                base = -1j * comp.gw_sign * 0.5 * envelope * prop
                for out_port, in_port in (("b", "a"), ("a", "b")):
                    feed = self._partner[(comp.name, in_port)]
                    a_in = state.amplitudes[self._index[feed]]
                    row = self._index[(comp.name, out_port)]
                    rhs_u[row] += base * a_in * cmath.exp(-1j * psi)
                    rhs_l[row] += base * a_in * cmath.exp(1j * psi)
        else:
            for comp in self.components.values():
                if not isinstance(comp, Laser):
                    continue
                e0 = math.sqrt(comp.power)
                row = self._index[(comp.name, "out")]
                if injection.kind == "frequency":
                    # phase modulation with index (1 Hz/rtHz)/f
                    beta = 1.0 / f_signal
                    rhs_u[row] += 0.5 * beta * e0
                    rhs_l[row] += -0.5 * beta * e0
                else:
                    # amplitude modulation, delta-P of 1 W/rtHz
                    m = 1.0 / (2.0 * comp.power)
                    rhs_u[row] += 0.5 * m * e0
                    rhs_l[row] += 0.5 * m * e0
        upper, res_u, _ = self._solve(self._matrix(+omega), rhs_u)
        lower, res_l, _ = self._solve(self._matrix(-omega), rhs_l)
        return SidebandState(self, state, f_signal, injection, upper, lower,
                             max(res_u, res_l))


class FieldState:
    """Solved carrier field over the directed ports of one network."""

    def __init__(self, network: OpticalNetwork, carrier: CarrierParams,
                 amplitudes: np.ndarray, residual: float, cond: float):
        self.network = network
        self.carrier = carrier
        self.amplitudes = amplitudes
        self.residual = residual
        self.cond = cond

    def outgoing(self, name: str, port: str) -> complex:
        """Amplitude leaving component `name` through `port`."""
        return complex(self.amplitudes[self.network.index((name, port))])

    def incoming(self, name: str, port: str) -> complex:
        """Amplitude arriving at component `name` through `port`."""
        feed = self.network.partner((name, port))
        if feed is None:
            return 0.0j
        return complex(self.amplitudes[self.network.index(feed)])

    def incident_powers(self, name: str) -> dict[str, float]:
        """Power [W] arriving at each connected port of a component."""
        comp = self.network.components[name]
        return {
            port: abs(self.incoming(name, port)) ** 2
            for port in comp.ports
            if self.network.partner((name, port)) is not None
        }

    def detector_power(self, name: str) -> float:
        comp = self.network.components[name]
        if not isinstance(comp, Detector):
            raise ValidationError(f"{name!r} is not a photodetector")
        return abs(self.incoming(name, "in")) ** 2

    def sink_powers(self) -> dict[str, float]:
        """DC power absorbed at every open port (detectors and the laser)."""
        out = {}
        for comp in self.network.components.values():
            if isinstance(comp, Detector):
                out[comp.name] = abs(self.incoming(comp.name, "in")) ** 2
            elif isinstance(comp, Laser):
                out[comp.name] = abs(self.incoming(comp.name, "out")) ** 2
        return out


class SidebandState:
    """Solved first-order sidebands for one injection at one frequency."""

    def __init__(self, network: OpticalNetwork, carrier_state: FieldState,
                 f_signal: float, injection: InjectionSpec,
                 upper: np.ndarray, lower: np.ndarray, residual: float):
        self.network = network
        self.carrier_state = carrier_state
        self.f_signal = f_signal
        self.injection = injection
        self.upper = upper
        self.lower = lower
        self.residual = residual

    def incoming(self, name: str, port: str, band: str) -> complex:
        feed = self.network.partner((name, port))
        if feed is None:
            return 0.0j
        vec = self.upper if band == "upper" else self.lower
        return complex(vec[self.network.index(feed)])

    def demodulated(self, detector: str) -> complex:
        """Complex beat amplitude at the detector, mixer factor included:
        conj(carrier) * upper + carrier * conj(lower)."""
        a_c = self.carrier_state.incoming(detector, "in")
        a_u = self.incoming(detector, "in", "upper")
        a_l = self.incoming(detector, "in", "lower")
        return a_c.conjugate() * a_u + a_c * a_l.conjugate()
