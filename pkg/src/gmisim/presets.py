"""Standard interferometer topologies built on the scattering network.

All presets share conventions: macroscopic lengths are whole numbers of
carrier wavelengths, arm biases are round-trip radians applied as end-mirror
tunings (half each way), and every mirror carries at least a 1e-12 power
loss floor so resonant configurations stay numerically solvable.
"""

from __future__ import annotations

import math

from .core import GroverCoinParams, PURE_COIN, mirror_from_loss
from .network import BeamSplitter, Detector, Laser, Mirror, OpticalNetwork, Space

#: Minimum per-mirror power loss; keeps exact resonances off the singularity.
LOSS_FLOOR = 1e-12


def _mirror(name, transmittance=0.0, loss=0.0, tuning=0.0):
    return Mirror(name, mirror_from_loss(transmittance, max(loss, LOSS_FLOOR), tuning))


def build_mi(power: float = 125.0, arm_length: float = 4000.0,
             phi_n: float = 0.0, phi_e: float = 0.0,
             end_transmittance: float = 0.0, end_loss: float = 0.0,
             bs_loss: float = 0.0) -> OpticalNetwork:
    """Plain Michelson: one splitter, two arms, detector on the open port.

    phi_n/phi_e are round-trip arm phases [rad]; the output port is dark
    when they are equal.
    """
    net = OpticalNetwork()
    net.add(Laser("LASER", power))
    net.add(Space("SPACE_IN", 0.0))
    net.add(BeamSplitter("BS", loss=bs_loss))
    net.add(Space("ARM_N", arm_length, gw_sign=+1))
    net.add(Space("ARM_E", arm_length, gw_sign=-1))
    net.add(_mirror("ETM_N", end_transmittance, end_loss, 0.5 * phi_n))
    net.add(_mirror("ETM_E", end_transmittance, end_loss, 0.5 * phi_e))
    net.add(Space("SPACE_OUT", 0.0))
    net.add(Detector("DET"))
    net.connect(("LASER", "out"), ("SPACE_IN", "a"))
    net.connect(("SPACE_IN", "b"), ("BS", "a"))
    net.connect(("BS", "d"), ("ARM_N", "a"))
    net.connect(("ARM_N", "b"), ("ETM_N", "front"))
    net.connect(("BS", "c"), ("ARM_E", "a"))
    net.connect(("ARM_E", "b"), ("ETM_E", "front"))
    net.connect(("BS", "b"), ("SPACE_OUT", "a"))
    net.connect(("SPACE_OUT", "b"), ("DET", "in"))
    return net.seal()


def _add_gmi_core(net: OpticalNetwork, power: float, arm_length: float,
                  phi_n: float, phi_e: float, coin: GroverCoinParams,
                  end_transmittance: float, end_loss: float,
                  coin_mirror_transmittance: float, coin_mirror_loss: float,
                  bs_loss: float, corrupt: bool) -> None:
    """Wire laser -> coin (two splitters, two internal mirrors) -> arms.

    Leaves BS1 port "b" (the transmission output) unconnected for the
    caller to terminate with a detector or a recycling mirror; same for
    the laser feed via SPACE_IN port "a".
    """
    r1_extra = 1.0 - coin.r1**2  # internal mirror reflectance below unity
    r2_extra = 1.0 - coin.r2**2
    net.add(Laser("LASER", power))
    net.add(Space("SPACE_IN", 0.0))
    net.add(BeamSplitter("BS1", loss=bs_loss))
    net.add(Space("SPACE_M1", 0.0))
    net.add(_mirror("M1", 0.0, max(coin_mirror_loss, r1_extra), 0.5 * coin.phi1))
    net.add(Space("SPACE_COIN", 0.0, tuning=coin.theta))
    net.add(BeamSplitter("BS2", loss=bs_loss, corrupt=corrupt))
    net.add(Space("SPACE_M2", 0.0))
    net.add(_mirror("M2", coin_mirror_transmittance,
                    max(coin_mirror_loss, r2_extra), 0.5 * coin.phi2))
    net.add(Space("ARM_N", arm_length, gw_sign=+1))
    net.add(Space("ARM_E", arm_length, gw_sign=-1))
    net.add(_mirror("ETM_N", end_transmittance, end_loss, 0.5 * phi_n))
    net.add(_mirror("ETM_E", end_transmittance, end_loss, 0.5 * phi_e))
    net.connect(("SPACE_IN", "b"), ("BS1", "a"))
    net.connect(("BS1", "c"), ("SPACE_M1", "a"))
    net.connect(("SPACE_M1", "b"), ("M1", "front"))
    net.connect(("BS1", "d"), ("SPACE_COIN", "a"))
    net.connect(("SPACE_COIN", "b"), ("BS2", "a"))
    net.connect(("BS2", "b"), ("SPACE_M2", "a"))
    net.connect(("SPACE_M2", "b"), ("M2", "front"))
    net.connect(("BS2", "d"), ("ARM_N", "a"))
    net.connect(("ARM_N", "b"), ("ETM_N", "front"))
    net.connect(("BS2", "c"), ("ARM_E", "a"))
    net.connect(("ARM_E", "b"), ("ETM_E", "front"))


def build_gmi(power: float = 125.0, arm_length: float = 4000.0,
              phi_n: float = 0.0, phi_e: float = 0.0,
              coin: GroverCoinParams = PURE_COIN,
              end_transmittance: float = 0.0, end_loss: float = 0.0,
              coin_mirror_transmittance: float = 0.0,
              coin_mirror_loss: float = 0.0,
              bs_loss: float = 0.0, corrupt: bool = False,
              input_port: str = "left") -> OpticalNetwork:
    """Coin-based Michelson: two splitters and two internal mirrors replace
    the central splitter, coupling the arms into phase-dependent cavities.

    input_port "left" drives the standard side; "bottom" swaps laser and
    detector, which exchanges the roles of the two outputs.
    """
    net = OpticalNetwork()
    _add_gmi_core(net, power, arm_length, phi_n, phi_e, coin,
                  end_transmittance, end_loss, coin_mirror_transmittance,
                  coin_mirror_loss, bs_loss, corrupt)
    net.add(Space("SPACE_OUT", 0.0))
    net.add(Detector("DET"))
    if input_port == "left":
        net.connect(("LASER", "out"), ("SPACE_IN", "a"))
        net.connect(("BS1", "b"), ("SPACE_OUT", "a"))
        net.connect(("SPACE_OUT", "b"), ("DET", "in"))
    elif input_port == "bottom":
        net.connect(("LASER", "out"), ("SPACE_OUT", "a"))
        net.connect(("SPACE_OUT", "b"), ("BS1", "b"))
        net.connect(("SPACE_IN", "a"), ("DET", "in"))
    else:
        raise ValueError(f"input_port must be 'left' or 'bottom', got {input_port!r}")
    return net.seal()


def build_gmi_recycled(kind: str, power: float = 125.0,
                       arm_length: float = 4000.0,
                       phi_n: float = 0.0, phi_e: float = 0.0,
                       coin: GroverCoinParams = PURE_COIN,
                       end_transmittance: float = 0.0, end_loss: float = 0.0,
                       coin_mirror_loss: float = 0.0, bs_loss: float = 0.0,
                       prm_transmittance: float = 0.001,
                       srm_transmittance: float = 0.20,
                       recycling_loss: float = 0.0,
                       prm_tuning: float = 0.0,
                       srm_tuning: float = 0.0) -> OpticalNetwork:
    """Coin interferometer with power/signal/dual recycling ('pr'|'sr'|'dr').

    Recycling mirrors face the interferometer with their front surface;
    their microscopic tunings are free parameters defaulting to 0.
    """
    if kind not in ("pr", "sr", "dr"):
        raise ValueError(f"recycling kind must be 'pr', 'sr' or 'dr', got {kind!r}")
    net = OpticalNetwork()
    _add_gmi_core(net, power, arm_length, phi_n, phi_e, coin,
                  end_transmittance, end_loss, 0.0, coin_mirror_loss,
                  bs_loss, corrupt=False)
    net.add(Space("SPACE_OUT", 0.0))
    net.add(Detector("DET"))
    if kind in ("pr", "dr"):
        net.add(Space("SPACE_PRC", 0.0))
        net.add(_mirror("PRM", prm_transmittance, recycling_loss, prm_tuning))
        net.connect(("LASER", "out"), ("SPACE_PRC", "a"))
        net.connect(("SPACE_PRC", "b"), ("PRM", "back"))
        net.connect(("PRM", "front"), ("SPACE_IN", "a"))
    else:
        net.connect(("LASER", "out"), ("SPACE_IN", "a"))
    if kind in ("sr", "dr"):
        net.add(Space("SPACE_SRC", 0.0))
        net.add(_mirror("SRM", srm_transmittance, recycling_loss, srm_tuning))
        net.connect(("BS1", "b"), ("SPACE_SRC", "a"))
        net.connect(("SPACE_SRC", "b"), ("SRM", "front"))
        net.connect(("SRM", "back"), ("SPACE_OUT", "a"))
    else:
        net.connect(("BS1", "b"), ("SPACE_OUT", "a"))
    net.connect(("SPACE_OUT", "b"), ("DET", "in"))
    return net.seal()


def build_aligo(power: float = 125.0, arm_length: float = 4000.0,
                prm_transmittance: float = 0.03,
                srm_transmittance: float = 0.20,
                itm_transmittance: float = 0.014,
                component_loss: float = 1e-8,
                dark_fringe_offset: float = math.radians(0.00025),
                prm_tuning: float = 0.0,
                srm_tuning: float = 0.0) -> OpticalNetwork:
    """Dual-recycled Michelson with resonant arm cavities.

    The conventional quote puts the end mirrors at a relative phase of
    pi - offset; with this component phase convention the same operating
    point sits at a relative round-trip phase of -offset, applied to the
    short east Michelson path so the arm cavities stay resonant.  The
    recycling cavity is carrier-resonant at zero PRM tuning.
    """
    net = OpticalNetwork()
    net.add(Laser("LASER", power))
    net.add(Space("SPACE_IN", 0.0))
    net.add(_mirror("PRM", prm_transmittance, component_loss, prm_tuning))
    net.add(Space("SPACE_PRC", 0.0))
    net.add(BeamSplitter("BS", loss=component_loss))
    net.add(Space("MICH_N", 0.0))
    net.add(Space("MICH_E", 0.0, tuning=-0.5 * dark_fringe_offset))
    net.add(_mirror("ITM_N", itm_transmittance, component_loss))
    net.add(_mirror("ITM_E", itm_transmittance, component_loss))
    net.add(Space("ARM_N", arm_length, gw_sign=+1))
    net.add(Space("ARM_E", arm_length, gw_sign=-1))
    net.add(_mirror("ETM_N", 0.0, component_loss))
    net.add(_mirror("ETM_E", 0.0, component_loss))
    net.add(Space("SPACE_SRC", 0.0))
    net.add(_mirror("SRM", srm_transmittance, component_loss, srm_tuning))
    net.add(Space("SPACE_OUT", 0.0))
    net.add(Detector("DET"))
    net.connect(("LASER", "out"), ("SPACE_IN", "a"))
    net.connect(("SPACE_IN", "b"), ("PRM", "back"))
    net.connect(("PRM", "front"), ("SPACE_PRC", "a"))
    net.connect(("SPACE_PRC", "b"), ("BS", "a"))
    net.connect(("BS", "d"), ("MICH_N", "a"))
    net.connect(("MICH_N", "b"), ("ITM_N", "back"))
    net.connect(("ITM_N", "front"), ("ARM_N", "a"))
    net.connect(("ARM_N", "b"), ("ETM_N", "front"))
    net.connect(("BS", "c"), ("MICH_E", "a"))
    net.connect(("MICH_E", "b"), ("ITM_E", "back"))
    net.connect(("ITM_E", "front"), ("ARM_E", "a"))
    net.connect(("ARM_E", "b"), ("ETM_E", "front"))
    net.connect(("BS", "b"), ("SPACE_SRC", "a"))
    net.connect(("SPACE_SRC", "b"), ("SRM", "front"))
    net.connect(("SRM", "back"), ("SPACE_OUT", "a"))
    net.connect(("SPACE_OUT", "b"), ("DET", "in"))
    return net.seal()
