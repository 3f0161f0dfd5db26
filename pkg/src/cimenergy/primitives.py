"""Per-operation energy primitives and CMOS node scaling.

Every function returns joules.  Process-dependent energies are quoted at the
45 nm / 0.9 V baseline and multiplied by ``TechProcess.energy_scale``; line
load and optical (laser) energies do not depend on the node.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from scipy import constants as sc

from .errors import ConfigurationError, DomainError, InvalidArgumentError, ParseError

K_B = sc.k
HBAR = sc.hbar
#: quantum conductance 2e^2/h, siemens
G0 = 2 * sc.e**2 / sc.h

T_DEFAULT = 300.0
#: typical CMOS copper trace, F/um
CAP_PER_UM = 0.2e-15
#: supply voltage used for line-load energies (node independent)
V_LOAD = 0.9

#: SRAM anchor: 1.25 pJ/byte for an 8 KB bank at 45 nm
SRAM_ANCHOR_J = 1.25e-12
SRAM_ANCHOR_BYTES = 8 * 1024
E_M0 = SRAM_ANCHOR_J / math.sqrt(SRAM_ANCHOR_BYTES)

KIB = 1024
MIB = 1024 * 1024


def data_dir() -> Path:
    env = os.environ.get("CIMENERGY_DATA")
    if env:
        return Path(env)
    return Path(__file__).with_name("data")


@dataclass(frozen=True)
class TechProcess:
    node_nm: float
    supply_v: float
    temperature_k: float = T_DEFAULT
    energy_scale: float = 1.0

    def __post_init__(self):
        for name in ("node_nm", "supply_v", "temperature_k", "energy_scale"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")

    @property
    def kT(self) -> float:
        return K_B * self.temperature_k


@dataclass(frozen=True)
class GammaConstants:
    """Dimensionless prefactors relating each operation energy to kT."""

    gamma_m: float = 3e6
    gamma_mac: float = 1.225e5
    gamma_adc: float = 927.0
    gamma_dac: float = 39.0
    gamma_opt: float = 39.0

    def __post_init__(self):
        for name in ("gamma_m", "gamma_mac", "gamma_adc", "gamma_dac", "gamma_opt"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.gamma_mac <= math.log(2):
            raise DomainError("gamma_mac below the Landauer floor ln(2)")


DEFAULT_GAMMAS = GammaConstants()
#: alternative constant set (gamma_opt at 50 % optical efficiency)
TABLE_GAMMAS = GammaConstants(gamma_m=3e6, gamma_mac=1.2e5, gamma_adc=583.0,
                              gamma_dac=39.0, gamma_opt=105.0)
GAMMA_PRESETS = {"default": DEFAULT_GAMMAS, "table": TABLE_GAMMAS}


# -- node scaling table -------------------------------------------------------

def read_node_table(path=None) -> dict[int, tuple[float, float]]:
    """Parse ``node_nm,voltage_v,energy_scale`` rows into ``{node: (V, scale)}``."""
    path = Path(path) if path is not None else data_dir() / "node_scaling.csv"
    return _read_node_table(str(path))


@lru_cache(maxsize=8)
def _read_node_table(path: str):
    table = {}
    with open(path, newline="") as fh:
        rows = [(i, ln) for i, ln in enumerate(fh, 1)
                if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ParseError("empty node table", path)
    header = [h.strip() for h in rows[0][1].split(",")]
    if header != ["node_nm", "voltage_v", "energy_scale"]:
        raise ParseError(f"bad header {header}", path, rows[0][0])
    for lineno, line in rows[1:]:
        fields = next(csv.reader([line]))
        try:
            node, volts, scale = int(fields[0]), float(fields[1]), float(fields[2])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed row: {line.strip()!r}", path, lineno) from exc
        table[node] = (volts, scale)
    if table.get(45, (None, None))[1] != 1.0:
        raise ParseError("energy_scale at 45 nm must be exactly 1", path)
    return table


def tech_process(node_nm: float, temperature_k: float = T_DEFAULT,
                 table=None) -> TechProcess:
    """Look up (or geometrically interpolate) a node in the scaling table."""
    table = read_node_table() if table is None else table
    if node_nm in table:
        volts, scale = table[node_nm]
        return TechProcess(node_nm, volts, temperature_k, scale)
    nodes = sorted(table)
    if not nodes[0] < node_nm < nodes[-1]:
        raise ConfigurationError(
            f"node {node_nm} nm outside scaling table range "
            f"{nodes[0]}-{nodes[-1]} nm")
    hi = next(n for n in nodes if n > node_nm)
    lo = max(n for n in nodes if n < node_nm)
    w = (math.log(node_nm) - math.log(lo)) / (math.log(hi) - math.log(lo))
    (v_lo, s_lo), (v_hi, s_hi) = table[lo], table[hi]
    scale = math.exp((1 - w) * math.log(s_lo) + w * math.log(s_hi))
    return TechProcess(node_nm, (1 - w) * v_lo + w * v_hi, temperature_k, scale)


BASELINE = TechProcess(45, 0.9, T_DEFAULT, 1.0)


def scale_to_node(e_45nm: float, proc: TechProcess, is_load_or_laser: bool = False) -> float:
    if e_45nm < 0:
        raise InvalidArgumentError("energy must be non-negative")
    if is_load_or_laser:
        return e_45nm
    return e_45nm * proc.energy_scale


# -- primitives ---------------------------------------------------------------

def _check_bits(bits, minimum=1):
    if int(bits) != bits or bits < minimum:
        raise InvalidArgumentError(f"bits must be an integer >= {minimum}, got {bits}")


def mac_energy(proc: TechProcess = BASELINE, g: GammaConstants = DEFAULT_GAMMAS,
               bits: int = 8) -> float:
    """Digital multiply-accumulate: gates scale as 6B^2 (multiplier) + 9B (adder)."""
    _check_bits(bits)
    return g.gamma_mac * (6 * bits**2 + 9 * bits) * proc.kT * proc.energy_scale


def sram_energy_per_byte(e_m0: float, bank_bytes: float) -> float:
    """Bit/word-line limited access energy, growing as sqrt(bank size)."""
    if not bank_bytes >= 1:
        raise InvalidArgumentError("bank_bytes must be >= 1")
    if e_m0 < 0:
        raise InvalidArgumentError("e_m0 must be non-negative")
    return e_m0 * math.sqrt(bank_bytes)


def adc_energy(proc: TechProcess = BASELINE, g: GammaConstants = DEFAULT_GAMMAS,
               bits: int = 8) -> float:
    _check_bits(bits)
    return g.gamma_adc * proc.kT * 4.0**bits * proc.energy_scale


def dac_core_energy(proc: TechProcess = BASELINE, g: GammaConstants = DEFAULT_GAMMAS,
                    bits: int = 8) -> float:
    """Converter circuitry only; the driven load is priced by :func:`load_energy`."""
    _check_bits(bits)
    return g.gamma_dac * proc.kT * 4.0**bits * proc.energy_scale


def load_energy(cap_per_um: float = CAP_PER_UM, line_um: float = 0.0,
                volts: float = V_LOAD) -> float:
    """Energy to charge a line: C L V^2 / 2."""
    if cap_per_um < 0 or line_um < 0 or volts < 0:
        raise InvalidArgumentError("load arguments must be non-negative")
    return 0.5 * cap_per_um * line_um * volts**2


def photon_energy(wavelength_m: float) -> float:
    return 2 * math.pi * HBAR * sc.c / wavelength_m


def optical_energy_per_pixel(wavelength_m: float = 1550e-9, optical_efficiency: float = 0.8,
                             bits: int = 8, temperature_k: float = T_DEFAULT) -> float:
    """Shot-noise limited laser energy per pixel, hbar*omega / eta * 2^(2B).

    ``temperature_k`` only matters for the equivalent gamma; see :func:`gamma_opt`.
    """
    if not 0 < optical_efficiency <= 1:
        raise InvalidArgumentError("optical_efficiency must lie in (0, 1]")
    if wavelength_m <= 0 or temperature_k <= 0:
        raise InvalidArgumentError("wavelength and temperature must be positive")
    _check_bits(bits, minimum=0)
    return photon_energy(wavelength_m) / optical_efficiency * 4.0**bits


def gamma_opt(wavelength_m: float = 1550e-9, optical_efficiency: float = 0.8,
              temperature_k: float = T_DEFAULT) -> float:
    return optical_energy_per_pixel(wavelength_m, optical_efficiency, 0) / (K_B * temperature_k)


def mean_conductance(bits: int = 8) -> float:
    """Uniformly distributed conductances in [G0, 2^B G0] average to 2^(B-1) G0."""
    _check_bits(bits)
    return 2.0 ** (bits - 1) * G0


def reram_mac_energy(mean_conductance: float, v_rms: float = 0.07,
                     sample_period_s: float = 1e-9) -> float:
    """Memristor dissipation per MAC under pulse-width modulated inputs.

    Independent of the array dimensions: the array burns delta_t*M*N*<G>*V^2
    while performing M*N MACs.
    """
    if mean_conductance < G0 * (1 - 1e-12):
        raise DomainError(
            f"mean conductance {mean_conductance:.3e} S is below the quantum "
            f"conductance {G0:.3e} S; the memristor model is undefined there")
    if sample_period_s <= 0:
        raise InvalidArgumentError("sample_period_s must be positive")
    return mean_conductance * v_rms**2 * sample_period_s


def reram_thermal_floor(bits: int = 8, temperature_k: float = T_DEFAULT) -> float:
    """Johnson-noise limited memristor energy per MAC, 3 kT 2^(3B)."""
    _check_bits(bits)
    return 3 * K_B * temperature_k * 8.0**bits


# -- bundled rates ------------------------------------------------------------

@dataclass(frozen=True)
class EnergyRates:
    """Per-event energies (J) for one process, bank size and precision."""

    e_m: float
    e_m0: float
    e_mac: float
    e_adc: float
    e_dac: float
    e_load_per_um: float
    e_opt: float
    e_reram: float
    bits: int = 8

    def __post_init__(self):
        if self.bits < 1:
            raise InvalidArgumentError("bits must be >= 1")
        for name in ("e_m", "e_m0", "e_mac", "e_adc", "e_dac", "e_load_per_um",
                     "e_opt", "e_reram"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be non-negative")

    def sram(self, bank_bytes):
        return sram_energy_per_byte(self.e_m0, bank_bytes)

    def line_load(self, line_um):
        return self.e_load_per_um * line_um


def energy_rates(proc: TechProcess = BASELINE, bank_bytes: float = 96 * KIB, bits: int = 8,
                 gammas: GammaConstants = DEFAULT_GAMMAS, *, e_m0: float = E_M0,
                 wavelength_m: float = 1550e-9, optical_efficiency: float = 0.8,
                 v_rms: float = 0.07, sample_period_s: float = 1e-9) -> EnergyRates:
    """Evaluate every primitive at ``proc``; e_m0 is the 45 nm SRAM prefactor."""
    e_m0_node = scale_to_node(e_m0, proc)
    return EnergyRates(
        e_m=sram_energy_per_byte(e_m0_node, bank_bytes),
        e_m0=e_m0_node,
        e_mac=mac_energy(proc, gammas, bits),
        e_adc=adc_energy(proc, gammas, bits),
        e_dac=dac_core_energy(proc, gammas, bits),
        e_load_per_um=load_energy(CAP_PER_UM, 1.0, V_LOAD),
        e_opt=optical_energy_per_pixel(wavelength_m, optical_efficiency, bits, proc.temperature_k),
        # memristor dissipation is a device load, not a CMOS-node quantity
        e_reram=reram_mac_energy(mean_conductance(bits), v_rms, sample_period_s),
        bits=bits,
    )
