"""Event-count simulator of a reflection-mode optical 4F convolution engine.

A layer runs in two phases per input-channel group.  The Fourier-load flash
writes C' channel images onto the SLM, records the transform (complex
recovery costs extra DAC and ADC events per pixel) and stores it back.  Each
output channel then gets one compute flash: its kernel is written to the
SLM, the product is transformed back and the m_out x m_out output is read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import _kernels as K
from . import primitives as pr
from .errors import InvalidArgumentError, UnsupportedWorkloadError
from .tally import EnergyTally
from .workload import ConvLayerSpec, NetworkSpec

LINE_LOAD_MODES = ("line", "amortized")


@dataclass(frozen=True)
class Optical4FConfig:
    slm_pixels: int = 4 * 1024 * 1024
    slm_pitch_um: float = 2.5
    wavelength_m: float = 1550e-9
    optical_efficiency: float = 0.8
    sram_total: int = 24 * pr.MIB
    sram_banks: int = 2048
    bits: int = 8
    #: DAC writes per pixel during the Fourier-load flash (1 image + 2 recovery)
    dac_events_fft_per_pixel: int = 3
    adc_events_fft_per_pixel: int = 2
    complex_factor: int = 2
    #: partial-sum width in bytes
    acc_bytes: int = 1
    #: "line" charges the whole SLM row line per DAC event,
    #: "amortized" splits it over the sqrt(N_hat) pixels on the line
    line_load: str = "line"

    def __post_init__(self):
        if self.slm_pixels < 1:
            raise InvalidArgumentError("slm_pixels must be >= 1")
        if self.sram_banks < 1 or self.sram_total % self.sram_banks:
            raise InvalidArgumentError("SRAM must split into equal banks")
        if min(self.dac_events_fft_per_pixel, self.adc_events_fft_per_pixel,
               self.complex_factor, self.acc_bytes) < 0:
            raise InvalidArgumentError("event counts must be non-negative")
        if self.line_load not in LINE_LOAD_MODES:
            raise InvalidArgumentError(f"line_load must be one of {LINE_LOAD_MODES}")

    @property
    def bank_bytes(self):
        return self.sram_total // self.sram_banks

    @property
    def line_um(self):
        return self.slm_pitch_um * math.sqrt(self.slm_pixels)

    def dac_load_energy(self):
        """Load energy charged per DAC event (J, node independent)."""
        e = pr.load_energy(pr.CAP_PER_UM, self.line_um, pr.V_LOAD)
        if self.line_load == "amortized":
            e /= math.sqrt(self.slm_pixels)
        return e


@dataclass(frozen=True)
class LayerPlan:
    layer: str
    c_prime: int
    groups: int
    group_sizes: tuple

    @property
    def load_flashes(self):
        return self.groups


def plan_layer(cfg: Optical4FConfig, layer: ConvLayerSpec) -> LayerPlan:
    cp = cfg.slm_pixels // layer.n**2
    if cp < 1:
        raise UnsupportedWorkloadError(
            f"layer {layer.name}: {layer.n}x{layer.n} input needs {layer.n**2} SLM pixels, "
            f"device has {cfg.slm_pixels}")
    sizes = tuple(min(cp, layer.c_in - s) for s in range(0, layer.c_in, cp))
    return LayerPlan(layer.name, cp, len(sizes), sizes)


@dataclass(frozen=True)
class Optical4FTrace:
    layer: str
    plan: LayerPlan
    flash_count: int
    load_flashes: int
    compute_flashes: int
    dac_events: int
    adc_events: int
    sram_bytes: int
    partial_sum_bytes: int
    laser_pixel_events: int
    macs: int
    energy: EnergyTally

    @property
    def pj_per_mac(self):
        return self.energy.total / self.macs * 1e12


@lru_cache(maxsize=4096)
def _raw_counts(n, k, m_out, c_in, c_out, c_prime, dac_fft, adc_fft, cf, acc):
    return tuple(int(x) for x in K.optical_counts(n, k, m_out, c_in, c_out, c_prime,
                                                  dac_fft, adc_fft, cf, acc))


def count_layer(cfg: Optical4FConfig, layer: ConvLayerSpec):
    plan = plan_layer(cfg, layer)
    raw = _raw_counts(layer.n, layer.k, layer.m_out, layer.c_in, layer.c_out, plan.c_prime,
                      cfg.dac_events_fft_per_pixel, cfg.adc_events_fft_per_pixel,
                      cfg.complex_factor, cfg.acc_bytes)
    return plan, raw


def simulate_layer(cfg: Optical4FConfig, layer: ConvLayerSpec, node_nm=45,
                   gammas=pr.DEFAULT_GAMMAS) -> Optical4FTrace:
    plan, raw = count_layer(cfg, layer)
    proc = pr.tech_process(node_nm)
    flashes = raw[K.O_LOAD_FLASH] + raw[K.O_COMPUTE_FLASH]
    sram_b = raw[K.O_ACT_B] + raw[K.O_KER_B] + raw[K.O_OUT_B] + raw[K.O_PSUM_B]
    laser_px = flashes * cfg.slm_pixels

    e_dac = pr.dac_core_energy(proc, gammas, cfg.bits) + cfg.dac_load_energy()
    e_sram = pr.sram_energy_per_byte(pr.scale_to_node(pr.E_M0, proc), cfg.bank_bytes)
    e_opt = pr.optical_energy_per_pixel(cfg.wavelength_m, cfg.optical_efficiency, cfg.bits,
                                        proc.temperature_k)
    energy = EnergyTally(
        dac=raw[K.O_DAC] * e_dac,
        adc=raw[K.O_ADC] * pr.adc_energy(proc, gammas, cfg.bits),
        sram=sram_b * e_sram,
        laser=laser_px * e_opt,
        ops=layer.n_op,
    )
    return Optical4FTrace(
        layer=layer.name, plan=plan, flash_count=flashes,
        load_flashes=raw[K.O_LOAD_FLASH], compute_flashes=raw[K.O_COMPUTE_FLASH],
        dac_events=raw[K.O_DAC], adc_events=raw[K.O_ADC], sram_bytes=sram_b,
        partial_sum_bytes=raw[K.O_PSUM_B], laser_pixel_events=laser_px,
        macs=layer.macs, energy=energy,
    )


@dataclass(frozen=True)
class NetworkResult:
    network: str
    node_nm: float
    traces: tuple
    tally: EnergyTally

    @property
    def efficiency(self):
        return self.tally.efficiency

    def breakdown_pj_per_mac(self):
        """pJ per MAC for each source the optical engine consumes."""
        macs = self.tally.macs
        return {s: getattr(self.tally, s) / macs * 1e12 for s in ("dac", "adc", "sram", "laser")}


def simulate_network(cfg: Optical4FConfig, net: NetworkSpec, node_nm=45,
                     gammas=pr.DEFAULT_GAMMAS) -> NetworkResult:
    traces = tuple(simulate_layer(cfg, layer, node_nm, gammas) for layer in net)
    total = sum((t.energy for t in traces), EnergyTally())
    return NetworkResult(net.name, node_nm, traces, total)


def sweep_network(cfg, net, nodes, gammas=pr.DEFAULT_GAMMAS):
    return [simulate_network(cfg, net, node, gammas) for node in nodes]
