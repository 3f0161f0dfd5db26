"""Event-count simulator of a weight-stationary systolic array running im2col convolutions.

The N' x M' weight matrix is cut into array-sized tiles.  For each tile the
kernel steps the skewed activation wavefront cycle by cycle and counts MACs,
edge injections (SRAM activation reads) and bottom-edge ejections.  Row bands
beyond the first read back and rewrite the partial sums of the band above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from . import _kernels as K
from . import primitives as pr
from .errors import InvalidArgumentError
from .tally import EnergyTally
from .workload import ConvLayerSpec, NetworkSpec, to_matmul_dims

#: 256x256 array occupying 24 % of a 331 mm^2 die
TPU_DIE_MM2 = 331.0
TPU_ARRAY_FRACTION = 0.24


def tile_pitch_um(rows=256, die_mm2=TPU_DIE_MM2, fraction=TPU_ARRAY_FRACTION):
    return math.sqrt(fraction * die_mm2 * 1e6) / rows


@dataclass(frozen=True)
class SystolicConfig:
    rows: int = 256
    cols: int = 256
    sram_total: int = 24 * pr.MIB
    sram_banks: int = 256
    bits_act: int = 8
    bits_acc: int = 32
    tile_pitch_um: float = field(default_factory=tile_pitch_um)
    #: J per byte held in a tile register; default: 8 KB SRAM anchor scaled to 5 bytes
    e_tile_reg: float | None = None
    #: J per bit moved one tile; default: line load over one tile pitch
    e_tile_load: float | None = None
    #: J per weight byte fetched; default: SRAM energy at the bank size
    e_weight_fetch: float | None = None
    double_reg: bool = False

    def __post_init__(self):
        if min(self.rows, self.cols) < 1:
            raise InvalidArgumentError("array dimensions must be >= 1")
        if self.sram_banks < 1 or self.sram_total % self.sram_banks:
            raise InvalidArgumentError("SRAM must split into equal banks")

    @property
    def bank_bytes(self):
        return self.sram_total // self.sram_banks

    @property
    def word_bits(self):
        return self.bits_act + self.bits_acc

    def tile_reg_energy(self):
        """45 nm J/byte for the in-tile register."""
        if self.e_tile_reg is not None:
            return self.e_tile_reg
        return pr.sram_energy_per_byte(pr.E_M0, self.word_bits / 8)

    def tile_load_energy(self):
        """J/bit for one hop between neighbouring tiles (node independent)."""
        if self.e_tile_load is not None:
            return self.e_tile_load
        return pr.load_energy(pr.CAP_PER_UM, self.tile_pitch_um, pr.V_LOAD)


@dataclass(frozen=True)
class SystolicCounts:
    cycles: int
    macs: int
    sram_reads_bytes: int
    sram_writes_bytes: int
    dram_weight_bytes: int
    tile_hops: int
    partial_sum_spills_bytes: int
    reg_writes_bytes: int
    tiles: int


@dataclass(frozen=True)
class LayerTrace:
    layer: str
    counts: SystolicCounts
    energy: EnergyTally

    def __getattr__(self, name):
        # expose counters directly: trace.macs, trace.tile_hops, ...
        if name != "counts" and hasattr(self.counts, name):
            return getattr(self.counts, name)
        raise AttributeError(name)


@lru_cache(maxsize=4096)
def _raw_counts(l, n_dim, m, rows, cols):
    return tuple(int(x) for x in K.systolic_counts(l, n_dim, m, rows, cols))


def count_layer(cfg: SystolicConfig, layer: ConvLayerSpec) -> SystolicCounts:
    if layer.m_out < 1:
        raise InvalidArgumentError(f"layer {layer.name} has no output pixels")
    dims = to_matmul_dims(layer)
    raw = _raw_counts(dims.l, dims.n_dim, dims.m, cfg.rows, cfg.cols)
    acc_bytes = cfg.bits_acc // 8
    act_bytes = cfg.bits_act // 8
    spill = raw[K.S_SPILL] * acc_bytes
    macs = raw[K.S_MACS]
    return SystolicCounts(
        cycles=raw[K.S_CYCLES],
        macs=macs,
        sram_reads_bytes=raw[K.S_ACT_IN] * act_bytes + spill,
        sram_writes_bytes=spill + dims.l * dims.m * act_bytes,
        dram_weight_bytes=raw[K.S_WEIGHTS] * act_bytes,
        tile_hops=macs,
        partial_sum_spills_bytes=2 * spill,
        reg_writes_bytes=macs * (cfg.word_bits // 8) * (2 if cfg.double_reg else 1),
        tiles=raw[K.S_TILES],
    )


def price(cfg: SystolicConfig, counts: SystolicCounts, proc: pr.TechProcess,
          bits=8, gammas=pr.DEFAULT_GAMMAS) -> EnergyTally:
    e_sram = pr.sram_energy_per_byte(pr.scale_to_node(pr.E_M0, proc), cfg.bank_bytes)
    if cfg.e_weight_fetch is None:
        e_weight = e_sram
    else:
        e_weight = pr.scale_to_node(cfg.e_weight_fetch, proc)
    return EnergyTally(
        sram=(counts.sram_reads_bytes + counts.sram_writes_bytes) * e_sram,
        dram=counts.dram_weight_bytes * e_weight,
        mac=counts.macs * pr.mac_energy(proc, gammas, bits),
        load=counts.tile_hops * cfg.word_bits * pr.scale_to_node(
            cfg.tile_load_energy(), proc, is_load_or_laser=True),
        reg=counts.reg_writes_bytes * pr.scale_to_node(cfg.tile_reg_energy(), proc),
        ops=2 * counts.macs,
    )


def simulate_layer(cfg: SystolicConfig, layer: ConvLayerSpec, node_nm=45, bits=8,
                   gammas=pr.DEFAULT_GAMMAS) -> LayerTrace:
    counts = count_layer(cfg, layer)
    energy = price(cfg, counts, pr.tech_process(node_nm), bits, gammas)
    return LayerTrace(layer.name, counts, energy)


@dataclass(frozen=True)
class NetworkResult:
    network: str
    node_nm: float
    traces: tuple
    tally: EnergyTally

    @property
    def efficiency(self):
        return self.tally.efficiency


def simulate_network(cfg: SystolicConfig, net: NetworkSpec, node_nm=45, bits=8,
                     gammas=pr.DEFAULT_GAMMAS) -> NetworkResult:
    traces = tuple(simulate_layer(cfg, layer, node_nm, bits, gammas) for layer in net)
    total = sum((t.energy for t in traces), EnergyTally())
    return NetworkResult(net.name, node_nm, traces, total)


def sweep_network(cfg, net, nodes, bits=8, gammas=pr.DEFAULT_GAMMAS):
    return [simulate_network(cfg, net, node, bits, gammas) for node in nodes]
