"""Closed-form efficiency models for scalar, digital in-memory and analog processors.

Efficiencies are operations per joule; an operation is a multiply or an add,
so one MAC counts as two.  Each model returns an :class:`EfficiencyPoint`
whose parts add up to the energy per operation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

from . import primitives as pr
from .errors import ConfigurationError, InvalidArgumentError, ParseError, UnsupportedWorkloadError
from .workload import (ConvLayerSpec, NetworkSpec, conv_intensity, lower_median,
                       optical4f_dims, to_matmul_dims)

PART_NAMES = ("memory", "dac_input", "dac_weight", "adc", "mac", "load", "laser")

#: the single layer used for the technology-node comparison
TABLE_V_LAYER = ConvLayerSpec("tableV", n=512, k=3, c_in=128, c_out=128)

DEFAULT_NODES = (180, 130, 90, 65, 45, 32, 28, 22, 14, 10, 7)


@dataclass(frozen=True)
class EfficiencyPoint:
    node_nm: float
    eta: float
    e_op_parts: dict

    @classmethod
    def from_parts(cls, node_nm, parts):
        full = {name: float(parts.get(name, 0.0)) for name in PART_NAMES}
        if any(v < 0 for v in full.values()):
            raise InvalidArgumentError("energy parts must be non-negative")
        return cls(node_nm, 1.0 / sum(full.values()), full)

    @property
    def e_op(self):
        return sum(self.e_op_parts.values())

    @property
    def tops_per_w(self):
        return self.eta * 1e-12


# -- processor configurations -------------------------------------------------

@dataclass(frozen=True)
class CPU:
    sram_bank_bytes: int = 96 * pr.KIB

    arch = "cpu"

    @property
    def bank_bytes(self):
        return self.sram_bank_bytes


@dataclass(frozen=True)
class _Banked:
    @property
    def bank_bytes(self):
        return self.sram_total_bytes / self.sram_banks

    def _check_banks(self):
        if self.sram_banks < 1 or self.sram_total_bytes < self.sram_banks:
            raise InvalidArgumentError("need 1 <= sram_banks <= sram_total_bytes")
        if self.sram_total_bytes % self.sram_banks:
            raise InvalidArgumentError(
                f"{self.sram_total_bytes} B of SRAM does not split into {self.sram_banks} equal banks")


@dataclass(frozen=True)
class DigitalIM(_Banked):
    array_rows: int = 256
    array_cols: int = 256
    sram_total_bytes: int = 24 * pr.MIB
    sram_banks: int = 256
    intensity: str = "eq8"

    arch = "digital_im"

    def __post_init__(self):
        self._check_banks()


@dataclass(frozen=True)
class AnalogPlanar(_Banked):
    """Silicon-photonic style crossbar; modulator energies are device loads."""

    rows: int = 40
    cols: int = 40
    pitch_um: float = 250.0
    e_mod_input: float = 0.5e-12
    e_mod_weight: float = 0.5e-12
    signed: bool = True
    optical: bool = True
    wavelength_m: float = 1550e-9
    optical_efficiency: float = 0.8
    sram_total_bytes: int = 40 * 600 * pr.KIB
    sram_banks: int = 40
    intensity: str = "eq8"

    arch = "analog_planar"

    def __post_init__(self):
        if min(self.rows, self.cols) < 1:
            raise InvalidArgumentError("array dimensions must be >= 1")
        self._check_banks()


@dataclass(frozen=True)
class ReRAM(_Banked):
    rows: int = 256
    cols: int = 256
    pitch_um: float = 4.0
    v_rms: float = 0.07
    sample_period_s: float = 1e-9
    signed: bool = True
    sram_total_bytes: int = 24 * pr.MIB
    sram_banks: int = 256
    intensity: str = "eq8"

    arch = "reram"

    def __post_init__(self):
        if min(self.rows, self.cols) < 1:
            raise InvalidArgumentError("array dimensions must be >= 1")
        self._check_banks()


@dataclass(frozen=True)
class Optical4F(_Banked):
    slm_pixels: int = 4 * 1024 * 1024
    pitch_um: float = 2.5
    wavelength_m: float = 1550e-9
    optical_efficiency: float = 0.8
    sram_total_bytes: int = 24 * pr.MIB
    sram_banks: int = 2048
    intensity: str = "eq9"

    arch = "optical4f"

    def __post_init__(self):
        if self.slm_pixels < 1:
            raise InvalidArgumentError("slm_pixels must be >= 1")
        self._check_banks()

    @property
    def line_um(self):
        """Length of one SLM addressing line (square aperture)."""
        return self.pitch_um * math.sqrt(self.slm_pixels)


ARCHITECTURES = {cls.arch: cls for cls in (CPU, DigitalIM, AnalogPlanar, ReRAM, Optical4F)}


# -- workloads as seen by the analytic models ---------------------------------

@dataclass(frozen=True)
class AnalyticWorkload:
    """The handful of numbers the closed-form models consume.

    Built either from one layer or from a network by taking per-quantity
    medians, as used for network-level estimates.
    """

    a_eq8: float
    a_eq9: float
    l_prime: float
    n_prime: float
    m_prime: float
    l_4f: float = math.nan
    n_4f: float = math.nan
    m_4f: float = math.nan
    label: str = ""

    def intensity(self, variant):
        if variant == "eq8":
            return self.a_eq8
        if variant == "eq9":
            return self.a_eq9
        raise InvalidArgumentError(f"unknown intensity variant {variant!r}")


def c_prime(layer: ConvLayerSpec, slm_pixels) -> float:
    """Input channels that fit on the SLM side by side: floor(N_hat / n^2)."""
    if slm_pixels is None or math.isinf(slm_pixels):
        return math.inf
    return slm_pixels // layer.n**2


def _check_fits(layer, slm_pixels):
    cp = c_prime(layer, slm_pixels)
    if cp < 1:
        raise UnsupportedWorkloadError(
            f"layer {layer.name}: {layer.n}x{layer.n} image ({layer.n**2} px) exceeds the "
            f"{slm_pixels}-pixel SLM; need at least {layer.n**2} pixels")
    return cp


def layer_workload(layer: ConvLayerSpec, slm_pixels=None) -> AnalyticWorkload:
    dims = to_matmul_dims(layer)
    if slm_pixels is None:
        l4, n4, m4 = optical4f_dims(layer)
    else:
        l4, n4, m4 = optical4f_dims(layer, _check_fits(layer, slm_pixels))
    return AnalyticWorkload(conv_intensity(layer, "eq8"), conv_intensity(layer, "eq9"),
                            dims.l, dims.n_dim, dims.m, l4, n4, m4, layer.name)


def network_workload(net: NetworkSpec, slm_pixels=None, median=None) -> AnalyticWorkload:
    """Per-quantity medians over the network's layers (lower median by default)."""
    median = median or lower_median
    per_layer = [layer_workload(layer, slm_pixels) for layer in net]
    vals = {f.name: median([getattr(w, f.name) for w in per_layer])
            for f in fields(AnalyticWorkload) if f.name != "label"}
    return AnalyticWorkload(**vals, label=net.name)


def as_workload(workload, slm_pixels=None) -> AnalyticWorkload:
    if isinstance(workload, AnalyticWorkload):
        return workload
    if isinstance(workload, ConvLayerSpec):
        return layer_workload(workload, slm_pixels)
    if isinstance(workload, NetworkSpec):
        return network_workload(workload, slm_pixels)
    raise InvalidArgumentError(f"cannot build a workload from {type(workload).__name__}")


# -- closed-form models -------------------------------------------------------

def cpu_efficiency(rates: pr.EnergyRates, node_nm=45) -> EfficiencyPoint:
    """Scalar machine: three reads and one write per two operations."""
    return EfficiencyPoint.from_parts(node_nm, {"memory": 2 * rates.e_m, "mac": rates.e_mac})


def digital_im_efficiency(rates: pr.EnergyRates, a: float, node_nm=45) -> EfficiencyPoint:
    if not a > 0:
        raise InvalidArgumentError("arithmetic intensity must be positive")
    return EfficiencyPoint.from_parts(node_nm, {"memory": rates.e_m / a, "mac": rates.e_mac})


def analog_vm_energy_per_op(e_dac1, e_dac2, e_adc, n_dim, m, signed=False):
    """Vector-matrix product; the weight-reconfiguration term never amortizes."""
    if min(n_dim, m) < 1:
        raise InvalidArgumentError("dimensions must be >= 1")
    f = 2.0 if signed else 1.0
    return f * (e_dac1 / m + e_dac2 + e_adc / n_dim)


def analog_mm_energy_per_op(e_dac1, e_dac2, e_adc, l, n_dim, m, hat_n=math.inf,
                            hat_m=math.inf, signed=False):
    """Matrix-matrix product on a hat_n x hat_m array: amortized by min(array, problem)."""
    if min(l, n_dim, m, hat_n, hat_m) < 1:
        raise InvalidArgumentError("dimensions must be >= 1")
    big_m = min(hat_m, m)
    big_n = min(hat_n, n_dim)
    f = 2.0 if signed else 1.0
    return f * (e_dac1 / big_m + e_dac2 / l + e_adc / big_n)


def optical4f_phase_energies(layer: ConvLayerSpec, e_dac, e_adc, dac_per_pixel=4):
    """Fourier-load and compute-phase energies of one layer (all channels at once).

    Returns ``(E_fft, E_conv)``; the output side is taken as n x n.
    """
    n2 = layer.n**2
    e_fft = n2 * layer.c_in * (2 * e_adc + dac_per_pixel * e_dac)
    e_conv = 2 * layer.weights * e_dac + 2 * n2 * layer.c_out * e_adc
    return e_fft, e_conv


def optical4f_dac_energy(rates: pr.EnergyRates, spec: Optical4F):
    """Per-pixel SLM write: (core, line load, laser) in joules."""
    return rates.e_dac, rates.line_load(spec.line_um), rates.e_opt


def optical4f_efficiency(rates: pr.EnergyRates, layer, hat_pixels, e_m, a, node_nm=45,
                         pitch_um=2.5) -> EfficiencyPoint:
    """4F processor with C' = floor(N_hat / n^2) channels packed per aperture.

    ``layer`` may be a :class:`ConvLayerSpec` or an :class:`AnalyticWorkload`
    carrying precomputed (L, N, M).
    """
    if not a > 0:
        raise InvalidArgumentError("arithmetic intensity must be positive")
    if isinstance(layer, ConvLayerSpec):
        cp = _check_fits(layer, hat_pixels)
        l, n_eff, m = optical4f_dims(layer, cp)
    else:
        l, n_eff, m = layer.l_4f, layer.n_4f, layer.m_4f
    core = rates.e_dac
    load = rates.line_load(pitch_um * math.sqrt(hat_pixels))
    laser = rates.e_opt
    return EfficiencyPoint.from_parts(node_nm, {
        "memory": e_m / a,
        "dac_input": core / m,
        "dac_weight": core / l,
        "adc": rates.e_adc / n_eff,
        "load": load / m + load / l,
        "laser": laser / m + laser / l,
    })


def _rates(spec, proc, bits, gammas):
    kw = {}
    if isinstance(spec, (Optical4F, AnalogPlanar)):
        kw = dict(wavelength_m=spec.wavelength_m, optical_efficiency=spec.optical_efficiency)
    if isinstance(spec, ReRAM):
        kw = dict(v_rms=spec.v_rms, sample_period_s=spec.sample_period_s)
    return pr.energy_rates(proc, spec.bank_bytes, bits, gammas, **kw)


def evaluate(spec, workload, node_nm=45, bits=8, gammas=pr.DEFAULT_GAMMAS,
             intensity=None) -> EfficiencyPoint:
    """Efficiency of ``spec`` running ``workload`` (layer, network or AnalyticWorkload)."""
    proc = pr.tech_process(node_nm)
    rates = _rates(spec, proc, bits, gammas)
    slm = spec.slm_pixels if isinstance(spec, Optical4F) else None
    w = as_workload(workload, slm)
    if isinstance(spec, CPU):
        return cpu_efficiency(rates, node_nm)
    a = w.intensity(intensity or spec.intensity)
    if isinstance(spec, DigitalIM):
        return digital_im_efficiency(rates, a, node_nm)
    if isinstance(spec, Optical4F):
        return optical4f_efficiency(rates, w, spec.slm_pixels, rates.e_m, a, node_nm,
                                    spec.pitch_um)
    if isinstance(spec, (AnalogPlanar, ReRAM)):
        return _planar_point(spec, rates, w, a, node_nm)
    raise ConfigurationError(f"unknown processor spec {spec!r}")


def _planar_point(spec, rates, w, a, node_nm):
    big_m = min(spec.cols, w.m_prime)
    big_n = min(spec.rows, w.n_prime)
    f = 2.0 if spec.signed else 1.0
    load_in = rates.line_load(spec.pitch_um * spec.cols)
    load_w = rates.line_load(spec.pitch_um * spec.rows)
    parts = {
        "memory": rates.e_m / a,
        "dac_input": f * rates.e_dac / big_m,
        "dac_weight": f * rates.e_dac / w.l_prime,
        "adc": f * rates.e_adc / big_n,
        "load": f * (load_in / big_m + load_w / w.l_prime),
    }
    if isinstance(spec, AnalogPlanar):
        parts["load"] += f * (spec.e_mod_input / big_m + spec.e_mod_weight / w.l_prime)
        if spec.optical:
            parts["laser"] = f * rates.e_opt / big_m
    else:
        parts["mac"] = rates.e_reram
    return EfficiencyPoint.from_parts(node_nm, parts)


def efficiency_sweep(spec, workload, node_list=DEFAULT_NODES, bits=8,
                     gammas=pr.DEFAULT_GAMMAS, intensity=None):
    if not node_list:
        raise InvalidArgumentError("node list is empty")
    slm = spec.slm_pixels if isinstance(spec, Optical4F) else None
    w = as_workload(workload, slm)
    return [evaluate(spec, w, node, bits, gammas, intensity) for node in node_list]


# -- presets ------------------------------------------------------------------

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _coerce(cls, key, value, path, lineno):
    types = {f.name: f.type for f in fields(cls)}
    if key not in types:
        raise ParseError(f"{cls.arch} has no parameter {key!r}", path, lineno)
    kind = types[key]
    try:
        if kind in ("bool", bool):
            return _BOOL[value.lower()]
        if kind in ("int", int):
            return int(float(value)) if float(value).is_integer() else int(value)
        if kind in ("float", float):
            return float(value)
        return value
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad value {value!r} for {key}", path, lineno) from exc


def parse_presets(text: str, path=None) -> dict:
    """``preset,key,value`` rows; each preset needs an ``arch`` row."""
    raw: dict[str, dict] = {}
    where: dict[tuple, int] = {}
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if not header_seen:
            if cells != ["preset", "key", "value"]:
                raise ParseError("expected header preset,key,value", path, lineno)
            header_seen = True
            continue
        if len(cells) != 3:
            raise ParseError("expected 3 fields", path, lineno)
        name, key, value = cells
        raw.setdefault(name, {})[key] = value
        where[(name, key)] = lineno
    presets = {}
    for name, kv in raw.items():
        arch = kv.pop("arch", None)
        if arch not in ARCHITECTURES:
            raise ParseError(f"preset {name!r}: unknown or missing arch {arch!r}", path)
        cls = ARCHITECTURES[arch]
        params = {k: _coerce(cls, k, v, path, where[(name, k)]) for k, v in kv.items()}
        try:
            presets[name] = cls(**params)
        except InvalidArgumentError as exc:
            raise ParseError(f"preset {name!r}: {exc}", path) from exc
    return presets


def read_presets(path=None) -> dict:
    path = Path(path) if path is not None else pr.data_dir() / "presets.csv"
    return parse_presets(path.read_text(), str(path))


def get_preset(name, path=None):
    presets = read_presets(path)
    if name not in presets:
        raise ConfigurationError(
            f"unknown preset {name!r}; available presets: {', '.join(sorted(presets))}")
    return presets[name]
