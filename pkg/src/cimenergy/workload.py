"""Convolutional workloads: layer specs, network files and access/op counts."""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .errors import InvalidArgumentError, ParseError

NETWORK_HEADER = ["name", "n", "k", "c_in", "c_out", "stride"]


@dataclass(frozen=True)
class ConvLayerSpec:
    """One valid (unpadded) convolution of an n x n, c_in-channel input."""

    name: str
    n: int
    k: int
    c_in: int
    c_out: int
    stride: int = 1

    def __post_init__(self):
        if not (1 <= self.k <= self.n):
            raise InvalidArgumentError(f"layer {self.name}: need 1 <= k <= n")
        if self.c_in < 1 or self.c_out < 1 or self.stride < 1:
            raise InvalidArgumentError(f"layer {self.name}: channels and stride must be >= 1")

    @property
    def m_out(self) -> int:
        return (self.n - self.k) // self.stride + 1

    @property
    def out_pixels(self) -> int:
        """Output-pixel count used by the intensity formulas (n^2 at stride 1)."""
        return self.n**2 if self.stride == 1 else self.m_out**2

    @property
    def macs(self) -> int:
        return self.m_out**2 * self.k**2 * self.c_in * self.c_out

    @property
    def n_op(self) -> int:
        return 2 * self.macs

    @property
    def weights(self) -> int:
        return self.k**2 * self.c_in * self.c_out

    @property
    def input_size(self) -> int:
        return self.n**2 * self.c_in

    @property
    def touched_side(self) -> int:
        """Input rows (or columns) read by at least one kernel window."""
        if self.k >= self.stride:
            return (self.m_out - 1) * self.stride + self.k
        return self.m_out * self.k


@dataclass(frozen=True)
class MatmulDims:
    l: int
    n_dim: int
    m: int


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise InvalidArgumentError(f"network {self.name} has no layers")

    def __iter__(self):
        return iter(self.layers)

    def __len__(self):
        return len(self.layers)


# -- intensities --------------------------------------------------------------

def matmul_intensity(l, n_dim, m, exact=False):
    """2NML / (LN + NM + LM) for an (L x N)(N x M) product."""
    if min(l, n_dim, m) < 1:
        raise InvalidArgumentError("matrix dimensions must be >= 1")
    value = Fraction(2 * n_dim * m * l, l * n_dim + n_dim * m + l * m)
    return value if exact else float(value)


def conv_intensity_im2col(layer: ConvLayerSpec) -> float:
    """Intensity when the input is expanded to a Toeplitz matrix first."""
    p = layer.out_pixels
    k2 = layer.k**2
    ops = 2 * p * k2 * layer.c_in * layer.c_out
    accesses = p * k2 * layer.c_in + k2 * layer.c_in * layer.c_out + p * layer.c_out
    return ops / accesses


def native_accesses(layer: ConvLayerSpec) -> int:
    """Reads of every needed input and weight plus one write per output."""
    inputs = layer.n**2 if layer.stride == 1 else layer.touched_side**2
    return inputs * layer.c_in + layer.out_pixels * layer.c_out + layer.weights


def conv_intensity_native(layer: ConvLayerSpec) -> float:
    """Intensity when each input, weight and output is touched exactly once."""
    ops = 2 * layer.out_pixels * layer.k**2 * layer.c_in * layer.c_out
    return ops / native_accesses(layer)


def conv_intensity(layer, variant="eq8"):
    if variant == "eq8":
        return conv_intensity_im2col(layer)
    if variant == "eq9":
        return conv_intensity_native(layer)
    raise InvalidArgumentError(f"unknown intensity variant {variant!r}")


def to_matmul_dims(layer: ConvLayerSpec) -> MatmulDims:
    return MatmulDims(layer.m_out**2, layer.k**2 * layer.c_in, layer.c_out)


def optical4f_dims(layer: ConvLayerSpec, c_prime=math.inf):
    """Amortization factors (L, N, M) of the 4F processor for C' packed channels."""
    k2, co = layer.k**2, layer.c_out
    if math.isinf(c_prime):
        n_eff = float(k2 * co)
    else:
        n_eff = k2 * c_prime * co / (c_prime + co)
    return float(layer.n**2), n_eff, k2 * co / 2


# -- statistics ---------------------------------------------------------------

def lower_median(values):
    """Median that is always an element: the lower middle for even counts."""
    ordered = sorted(values)
    if not ordered:
        raise InvalidArgumentError("median of an empty sequence")
    return ordered[(len(ordered) - 1) // 2]


@dataclass(frozen=True)
class LayerMetrics:
    name: str
    n: int
    k: int
    c_in: int
    c_out: int
    a_eq8: float
    a_eq9: float
    l_prime: int
    n_prime: int
    m_prime: int
    n_op: int
    n_m: int
    weights: int
    input_size: int
    l_4f: float
    n_4f: float
    m_4f: float


METRIC_NAMES = [f.name for f in fields(LayerMetrics)][1:]


@dataclass(frozen=True)
class Aggregate:
    min: float
    max: float
    mean: float
    median: float
    total: float
    #: conventional median (midpoint of the two middle values for even counts)
    median_mid: float = 0.0


@dataclass
class WorkloadStats:
    network: str
    layers: list
    summary: dict = field(default_factory=dict)

    def median(self, metric):
        return self.summary[metric].median


def layer_metrics(layer: ConvLayerSpec) -> LayerMetrics:
    dims = to_matmul_dims(layer)
    a9 = conv_intensity_native(layer)
    l4, n4, m4 = optical4f_dims(layer)
    return LayerMetrics(
        name=layer.name, n=layer.n, k=layer.k, c_in=layer.c_in, c_out=layer.c_out,
        a_eq8=conv_intensity_im2col(layer), a_eq9=a9,
        l_prime=dims.l, n_prime=dims.n_dim, m_prime=dims.m,
        n_op=layer.n_op, n_m=native_accesses(layer),
        weights=layer.weights, input_size=layer.input_size,
        l_4f=l4, n_4f=n4, m_4f=m4,
    )


def workload_stats(net: NetworkSpec) -> WorkloadStats:
    if not len(net):
        raise InvalidArgumentError("empty network")
    rows = [layer_metrics(layer) for layer in net]
    summary = {}
    for metric in METRIC_NAMES:
        vals = [getattr(r, metric) for r in rows]
        summary[metric] = Aggregate(min(vals), max(vals), sum(vals) / len(vals),
                                    lower_median(vals), sum(vals), statistics.median(vals))
    return WorkloadStats(net.name, rows, summary)


# -- files --------------------------------------------------------------------

def parse_network(text: str, name: str = "network", path=None) -> NetworkSpec:
    """Parse the ``name,n,k,c_in,c_out,stride`` CSV format (``#`` comments)."""
    header = None
    layers = []
    for lineno, raw in enumerate(io.StringIO(text), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None:
            if cells != NETWORK_HEADER:
                raise ParseError(f"expected header {','.join(NETWORK_HEADER)}", path, lineno)
            header = cells
            continue
        if len(cells) != len(NETWORK_HEADER):
            raise ParseError(f"expected {len(NETWORK_HEADER)} fields, got {len(cells)}",
                             path, lineno)
        try:
            nums = [int(c) for c in cells[1:]]
            layers.append(ConvLayerSpec(cells[0], *nums))
        except (ValueError, InvalidArgumentError) as exc:
            raise ParseError(f"bad layer row: {exc}", path, lineno) from exc
    if not layers:
        raise ParseError("network file contains no layers", path)
    return NetworkSpec(name, layers)


def read_network(path) -> NetworkSpec:
    path = Path(path)
    return parse_network(path.read_text(), name=path.stem, path=str(path))


def format_network(net: NetworkSpec) -> str:
    out = [",".join(NETWORK_HEADER)]
    out += [f"{l.name},{l.n},{l.k},{l.c_in},{l.c_out},{l.stride}" for l in net]
    return "\n".join(out) + "\n"


def rescale_network(net: NetworkSpec, input_mpx: float, base_mpx: float = 1.0) -> NetworkSpec:
    """Resize every layer's spatial side by sqrt(input_mpx / base_mpx)."""
    if input_mpx <= 0:
        raise InvalidArgumentError("input_mpx must be positive")
    if input_mpx == base_mpx:
        return net
    f = math.sqrt(input_mpx / base_mpx)
    layers = [ConvLayerSpec(l.name, max(l.k, round(l.n * f)), l.k, l.c_in, l.c_out, l.stride)
              for l in net]
    return NetworkSpec(net.name, layers)


def shipped_network(name: str) -> NetworkSpec:
    from .primitives import data_dir

    path = data_dir() / "networks" / f"{name.lower()}.csv"
    if not path.exists():
        from .errors import ConfigurationError

        available = sorted(p.stem for p in (data_dir() / "networks").glob("*.csv"))
        raise ConfigurationError(f"no shipped network {name!r}; available: {available}")
    return read_network(path)
