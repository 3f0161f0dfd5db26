from __future__ import annotations

from dataclasses import dataclass, fields

SOURCES = ("sram", "dram", "mac", "dac", "adc", "load", "laser", "reg")


@dataclass(frozen=True)
class EnergyTally:
    """Energy (J) by source plus the operation count it paid for.

    ``ops`` counts multiplies and adds separately (two per MAC).
    """

    sram: float = 0.0
    dram: float = 0.0
    mac: float = 0.0
    dac: float = 0.0
    adc: float = 0.0
    load: float = 0.0
    laser: float = 0.0
    reg: float = 0.0
    ops: int = 0

    def __add__(self, other):
        if not isinstance(other, EnergyTally):
            return NotImplemented
        return EnergyTally(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                              for f in fields(self)})

    @property
    def total(self) -> float:
        return sum(getattr(self, s) for s in SOURCES)

    @property
    def efficiency(self) -> float:
        """Operations per joule."""
        return self.ops / self.total

    @property
    def macs(self) -> int:
        return self.ops // 2

    def per_mac(self, source) -> float:
        return getattr(self, source) / self.macs

    def as_dict(self):
        return {s: getattr(self, s) for s in SOURCES}
