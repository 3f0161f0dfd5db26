"""Run manifests and deterministic CSV output."""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError

MANIFEST_PREFIX = "# "


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines a run's output, embedded as CSV comments.

    ``inputs`` maps a display label to a file path; only the label and the
    file's hash are written so that output does not depend on where the
    data directory lives.
    """

    command: str
    inputs: dict = field(default_factory=dict)
    preset: str = ""
    nodes: tuple = ()
    bits: int = 8
    flags: dict = field(default_factory=dict)
    version: str = ""

    def lines(self):
        out = [f"command: {self.command}", f"version: {self.version}"]
        if self.preset:
            out.append(f"preset: {self.preset}")
        if self.nodes:
            out.append("nodes: " + ",".join(format_node(n) for n in self.nodes))
        out.append(f"bits: {self.bits}")
        for key in sorted(self.flags):
            out.append(f"flag {key}: {self.flags[key]}")
        for label in sorted(self.inputs):
            out.append(f"input {label}: sha256={sha256_file(self.inputs[label])}")
        return [MANIFEST_PREFIX + line for line in out]


def format_node(node) -> str:
    return f"{node:g}"


def fmt(value, digits=6) -> str:
    """Fixed-decimal rendering, locale independent."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.{digits}f}"
    return "0." + "0" * digits if text == "-0." + "0" * digits else text


def render_csv(manifest: RunManifest | None, header, rows, digits=6) -> str:
    buf = io.StringIO()
    if manifest is not None:
        for line in manifest.lines():
            buf.write(line + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        buf.write(",".join(fmt(v, digits) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, manifest, header, rows, digits=6) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(render_csv(manifest, header, rows, digits))
    return path


def read_csv(path):
    """Return ``(comments, header, rows)``; cells stay strings."""
    comments, header, rows = [], None, []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if not line.strip():
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        elif len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields", str(path), lineno)
        else:
            rows.append(cells)
    if header is None:
        raise ParseError("no header row", str(path))
    return comments, header, rows
