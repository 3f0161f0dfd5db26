"""``cimenergy`` command line: intensity tables, analytic sweeps and simulations."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from . import analytic as an
from . import optical4f as o4
from . import primitives as pr
from . import systolic as sy
from .errors import CimEnergyError, InvalidArgumentError
from .report import RunManifest, format_node, render_csv, write_csv
from .svg import line_chart, stacked_bar_chart, write_svg
from .tally import SOURCES
from .workload import (METRIC_NAMES, read_network, rescale_network, shipped_network,
                       workload_stats)

FIG5_PRESETS = ("cpu45", "tpu-like", "photonic40", "optical4f-4mpx", "reram256")
SIM_PRESETS = {"systolic": "tpu-like", "optical4f": "optical4f-4mpx"}


def parse_nodes(text):
    try:
        nodes = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InvalidArgumentError(f"bad node list {text!r}") from None
    if not nodes or any(n <= 0 for n in nodes):
        raise InvalidArgumentError(f"bad node list {text!r}")
    return tuple(int(n) if n.is_integer() else n for n in nodes)


def load_network(ref, input_mpx=1.0):
    """Path to a network CSV, or the name of a shipped network."""
    path = Path(ref)
    if path.is_file():
        net, src = read_network(path), path
    else:
        net = shipped_network(ref)
        src = pr.data_dir() / "networks" / f"{ref.lower()}.csv"
    return rescale_network(net, input_mpx), src


def _data_inputs():
    return {"node_scaling": pr.data_dir() / "node_scaling.csv",
            "presets": pr.data_dir() / "presets.csv"}


def _emit(args, name, manifest, header, rows, digits=6):
    if args.out is None:
        sys.stdout.write(render_csv(manifest, header, rows, digits))
        return None
    path = write_csv(Path(args.out) / name, manifest, header, rows, digits)
    print(path)
    return path


# -- intensity ----------------------------------------------------------------

def cmd_intensity(args):
    net, src = load_network(args.network, args.input_mpx)
    stats = workload_stats(net)
    manifest = RunManifest("intensity", {"network": src}, flags={"input_mpx": args.input_mpx},
                           version=__version__)
    header = ["layer"] + METRIC_NAMES
    rows = [[m.name] + [getattr(m, k) for k in METRIC_NAMES] for m in stats.layers]
    rows.append(["median"] + [stats.summary[k].median for k in METRIC_NAMES])
    rows.append(["median_mid"] + [stats.summary[k].median_mid for k in METRIC_NAMES])
    _emit(args, f"intensity_{net.name}.csv", manifest, header, rows, digits=3)
    return 0


# -- analytic -----------------------------------------------------------------

ANALYTIC_HEADER = (["preset", "arch", "node_nm", "eta_TOPS_per_W", "e_op_pJ"]
                   + [f"{p}_pJ" for p in an.PART_NAMES])


def cmd_analytic(args):
    names = args.preset.split(",") if args.preset else list(FIG5_PRESETS)
    specs = [(n, an.get_preset(n)) for n in names]
    inputs = _data_inputs()
    if args.network:
        net, src = load_network(args.network, args.input_mpx)
        workload, label = net, net.name
        inputs["network"] = src
        intensity = args.intensity
    else:
        workload, label = an.TABLE_V_LAYER, "tableV"
        intensity = args.intensity or "eq8"
    gammas = pr.GAMMA_PRESETS[args.gammas]
    rows = []
    for name, spec in specs:
        for pt in an.efficiency_sweep(spec, workload, args.nodes, args.bits, gammas, intensity):
            rows.append([name, spec.arch, format_node(pt.node_nm), pt.tops_per_w, pt.e_op * 1e12]
                        + [pt.e_op_parts[p] * 1e12 for p in an.PART_NAMES])
    manifest = RunManifest("analytic", inputs, ",".join(names), args.nodes, args.bits,
                           {"workload": label, "intensity": intensity or "preset",
                            "gammas": args.gammas, "input_mpx": args.input_mpx},
                           __version__)
    path = _emit(args, "analytic.csv", manifest, ANALYTIC_HEADER, rows, digits=9)
    if path is not None:
        svg = line_chart(path, "node_nm", "eta_TOPS_per_W", series="preset",
                         title=f"Analytic efficiency, {label}", ylabel="TOPS/W")
        print(write_svg(path.with_suffix(".svg"), svg))
    return 0


# -- simulate -----------------------------------------------------------------

SYSTOLIC_TRACE = ["layer", "macs", "sram_rd_B", "sram_wr_B", "dram_B", "hops",
                  "E_sram_pJ", "E_mac_pJ", "E_load_pJ", "E_reg_pJ", "E_total_pJ"]
OPTICAL_TRACE = ["layer", "flashes", "dac_ev", "adc_ev", "sram_B",
                 "E_dac_pJ", "E_adc_pJ", "E_sram_pJ", "E_laser_pJ", "pJ_per_MAC"]
SUMMARY_HEADER = (["node_nm", "eta_sim_TOPS_per_W", "eta_analytic_TOPS_per_W",
                   "analytic_over_sim"] + [f"{s}_pJ_per_MAC" for s in SOURCES])


def systolic_config(spec: an.DigitalIM, args) -> sy.SystolicConfig:
    return sy.SystolicConfig(rows=spec.array_rows, cols=spec.array_cols,
                             sram_total=spec.sram_total_bytes, sram_banks=spec.sram_banks,
                             double_reg=args.double_reg)


def optical_config(spec: an.Optical4F, args) -> o4.Optical4FConfig:
    return o4.Optical4FConfig(
        slm_pixels=args.slm_pixels or spec.slm_pixels, slm_pitch_um=spec.pitch_um,
        wavelength_m=spec.wavelength_m, optical_efficiency=spec.optical_efficiency,
        sram_total=spec.sram_total_bytes, sram_banks=spec.sram_banks, bits=args.bits,
        dac_events_fft_per_pixel=4 if args.dac4 else 3,
        acc_bytes=2 if args.acc16 else 1, line_load=args.line_load)


def _systolic_rows(result):
    rows = []
    for t in result.traces:
        e = t.energy
        rows.append([t.layer, t.macs, t.sram_reads_bytes, t.sram_writes_bytes,
                     t.dram_weight_bytes, t.tile_hops, (e.sram + e.dram) * 1e12,
                     e.mac * 1e12, e.load * 1e12, e.reg * 1e12, e.total * 1e12])
    return rows


def _optical_rows(result):
    rows = []
    for t in result.traces:
        e = t.energy
        rows.append([t.layer, t.flash_count, t.dac_events, t.adc_events, t.sram_bytes,
                     e.dac * 1e12, e.adc * 1e12, e.sram * 1e12, e.laser * 1e12, t.pj_per_mac])
    return rows


def cmd_simulate(args):
    preset = args.preset or SIM_PRESETS[args.arch]
    spec = an.get_preset(preset)
    net, src = load_network(args.network, args.input_mpx)
    gammas = pr.GAMMA_PRESETS[args.gammas]
    if args.arch == "systolic":
        if not isinstance(spec, an.DigitalIM):
            raise InvalidArgumentError(f"preset {preset} is not a digital_im configuration")
        cfg = systolic_config(spec, args)
        results = [sy.simulate_network(cfg, net, node, args.bits, gammas) for node in args.nodes]
        trace_header, trace_rows = SYSTOLIC_TRACE, _systolic_rows
        flags = {"double_reg": args.double_reg}
    else:
        if not isinstance(spec, an.Optical4F):
            raise InvalidArgumentError(f"preset {preset} is not an optical4f configuration")
        cfg = optical_config(spec, args)
        spec = replace(spec, slm_pixels=cfg.slm_pixels)
        results = [o4.simulate_network(cfg, net, node, gammas) for node in args.nodes]
        trace_header, trace_rows = OPTICAL_TRACE, _optical_rows
        flags = {"dac4": args.dac4, "acc16": args.acc16, "line_load": args.line_load,
                 "slm_pixels": cfg.slm_pixels}
    flags.update(intensity=args.intensity or "preset", gammas=args.gammas,
                 input_mpx=args.input_mpx, network=net.name)
    inputs = dict(_data_inputs(), network=src)

    def manifest(kind, nodes):
        return RunManifest(f"simulate {args.arch} {kind}", inputs, preset, nodes, args.bits,
                           flags, __version__)

    analytic = an.efficiency_sweep(spec, net, args.nodes, args.bits, gammas, args.intensity)
    summary = []
    for res, ref in zip(results, analytic):
        node = format_node(res.node_nm)
        _emit(args, f"{args.arch}_trace_{node}nm.csv", manifest("trace", (res.node_nm,)),
              trace_header, trace_rows(res))
        macs = res.tally.macs
        eta = res.efficiency * 1e-12
        summary.append([node, eta, ref.tops_per_w, ref.tops_per_w / eta]
                       + [getattr(res.tally, s) / macs * 1e12 for s in SOURCES])
    path = _emit(args, f"{args.arch}_summary.csv", manifest("summary", args.nodes),
                 SUMMARY_HEADER, summary, digits=9)
    if path is not None:
        overlay = line_chart(path, "node_nm", ["eta_sim_TOPS_per_W", "eta_analytic_TOPS_per_W"],
                             title=f"{args.arch}, {net.name}: cycle model vs analytic",
                             ylabel="TOPS/W")
        print(write_svg(path.with_name(f"{args.arch}_overlay.svg"), overlay))
        used = [s for s in SOURCES if any(float(r[4 + SOURCES.index(s)]) > 0 for r in summary)]
        bars = stacked_bar_chart(path, "node_nm", [f"{s}_pJ_per_MAC" for s in used],
                                 title=f"{args.arch}, {net.name}: energy per MAC")
        print(write_svg(path.with_name(f"{args.arch}_breakdown.svg"), bars))
    return 0


# -- argument parsing ---------------------------------------------------------

def _common(p, nodes=True):
    if nodes:
        p.add_argument("--nodes", type=parse_nodes, default=an.DEFAULT_NODES,
                       help="comma-separated technology nodes in nm")
        p.add_argument("--bits", type=int, default=8)
        p.add_argument("--gammas", choices=sorted(pr.GAMMA_PRESETS), default="default")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--eq8", dest="intensity", action="store_const", const="eq8",
                       help="intensity with im2col duplication")
        g.add_argument("--eq9", dest="intensity", action="store_const", const="eq9",
                       help="intensity with each operand touched once")
    p.add_argument("--input-mpx", type=float, default=1.0,
                   help="rescale the network to this input size (megapixels)")
    p.add_argument("--out", default=None, help="output directory (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="cimenergy", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("intensity", help="per-layer intensity and matmul dimensions")
    p.add_argument("--network", required=True, help="network CSV or shipped name")
    _common(p, nodes=False)
    p.set_defaults(func=cmd_intensity)

    p = sub.add_parser("analytic", help="closed-form efficiency versus technology node")
    p.add_argument("--preset", help="comma-separated preset names")
    w = p.add_mutually_exclusive_group()
    w.add_argument("--network", help="network CSV or shipped name (median workload)")
    w.add_argument("--tableV", action="store_true",
                   help="single 512x512, k=3, 128->128 layer (default)")
    _common(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="event-count simulation of a network")
    p.add_argument("arch", choices=sorted(SIM_PRESETS))
    p.add_argument("--network", required=True, help="network CSV or shipped name")
    p.add_argument("--preset", help="analytic preset the simulator is built from")
    p.add_argument("--double-reg", action="store_true",
                   help="systolic: two register events per MAC")
    p.add_argument("--dac4", action="store_true",
                   help="optical4f: four DAC events per pixel in the Fourier-load flash")
    p.add_argument("--acc16", action="store_true", help="optical4f: 16-bit partial sums")
    p.add_argument("--slm-pixels", type=int, default=None)
    p.add_argument("--line-load", choices=o4.LINE_LOAD_MODES, default="line")
    _common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CimEnergyError as exc:
        print(f"cimenergy: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
