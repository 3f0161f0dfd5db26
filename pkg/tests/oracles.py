"""Brute-force reference schedulers used by the simulator tests.

These enumerate every access of the im2col loop nest and every SLM flash
explicitly; they share no code with the package kernels.
"""

from collections import Counter


def systolic_oracle(l, n_dim, m, rows, cols, act_bytes=1, acc_bytes=4):
    """Walk tiles in the same order as the contract, touching each (l, i, j)."""
    c = Counter()
    for j0 in range(0, m, cols):
        jb = range(j0, min(j0 + cols, m))
        for i0 in range(0, n_dim, rows):
            ib = range(i0, min(i0 + rows, n_dim))
            c["tiles"] += 1
            c["cycles"] += l + len(ib) + len(jb) - 2
            for _i in ib:
                for _j in jb:
                    c["dram_weight_bytes"] += act_bytes
            for _row in range(l):
                for _i in ib:
                    c["act_read_bytes"] += act_bytes
                    for _j in jb:
                        c["macs"] += 1
                if i0 > 0:
                    for _j in jb:
                        c["psum_read_bytes"] += acc_bytes
                        c["psum_write_bytes"] += acc_bytes
    for _row in range(l):
        for _j in range(m):
            c["out_write_bytes"] += act_bytes
    return c


def optical_oracle(n, k, m_out, c_in, c_out, slm_pixels, dac_fft=3, adc_fft=2, cf=2, acc=1):
    """Materialize every flash; return (flash list, totals)."""
    cp = slm_pixels // (n * n)
    flashes = []
    channels = list(range(c_in))
    groups = [channels[s:s + cp] for s in range(0, c_in, cp)]
    for g, group in enumerate(groups):
        f = Counter(kind="load")
        for _ch in group:
            for _y in range(n):
                for _x in range(n):
                    f["pixels"] += 1
                    f["dac"] += dac_fft
                    f["adc"] += adc_fft
                    f["sram"] += 1
        flashes.append(f)
        for _co in range(c_out):
            f = Counter(kind="compute")
            for _ch in group:
                for _ky in range(k):
                    for _kx in range(k):
                        f["dac"] += cf
                        f["sram"] += 1
            for _oy in range(m_out):
                for _ox in range(m_out):
                    f["adc"] += cf
                    f["sram"] += acc
                    if g > 0:
                        f["sram"] += acc
                        f["psum"] += acc
            flashes.append(f)
    totals = Counter()
    for f in flashes:
        for key in ("dac", "adc", "sram", "psum", "pixels"):
            totals[key] += f[key]
    totals["flashes"] = len(flashes)
    totals["groups"] = len(groups)
    return flashes, totals
