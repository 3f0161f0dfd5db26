"""Event-counting inner loops for the two simulators.

Each kernel exists twice: a numba ``@njit`` loop and a pure-numpy version.
Set ``CIMENERGY_DISABLE_JIT=1`` to force the numpy path (numba is also
skipped automatically when it cannot be imported).  Both paths return the
same int64 counter vector.
"""

import os

import numpy as np

_FLAG = os.environ.get("CIMENERGY_DISABLE_JIT", "").strip().lower()
JIT_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not JIT_DISABLED

# systolic counter slots
S_CYCLES, S_MACS, S_ACT_IN, S_OUT, S_SPILL, S_WEIGHTS, S_TILES = range(7)
N_SYSTOLIC = 7

# optical counter slots
O_LOAD_FLASH, O_COMPUTE_FLASH, O_DAC, O_ADC, O_ACT_B, O_KER_B, O_OUT_B, O_PSUM_B, O_PIX = range(9)
N_OPTICAL = 9

_T_CHUNK = 4096


def _tile_wavefront_numpy(l, r, c, out):
    """Step one weight tile cycle by cycle; PE (i, j) sees activation row t-i-j."""
    n_cycles = l + r + c - 2
    i = np.arange(r, dtype=np.int64)[None, :]
    for t0 in range(0, n_cycles, _T_CHUNK):
        t = np.arange(t0, min(t0 + _T_CHUNK, n_cycles), dtype=np.int64)[:, None]
        d = t - i
        lo = np.maximum(d - l + 1, 0)
        hi = np.minimum(d, c - 1)
        active = np.maximum(hi - lo + 1, 0)
        out[S_MACS] += active.sum()
        out[S_ACT_IN] += ((d >= 0) & (d < l)).sum()
        out[S_OUT] += active[:, r - 1].sum()
    out[S_CYCLES] += n_cycles
    out[S_WEIGHTS] += r * c
    out[S_TILES] += 1


def systolic_counts_numpy(l, n_dim, m, rows, cols):
    out = np.zeros(N_SYSTOLIC, dtype=np.int64)
    for j0 in range(0, m, cols):
        c = min(cols, m - j0)
        for i0 in range(0, n_dim, rows):
            r = min(rows, n_dim - i0)
            before = out[S_OUT]
            _tile_wavefront_numpy(l, r, c, out)
            if i0 > 0:
                out[S_SPILL] += out[S_OUT] - before
    return out


def optical_counts_numpy(n, k, m_out, c_in, c_out, c_prime, dac_fft, adc_fft,
                         complex_factor, acc_bytes):
    out = np.zeros(N_OPTICAL, dtype=np.int64)
    n2, k2, m2 = n * n, k * k, m_out * m_out
    starts = np.arange(0, c_in, c_prime, dtype=np.int64)
    cg = np.minimum(c_prime, c_in - starts)
    first = starts == 0
    out[O_LOAD_FLASH] = cg.size
    out[O_COMPUTE_FLASH] = cg.size * c_out
    pix = n2 * cg.sum()
    out[O_PIX] = pix
    out[O_DAC] = pix * dac_fft + c_out * (k2 * cg * complex_factor).sum()
    out[O_ADC] = pix * adc_fft + c_out * cg.size * m2 * complex_factor
    out[O_ACT_B] = pix
    out[O_KER_B] = c_out * k2 * cg.sum()
    out[O_OUT_B] = c_out * cg.size * m2 * acc_bytes
    out[O_PSUM_B] = c_out * (~first).sum() * m2 * acc_bytes
    return out


if USE_NUMBA:

    @njit(cache=True)
    def systolic_counts_jit(l, n_dim, m, rows, cols):
        out = np.zeros(N_SYSTOLIC, dtype=np.int64)
        for j0 in range(0, m, cols):
            c = min(cols, m - j0)
            for i0 in range(0, n_dim, rows):
                r = min(rows, n_dim - i0)
                n_cycles = l + r + c - 2
                ejected = 0
                for t in range(n_cycles):
                    for i in range(r):
                        d = t - i
                        if 0 <= d < l:
                            out[S_ACT_IN] += 1
                        lo = max(d - l + 1, 0)
                        hi = min(d, c - 1)
                        if hi >= lo:
                            out[S_MACS] += hi - lo + 1
                            if i == r - 1:
                                ejected += hi - lo + 1
                out[S_OUT] += ejected
                if i0 > 0:
                    out[S_SPILL] += ejected
                out[S_CYCLES] += n_cycles
                out[S_WEIGHTS] += r * c
                out[S_TILES] += 1
        return out

    @njit(cache=True)
    def optical_counts_jit(n, k, m_out, c_in, c_out, c_prime, dac_fft, adc_fft,
                           complex_factor, acc_bytes):
        out = np.zeros(N_OPTICAL, dtype=np.int64)
        n2, k2, m2 = n * n, k * k, m_out * m_out
        g = 0
        for start in range(0, c_in, c_prime):
            cg = min(c_prime, c_in - start)
            # Fourier-load flash
            out[O_LOAD_FLASH] += 1
            out[O_PIX] += n2 * cg
            out[O_DAC] += n2 * cg * dac_fft
            out[O_ADC] += n2 * cg * adc_fft
            out[O_ACT_B] += n2 * cg
            # one compute flash per output channel
            for _ in range(c_out):
                out[O_COMPUTE_FLASH] += 1
                out[O_DAC] += k2 * cg * complex_factor
                out[O_ADC] += m2 * complex_factor
                out[O_KER_B] += k2 * cg
                out[O_OUT_B] += m2 * acc_bytes
                if g > 0:
                    out[O_PSUM_B] += m2 * acc_bytes
            g += 1
        return out

    systolic_counts = systolic_counts_jit
    optical_counts = optical_counts_jit
else:
    systolic_counts = systolic_counts_numpy
    optical_counts = optical_counts_numpy
