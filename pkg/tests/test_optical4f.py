import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cimenergy import _kernels as K
from cimenergy import analytic as an
from cimenergy import optical4f as o4
from cimenergy import primitives as pr
from cimenergy.errors import UnsupportedWorkloadError
from cimenergy.workload import ConvLayerSpec, NetworkSpec, shipped_network
from oracles import optical_oracle


def check_against_oracle(layer, slm, dac4=False, acc=1):
    c = o4.Optical4FConfig(slm_pixels=slm, dac_events_fft_per_pixel=4 if dac4 else 3,
                           acc_bytes=acc)
    t = o4.simulate_layer(c, layer)
    _, o = optical_oracle(layer.n, layer.k, layer.m_out, layer.c_in, layer.c_out, slm,
                          dac_fft=4 if dac4 else 3, acc=acc)
    assert t.flash_count == o["flashes"]
    assert t.plan.groups == o["groups"]
    assert t.dac_events == o["dac"]
    assert t.adc_events == o["adc"]
    assert t.sram_bytes == o["sram"]
    assert t.partial_sum_bytes == o["psum"]
    assert t.laser_pixel_events == o["flashes"] * slm


def test_plan_examples():
    c = o4.Optical4FConfig()
    p = o4.plan_layer(c, ConvLayerSpec("a", 512, 3, 128, 128))
    assert (p.c_prime, p.groups) == (16, 8)
    t = o4.simulate_layer(o4.Optical4FConfig(slm_pixels=64), ConvLayerSpec("b", 4, 2, 3, 5))
    assert t.plan.groups == 1 and t.flash_count == 1 + 5
    p = o4.plan_layer(o4.Optical4FConfig(slm_pixels=36), ConvLayerSpec("c", 6, 3, 4, 2))
    assert (p.c_prime, p.groups) == (1, 4)


def test_oversized_layer_rejected():
    with pytest.raises(UnsupportedWorkloadError, match="big") as info:
        o4.plan_layer(o4.Optical4FConfig(slm_pixels=35), ConvLayerSpec("big", 6, 3, 1, 1))
    assert "36" in str(info.value)
    assert info.value.exit_code == 5


def test_tiny_two_flash_schedule():
    # n=4, k=2, one channel each way: a load flash and a compute flash
    t = o4.simulate_layer(o4.Optical4FConfig(slm_pixels=16), ConvLayerSpec("t", 4, 2, 1, 1))
    assert t.flash_count == 2
    assert t.dac_events == 16 * 3 + 4 * 2
    assert t.adc_events == 16 * 2 + 9 * 2
    assert t.sram_bytes == 16 + 4 + 9
    check_against_oracle(ConvLayerSpec("t", 4, 2, 1, 1), 16)


def test_oracle_grid():
    for n, k, ci, co in itertools.product(range(1, 7), range(1, 4), range(1, 5), range(1, 5)):
        if k > n:
            continue
        for slm in (36, 144):
            if n * n > slm:
                continue
            check_against_oracle(ConvLayerSpec("g", n, k, ci, co), slm)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4),
       st.integers(1, 2), st.sampled_from([36, 144]), st.booleans(), st.sampled_from([1, 2]))
def test_oracle_random(n, k, ci, co, s, slm, dac4, acc):
    check_against_oracle(ConvLayerSpec("r", n, min(k, n), ci, co, s), slm, dac4, acc)


@settings(max_examples=80, deadline=None)
@given(*(st.integers(1, 20) for _ in range(5)))
def test_numpy_and_jit_agree(n, k, ci, co, cp):
    k = min(k, n)
    args = (n, k, n - k + 1, ci, co, cp, 3, 2, 2, 1)
    a = K.optical_counts_numpy(*args)
    if K.HAVE_NUMBA and not K.JIT_DISABLED:
        assert np.array_equal(a, K.optical_counts_jit(*args))


@given(st.integers(1, 40), st.integers(1, 3), st.integers(1, 300), st.integers(1, 300))
def test_flash_count_formula(n, k, ci, co):
    k = min(k, n)
    c = o4.Optical4FConfig(slm_pixels=4096)
    if n * n > 4096:
        return
    t = o4.simulate_layer(c, ConvLayerSpec("f", n, k, ci, co))
    cp = 4096 // (n * n)
    assert t.flash_count == math.ceil(ci / cp) * (1 + co)
    assert t.energy.ops == 2 * (n - k + 1) ** 2 * k * k * ci * co


def test_laser_linear_and_node_independent():
    layer = ConvLayerSpec("l", 32, 3, 64, 64)
    c = o4.Optical4FConfig(slm_pixels=1 << 16)
    a, b = o4.simulate_layer(c, layer, 180), o4.simulate_layer(c, layer, 7)
    assert a.energy.laser == b.energy.laser
    assert a.energy.laser == pytest.approx(a.flash_count * c.slm_pixels
                                           * pr.optical_energy_per_pixel(1550e-9, 0.8, 8))
    assert a.energy.adc > b.energy.adc and a.energy.sram > b.energy.sram


def test_doubling_slm():
    layer = ConvLayerSpec("d", 32, 3, 64, 64)
    prev = None
    for px in (1024, 2048, 4096, 8192, 65536):
        t = o4.simulate_layer(o4.Optical4FConfig(slm_pixels=px, sram_banks=2048), layer)
        if prev is not None:
            assert t.energy.total <= prev.energy.total
            if prev.plan.groups > 1:
                assert t.partial_sum_bytes < prev.partial_sum_bytes
        prev = t


def test_stride_shrinks_only_output():
    a = o4.simulate_layer(o4.Optical4FConfig(slm_pixels=1024), ConvLayerSpec("s", 16, 3, 2, 2, 1))
    b = o4.simulate_layer(o4.Optical4FConfig(slm_pixels=1024), ConvLayerSpec("s", 16, 3, 2, 2, 2))
    assert a.flash_count == b.flash_count
    assert b.adc_events < a.adc_events
    assert a.dac_events == b.dac_events


def test_single_group_converges_to_closed_form():
    # C' >= C_i, four DAC events per loaded pixel: DAC + ADC parts approach the closed form
    rel = []
    for n in (32, 128, 512):
        layer = ConvLayerSpec("c", n, 3, 16, 32)
        hat = n * n * layer.c_in
        c = o4.Optical4FConfig(slm_pixels=hat, dac_events_fft_per_pixel=4)
        t = o4.simulate_layer(c, layer)
        r = pr.energy_rates(bank_bytes=12 * 1024)
        e_dac = r.e_dac + c.dac_load_energy()
        w = an.layer_workload(layer, hat)
        closed = e_dac / w.m_4f + e_dac / w.l_4f + r.e_adc / w.n_4f
        sim = (t.energy.dac + t.energy.adc) / t.energy.ops
        rel.append(abs(sim / closed - 1))
    assert rel == sorted(rel, reverse=True)
    assert rel[-1] < 0.02


def test_amortized_line_load():
    line = o4.Optical4FConfig()
    amort = o4.Optical4FConfig(line_load="amortized")
    assert line.dac_load_energy() == pytest.approx(0.415e-12, rel=0.002)
    assert amort.dac_load_energy() == pytest.approx(line.dac_load_energy() / 2048)


def test_network_breakdown_and_sum():
    layer = ConvLayerSpec("one", 64, 3, 32, 32)
    c = o4.Optical4FConfig()
    r = o4.simulate_network(c, NetworkSpec("n", [layer]))
    assert r.tally == o4.simulate_layer(c, layer).energy
    parts = r.breakdown_pj_per_mac()
    assert sum(parts.values()) == pytest.approx(r.tally.total / r.tally.macs * 1e12)


def test_sram_ordering_vgg19_vs_yolov3():
    finite = o4.Optical4FConfig()
    vgg, yolo = shipped_network("vgg19"), shipped_network("yolov3")
    s = {n: o4.simulate_network(finite, net).breakdown_pj_per_mac()["sram"]
         for n, net in (("vgg19", vgg), ("yolov3", yolo))}
    assert s["vgg19"] > s["yolov3"]
    huge = o4.Optical4FConfig(slm_pixels=1 << 40)
    s = {n: o4.simulate_network(huge, net).breakdown_pj_per_mac()["sram"]
         for n, net in (("vgg19", vgg), ("yolov3", yolo))}
    assert s["vgg19"] < s["yolov3"]
