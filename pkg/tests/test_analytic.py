import math

import pytest
from hypothesis import given, strategies as st

from cimenergy import analytic as an
from cimenergy import primitives as pr
from cimenergy.errors import (ConfigurationError, InvalidArgumentError, ParseError,
                              UnsupportedWorkloadError)
from cimenergy.workload import ConvLayerSpec, NetworkSpec, shipped_network

PJ = 1e-12
TV = an.TABLE_V_LAYER


def rates(bank=96 * 1024, node=45):
    return pr.energy_rates(pr.tech_process(node), bank)


def test_cpu_efficiency():
    pt = an.cpu_efficiency(rates())
    assert pt.tops_per_w == pytest.approx(1 / (2 * 4.33 + 0.231), rel=0.01)
    assert pt.e_op_parts["memory"] == pytest.approx(2 * rates().e_m)
    free_mem = pr.EnergyRates(0.0, 0.0, 0.23 * PJ, 0, 0, 0, 0, 0, 8)
    assert an.cpu_efficiency(free_mem).eta == pytest.approx(1 / (0.23 * PJ))


def test_digital_im_efficiency():
    pt = an.digital_im_efficiency(rates(), 230.3)
    assert pt.tops_per_w == pytest.approx(4.0, rel=0.01)
    huge = an.digital_im_efficiency(rates(), 1e15)
    assert huge.eta == pytest.approx(1 / rates().e_mac, rel=1e-6)
    half = an.digital_im_efficiency(rates(), 0.5)
    assert half.eta == pytest.approx(an.cpu_efficiency(rates()).eta)
    with pytest.raises(InvalidArgumentError):
        an.digital_im_efficiency(rates(), 0)


def test_efficiency_point_sums():
    pt = an.EfficiencyPoint.from_parts(45, {"memory": 1e-12, "adc": 3e-12})
    assert pt.eta * pt.e_op == pytest.approx(1, abs=1e-9)
    assert set(pt.e_op_parts) == set(an.PART_NAMES)
    with pytest.raises(InvalidArgumentError):
        an.EfficiencyPoint.from_parts(45, {"memory": -1.0})


@given(st.floats(1e-15, 1e-12), st.floats(1e-15, 1e-12), st.floats(1e-15, 1e-12),
       st.integers(1, 4096), st.integers(1, 4096))
def test_vm_total_identity(d1, d2, adc, n, m):
    total = 2 * n * d1 + 2 * m * n * d2 + 2 * m * adc
    assert an.analog_vm_energy_per_op(d1, d2, adc, n, m) * 2 * m * n == pytest.approx(total)
    assert an.analog_vm_energy_per_op(d1, d2, adc, n, m, signed=True) == pytest.approx(
        2 * an.analog_vm_energy_per_op(d1, d2, adc, n, m))


def test_vm_limits():
    assert an.analog_vm_energy_per_op(1.0, 2.0, 3.0, 10**12, 10**12) == pytest.approx(2.0)
    assert an.analog_vm_energy_per_op(0.25, 0.01, 0.25, 1, 1) == pytest.approx(0.51)


@given(st.integers(1, 512), st.integers(1, 512), st.integers(1, 512),
       st.integers(1, 512), st.integers(1, 512), st.sampled_from(["l", "n", "m", "hn", "hm"]))
def test_mm_non_increasing(l, n, m, hn, hm, which):
    base = dict(l=l, n_dim=n, m=m, hat_n=hn, hat_m=hm)
    key = {"l": "l", "n": "n_dim", "m": "m", "hn": "hat_n", "hm": "hat_m"}[which]
    bigger = dict(base, **{key: base[key] * 2})
    e0 = an.analog_mm_energy_per_op(1e-13, 5e-13, 2.5e-13, **base)
    e1 = an.analog_mm_energy_per_op(1e-13, 5e-13, 2.5e-13, **bigger)
    assert e1 <= e0


@given(st.integers(1, 300), st.integers(1, 300))
def test_mm_reduces_to_vm(n, m):
    assert an.analog_mm_energy_per_op(1e-13, 5e-13, 2e-13, 1, n, m) == pytest.approx(
        an.analog_vm_energy_per_op(1e-13, 5e-13, 2e-13, n, m))


def test_mm_array_caps():
    e = an.analog_mm_energy_per_op(1.0, 1.0, 1.0, 100, 1000, 1000, hat_n=40, hat_m=40)
    assert e == pytest.approx(1 / 40 + 1 / 100 + 1 / 40)


def test_optical_dims_and_cprime():
    assert an.c_prime(TV, 4 * 1024 * 1024) == 16
    w = an.layer_workload(TV, 4 * 1024 * 1024)
    assert w.n_4f == pytest.approx(9 * 16 * 128 / 144)
    assert w.n_4f == pytest.approx(128)
    assert (w.l_4f, w.m_4f) == (512**2, 9 * 128 / 2)
    with pytest.raises(UnsupportedWorkloadError, match="tableV"):
        an.layer_workload(TV, 512**2 - 1)


def test_optical_spot_rows():
    y = an.network_workload(shipped_network("yolov3"))
    assert (y.l_4f, y.n_4f, y.m_4f) == (3844, 512, 256)
    v = an.network_workload(shipped_network("vgg16"))
    assert (v.l_4f, v.n_4f, v.m_4f) == (62001, 2304, 1152)


def test_phase_energies_match_closed_form():
    # all channels on the aperture at once, four DAC events per loaded pixel
    layer = ConvLayerSpec("p", 64, 3, 32, 48)
    hat = layer.n**2 * layer.c_in
    r = rates(bank=12 * 1024)
    e_dac = r.e_dac + r.line_load(2.5 * math.sqrt(hat)) + r.e_opt
    e_fft, e_conv = an.optical4f_phase_energies(layer, e_dac, r.e_adc, dac_per_pixel=4)
    n_op = 2 * layer.n**2 * 9 * layer.c_in * layer.c_out
    pt = an.optical4f_efficiency(r, layer, hat, r.e_m, 1e30)
    assert (e_fft + e_conv) / n_op == pytest.approx(pt.e_op, rel=1e-9)
    # the three-event reading is strictly cheaper
    e3 = sum(an.optical4f_phase_energies(layer, e_dac, r.e_adc, dac_per_pixel=3))
    assert e3 < e_fft + e_conv


def test_evaluate_reference_layer():
    vals = {n: an.evaluate(an.get_preset(n), TV, 45).tops_per_w
            for n in ("cpu45", "tpu-like", "photonic40", "reram256")}
    assert vals["cpu45"] == pytest.approx(0.112, rel=0.01)
    assert vals["tpu-like"] == pytest.approx(4.0, rel=0.01)
    assert vals["reram256"] < 20.6


def test_sweep_identity_and_monotone():
    for name in ("cpu45", "tpu-like", "photonic40", "optical4f-4mpx", "reram256"):
        spec = an.get_preset(name)
        sweep = an.efficiency_sweep(spec, TV, an.DEFAULT_NODES)
        assert sweep[4].node_nm == 45
        assert sweep[4].eta == an.evaluate(spec, TV, 45).eta
        etas = [p.eta for p in sweep]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(etas, etas[1:])), name
        for p in sweep:
            assert p.eta * p.e_op == pytest.approx(1, abs=1e-9)
    with pytest.raises(InvalidArgumentError):
        an.efficiency_sweep(an.get_preset("cpu45"), TV, [])


def test_ordering_at_32nm():
    order = ["cpu45", "tpu-like", "photonic40", "optical4f-4mpx"]
    eta = [an.evaluate(an.get_preset(n), TV, 32, intensity="eq8").eta for n in order]
    assert eta == sorted(eta)
    assert eta[3] / eta[1] >= 5


def test_node_independent_parts():
    spec = an.get_preset("optical4f-4mpx")
    a, b = (an.evaluate(spec, TV, n) for n in (180, 7))
    assert a.e_op_parts["load"] == b.e_op_parts["load"]
    assert a.e_op_parts["laser"] == b.e_op_parts["laser"]
    assert a.e_op_parts["adc"] > b.e_op_parts["adc"]


def test_signed_flag_doubles_analog_terms():
    s = an.get_preset("photonic40")
    u = an.AnalogPlanar(**{**s.__dict__, "signed": False})
    ps, pu = an.evaluate(s, TV), an.evaluate(u, TV)
    for part in ("dac_input", "dac_weight", "adc", "load", "laser"):
        assert ps.e_op_parts[part] == pytest.approx(2 * pu.e_op_parts[part])
    assert ps.e_op_parts["memory"] == pu.e_op_parts["memory"]


def test_intensity_switch():
    spec = an.get_preset("optical4f-4mpx")
    assert an.evaluate(spec, TV, intensity="eq9").eta > an.evaluate(spec, TV, intensity="eq8").eta


def test_network_workload_median():
    w = an.network_workload(shipped_network("yolov3"))
    assert w.a_eq9 == pytest.approx(504, rel=0.01)
    with pytest.raises(InvalidArgumentError):
        an.as_workload("yolov3")


def test_preset_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="available presets"):
        an.get_preset("nope")
    bad = tmp_path / "p.csv"
    bad.write_text("preset,key,value\nx,arch,digital_im\nx,sram_banks,7\n")
    with pytest.raises(ParseError):
        an.read_presets(bad)
    bad.write_text("preset,key,value\nx,arch,cpu\nx,bogus,1\n")
    with pytest.raises(ParseError) as info:
        an.read_presets(bad)
    assert info.value.line == 3
    bad.write_text("preset,key,value\nx,arch,quantum\n")
    with pytest.raises(ParseError):
        an.read_presets(bad)


def test_bank_sizes():
    assert an.get_preset("tpu-like").bank_bytes == 96 * 1024
    assert an.get_preset("optical4f-4mpx").bank_bytes == 12 * 1024
    assert an.get_preset("photonic40").bank_bytes == 600 * 1024


def test_single_layer_network_equals_layer():
    net = NetworkSpec("one", [TV])
    spec = an.get_preset("tpu-like")
    assert an.evaluate(spec, net).eta == an.evaluate(spec, TV).eta
