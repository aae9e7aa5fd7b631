import json

import numpy as np
import pytest

import wcsync


def test_cazac_is_constant_amplitude_zero_autocorrelation():
    c = wcsync.cazac_sequence(206, 205)
    assert c.dtype == np.complex128
    assert np.allclose(np.abs(c), 1.0)
    corr = np.array([np.vdot(np.roll(c, -tau), c) for tau in range(206)])
    assert abs(corr[0]) == pytest.approx(206.0)
    assert np.max(np.abs(corr[1:])) < 1e-7 * 206
    assert abs(wcsync.periodic_autocorrelation(c, 3)) < 1e-8


def test_pn_and_training_symbol():
    pn = wcsync.pn_sequence(256, 1)
    assert set(np.unique(pn)) <= {-1.0, 1.0}
    ts = wcsync.build_training_symbol()
    assert ts.with_cp().shape == (558,)
    assert np.array_equal(ts.b_half, ts.a_half * pn)
    spec = np.fft.fft(ts.useful())
    assert np.allclose(spec, ts.spectrum())
    assert wcsync.build_training_symbol(pn_seed=None).pn is None


def test_qam_round_trip():
    bits = np.random.default_rng(0).integers(0, 2, 4 * 1000).astype(np.uint8)
    sym = wcsync.qam_map(bits)
    assert np.mean(np.abs(sym) ** 2) == pytest.approx(1.0, rel=0.05)
    assert np.array_equal(wcsync.qam_demap(sym), bits)
    with pytest.raises(ValueError):
        wcsync.qam_map(bits[:3])


def test_timing_metric_matches_numpy():
    rng = np.random.default_rng(1)
    ts = wcsync.build_training_symbol(n=64, n_sc=50, root=24, pn_seed=3, n_cp=6)
    r = np.concatenate([0.1 * rng.standard_normal(30), ts.with_cp(), rng.standard_normal(200)]).astype(complex)
    pn = ts.pn
    tr = wcsync.timing_metric(r, pn)
    m = 32
    expect = []
    for d in range(len(r) - 64 + 1):
        p = np.sum(r[d:d + m] * pn * np.conj(r[d + m:d + 2 * m]))
        rr = 0.5 * np.sum(np.abs(r[d:d + 64]) ** 2)
        expect.append(abs(p) ** 2 / rr ** 2)
    assert np.allclose(tr["values"], expect, atol=1e-12)
    assert int(np.argmax(tr["values"])) == 36


def test_end_to_end_sync_through_fiber():
    frame = wcsync.build_frame(data_symbols=4)
    ts = wcsync.build_training_symbol()
    rx = wcsync.run_channel(frame["samples"], delay=100, cfo_hz=5e9, fiber_km=800, tail_zeros=512)
    eq = wcsync.cd_equalize_overlap_add(rx, 800)[: 100 + len(frame["samples"])]
    res = wcsync.synchronize(eq, ts)
    assert res["d_hat"] == 100 + frame["sync_start"]
    assert res["cfo_hz_hat"] == pytest.approx(5e9, abs=1e5)
    assert res["rho_hat"] == pytest.approx(res["alpha_hat"] + 2 * res["beta_hat"])


def test_channel_helpers():
    x = np.exp(1j * np.linspace(0, 10, 4096))
    y = wcsync.apply_cfo(x, 1e9)
    assert np.allclose(np.abs(y), np.abs(x))
    back = wcsync.apply_cd(wcsync.apply_cd(x, 800), 800, inverse=True)
    assert np.allclose(back, x, atol=1e-9)
    assert wcsync.required_overlap(800) == 1032
    with pytest.raises(ValueError):
        wcsync.apply_cfo(x, 25e9)


def test_rate_and_experiment_rows():
    assert wcsync.net_bit_rate() == pytest.approx(115.8e9, abs=0.1e9)
    cfg = json.loads(wcsync.default_config_json())
    assert cfg["system"]["fft_size"] == 512
    rows = wcsync.run_experiment("range_check", trials=1)
    errs = [r["value"] for r in rows if r["statistic"] == "max_abs_cfo_error_hz"]
    assert errs and max(errs) < 1e5
    with pytest.raises(ValueError):
        wcsync.run_experiment("range_check", config_json='{"bogus": 1}')
