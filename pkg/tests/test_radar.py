import dataclasses
import math

import numpy as np
import pytest

import oracles
from approxradar.errors import DegenerateInputError, ParameterError
from approxradar.fxp import ACC_PAIR, ComplexFx16, parse_pair
from approxradar.radar import (RadarConfig, TargetModel, apply_channel, divide_float, generate_frame,
                               periodogram_profile, qam4_map, quantize_grid, resilience_probe,
                               run_pipeline, run_seeds, simulate, zadoff_chu)

CFG = RadarConfig()
TGT = TargetModel()


# -- configuration ---------------------------------------------------------------------

def test_defaults_and_derived_quantities():
    assert CFG.n_subcarriers * CFG.n_symbols == CFG.n_ifft == 512
    assert CFG.bin_to_m == pytest.approx(0.30496466, abs=1e-8)
    assert CFG.max_range_m == pytest.approx(156.14, abs=0.01)
    assert TGT.delay_s(CFG) == pytest.approx(3.3356e-7, rel=1e-4)
    assert TGT.doppler_hz(CFG) == pytest.approx(4002.769, abs=1e-3)


@pytest.mark.parametrize("kw", [dict(n_symbols=8), dict(zc_root=2), dict(zc_root=32),
                                dict(estimator_mode="mean"), dict(twiddle_sign=0),
                                dict(total_symbol_s=2e-6)])
def test_config_invariants(kw):
    with pytest.raises(ParameterError):
        RadarConfig(**kw)


def test_target_beyond_unambiguous_range():
    with pytest.raises(ParameterError):
        TargetModel(range_m=200).validate(CFG)


# -- frame -------------------------------------------------------------------------------

def test_zadoff_chu_first_values_and_modulus():
    zc = zadoff_chu(32, 1)
    assert zc[0] == 1
    assert zc[1] == pytest.approx(0.9951847266721969 - 0.0980171403295606j, abs=1e-15)
    assert np.allclose(np.abs(zc), 1)


def test_qam4_alphabet():
    bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    sym = qam4_map(bits)
    assert set(np.round(sym * math.sqrt(2)).tolist()) == {1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j}


def test_frame_invariants_and_determinism():
    f = generate_frame(CFG, 3)
    assert f.bits.size == 2 * 32 * 16
    assert f.precoded.shape == (32, 16)
    assert np.allclose(np.abs(f.precoded), 1)
    assert np.array_equal(f.precoded, generate_frame(CFG, 3).precoded)
    assert not np.array_equal(f.bits, generate_frame(CFG, 4).bits)


# -- channel and division ----------------------------------------------------------------

def test_noiseless_division_is_channel_response():
    f = generate_frame(CFG, 0)
    rx = apply_channel(f, TGT, math.inf, CFG)
    d = divide_float(rx, f)
    ref = oracles.reference_channel(v=20.0)
    assert np.allclose(d, ref, atol=1e-12)
    assert rx.cp_exceeded  # 333 ns round trip exceeds the 260 ns prefix


def test_phase_step_between_subcarriers():
    ref = oracles.reference_channel()
    step = -np.angle(ref[1, 0] / ref[0, 0])
    assert step == pytest.approx(2.0120, abs=1e-3)


def test_snr_sets_noise_power():
    f = generate_frame(CFG, 0)
    clean = apply_channel(f, TGT, math.inf, CFG).data
    noisy = np.concatenate([apply_channel(f, TGT, 0.0, CFG, s).data - clean for s in range(40)])
    assert np.mean(np.abs(noisy) ** 2) == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("snr", [math.nan, -math.inf])
def test_invalid_snr(snr):
    with pytest.raises(ParameterError):
        apply_channel(generate_frame(CFG, 0), TGT, snr, CFG, 0)


def test_quantize_grid_clamps():
    q = quantize_grid(np.array([[1.5 - 2j, 0.5 + 0.25j]]))
    assert q.re.tolist() == [[32767, 16384]] and q.im.tolist() == [[-32768, 8192]]


# -- estimation --------------------------------------------------------------------------

@pytest.mark.parametrize("mode, v, bin_, range_m", [
    ("zeropad_average", 20.0, 164, 50.0142),
    ("zeropad_average", 0.0, 164, 50.0142),
    ("flattened", 0.0, 160, 48.7943),
])
def test_noiseless_golden_values(mode, v, bin_, range_m):
    cfg = RadarConfig(estimator_mode=mode)
    # the double-precision reference agrees with the frozen values
    assert oracles.reference_range(oracles.reference_channel(v=v), mode=mode)[0] == bin_
    _, est = simulate(cfg, TargetModel(velocity_mps=v), ACC_PAIR, math.inf, 0)
    assert est.peak_bin == bin_
    assert est.range_m == pytest.approx(range_m, abs=1e-4)


def test_continuous_peak_location():
    assert oracles.continuous_peak_bin() == pytest.approx(163.953, abs=1e-3)


def test_twiddle_sign_does_not_move_peak():
    cfg = RadarConfig(twiddle_sign=-1)
    p_neg, est = simulate(cfg, TGT, ACC_PAIR, math.inf, 0)
    p_pos, _ = simulate(CFG, TGT, ACC_PAIR, math.inf, 0)
    assert est.peak_bin == 164
    assert np.max(np.abs(p_neg.power - p_pos.power)) < 1e-3


def test_profile_normalized_and_matches_reference_shape():
    profile, est = simulate(CFG, TGT, ACC_PAIR, math.inf, 0)
    assert profile.power.shape == (512,)
    assert profile.power.max() == 1.0 and profile.power.min() >= 0
    ref = oracles.reference_profile(oracles.reference_channel(v=20.0))
    assert np.max(np.abs(profile.power - ref / ref.max())) < 0.01
    assert est.range_m == est.peak_bin * CFG.bin_to_m
    db = profile.power_db()
    assert db.max() == 0.0 and db.min() >= -120


def test_all_zero_grid_is_degenerate():
    with pytest.raises(DegenerateInputError):
        periodogram_profile(ACC_PAIR, ComplexFx16.zeros((32, 16)), CFG)


def test_wrong_grid_shape():
    with pytest.raises(ParameterError):
        periodogram_profile(ACC_PAIR, ComplexFx16.zeros((16, 32)), CFG)


def test_range_sweep_tracks_target():
    for r in (10.0, 30.0, 75.0, 120.0):
        est = run_pipeline(CFG, TargetModel(range_m=r), ACC_PAIR, math.inf, 0)
        assert abs(est.range_m - r) <= CFG.bin_to_m


def test_extreme_pair_loses_target():
    est = run_pipeline(CFG, TGT, parse_pair("loa15+ppp14"), math.inf, 0)
    assert abs(est.range_m - TGT.range_m) > 16 * CFG.bin_to_m


def test_fixture_pair_cannot_run():
    from approxradar.errors import UnsupportedModelError
    with pytest.raises(UnsupportedModelError):
        run_pipeline(CFG, TGT, parse_pair("fixture:add16se_3BD+fixture:mul16s_HFB"))


# -- seeding and probe --------------------------------------------------------------------

def test_run_seeds_deterministic_and_distinct():
    s = run_seeds(0, 100)
    assert s == run_seeds(0, 100) and len(set(s)) == 100
    assert run_seeds(0, 5) == s[:5]
    with pytest.raises(ParameterError):
        run_seeds(0, 0)


def test_same_seed_same_noisy_estimate():
    a = simulate(CFG, TGT, ACC_PAIR, -5.0, 17)
    b = simulate(CFG, TGT, ACC_PAIR, -5.0, 17)
    assert np.array_equal(a[0].power, b[0].power) and a[1] == b[1]


def test_probe_zero_sigma_is_noiseless_baseline():
    base = abs(run_pipeline(CFG, TGT).range_m - TGT.range_m)
    for block in ("division_input", "estimator_input"):
        assert resilience_probe(CFG, TGT, block, 0.0, runs=5) == pytest.approx(base, abs=1e-12)


def test_probe_large_sigma_degrades():
    small = resilience_probe(CFG, TGT, "estimator_input", 0.0, runs=10)
    large = resilience_probe(CFG, TGT, "estimator_input", 8.0, runs=10)
    assert large > small


def test_probe_rejects_bad_block_and_sigma():
    with pytest.raises(ParameterError):
        resilience_probe(CFG, TGT, "mixer", 0.1, runs=1)
    with pytest.raises(ParameterError):
        resilience_probe(CFG, TGT, "division_input", -1.0, runs=1)


def test_config_replace_keeps_validation():
    with pytest.raises(ParameterError):
        dataclasses.replace(CFG, n_ifft=256)
