import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from approxradar.errors import InvalidSizeError, UnsupportedModelError
from approxradar.fxp import ACC_PAIR, ComplexFx16, CountingPair, parse_pair
from approxradar.transform import (bit_reverse_indices, bit_reverse_permute, build_rom, butterfly,
                                   ifft, read_vector_csv, stage_plan, write_vector_csv)

ULP = 2.0 ** -15


def unit_disc(rng, shape):
    r = np.sqrt(rng.uniform(0, 1, shape)) * (1 - 2 ** -14)
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, shape))


def run(x, pair=ACC_PAIR, sign=1):
    x = np.asarray(x)
    return ifft(pair, ComplexFx16.from_complex(x), build_rom(x.shape[-1], sign)).to_complex()


def test_rom_entries():
    rom = build_rom(512)
    assert rom.entries.re[0] == 32767 and rom.entries.im[0] == 0
    assert rom.entries.re[64] == 23170 and rom.entries.im[64] == 23170
    assert len(rom.entries) == 256
    assert build_rom(512, -1).entries.im[64] == -23170


def test_rom_is_read_only():
    with pytest.raises(ValueError):
        build_rom(16).entries.re[0] = 0


@pytest.mark.parametrize("n", [0, 1, 3, 12, 1 << 17])
def test_invalid_sizes(n):
    with pytest.raises(InvalidSizeError):
        build_rom(n)


def test_length_must_match_rom():
    with pytest.raises(InvalidSizeError):
        ifft(ACC_PAIR, ComplexFx16.zeros(8), build_rom(16))


def test_fixture_pair_rejected():
    with pytest.raises(UnsupportedModelError):
        ifft(parse_pair("fixture:add16se_3BD+acc"), ComplexFx16.zeros(8), build_rom(8))


@pytest.mark.parametrize("n", [2, 8, 64, 1024])
def test_bit_reverse_matches_oracle_and_is_involution(n):
    idx = bit_reverse_indices(n)
    assert idx.tolist() == oracles.bit_reverse_oracle(n)
    assert np.array_equal(idx[idx], np.arange(n))


def test_bit_reverse_n8():
    assert bit_reverse_indices(8).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_bit_reverse_permute_twice_is_identity():
    x = ComplexFx16(np.arange(16), -np.arange(16))
    assert bit_reverse_permute(bit_reverse_permute(x)).equals(x)


def test_stage_plan_covers_every_index_once_per_stage():
    plan = stage_plan(64)
    assert plan.stages == 6
    for a, b in zip(plan.top, plan.bottom):
        assert sorted(np.concatenate([a, b]).tolist()) == list(range(64))


def test_butterfly_unscaled_example():
    xa = ComplexFx16.from_complex(0.25)
    xb = ComplexFx16.from_complex(0.25j)
    w = ComplexFx16.from_complex(-1j)  # -j * 0.25j = 0.25
    ya, yb = butterfly(ACC_PAIR, xa, xb, w)
    assert ya.equals(ComplexFx16.from_complex(0.5)) and yb.equals(ComplexFx16.from_complex(0.0))


def test_impulse_is_constant():
    x = np.zeros(512, complex)
    x[0] = 1 - ULP
    out = run(x)
    assert np.max(np.abs(out - (1 - ULP) / 512)) <= 3 * ULP


def test_constant_is_impulse():
    x = np.full(512, 0.5 + 0.25j)
    out = run(x)
    ref = np.zeros(512, complex)
    ref[0] = 0.5 + 0.25j
    assert np.max(np.abs(out.real - ref.real)) <= 3 * ULP
    assert np.max(np.abs(out.imag - ref.imag)) <= 3 * ULP


@pytest.mark.parametrize("n", [8, 64, 512])
def test_acc_ifft_close_to_naive_idft(n):
    rng = np.random.default_rng(n)
    x = unit_disc(rng, (20, n))
    out = run(x)
    ref = oracles.naive_idft(ComplexFx16.from_complex(x).to_complex())
    err = np.maximum(np.abs(out.real - ref.real), np.abs(out.imag - ref.imag))
    assert err.max() <= 2 ** -8


def test_negative_twiddle_sign_is_forward_transform_over_n():
    rng = np.random.default_rng(4)
    x = unit_disc(rng, 64)
    out = run(x, sign=-1)
    ref = np.fft.fft(ComplexFx16.from_complex(x).to_complex()) / 64
    assert np.max(np.abs(out - ref)) <= 2 ** -8


def test_batched_matches_rows():
    rng = np.random.default_rng(9)
    x = unit_disc(rng, (3, 32))
    batch = run(x)
    for i in range(3):
        assert np.array_equal(batch[i], run(x[i]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 0.45))
def test_linearity_within_rounding(seed, alpha):
    rng = np.random.default_rng(seed)
    x = unit_disc(rng, 64) * 0.45
    y = unit_disc(rng, 64) * 0.45
    lhs = run(x + alpha * y)
    rhs = run(x) + alpha * run(y)
    assert np.max(np.abs(lhs - rhs)) <= 2 ** -9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_parseval_within_rounding(seed):
    rng = np.random.default_rng(seed)
    n = 128
    x = ComplexFx16.from_complex(unit_disc(rng, n)).to_complex()
    out = run(x)
    # sum |X|^2 = sum |x|^2 / N for the 1/N-scaled inverse
    assert abs(np.sum(np.abs(out) ** 2) - np.sum(np.abs(x) ** 2) / n) <= 1e-3


@pytest.mark.parametrize("n", [8, 512])
def test_operation_counts(n):
    pair = CountingPair(ACC_PAIR)
    ifft(pair, ComplexFx16.zeros(n), build_rom(n))
    butterflies = (n // 2) * (n.bit_length() - 1)
    assert pair.muls == 4 * butterflies
    assert pair.adds == 6 * butterflies


def test_approximate_pair_stays_in_range_and_is_deterministic():
    rng = np.random.default_rng(2)
    x = ComplexFx16.from_complex(unit_disc(rng, 256))
    pair = parse_pair("loa6+tmul6")
    a = ifft(pair, x, build_rom(256))
    b = ifft(pair, x, build_rom(256))
    assert a.equals(b)
    assert a.re.min() >= -32768 and a.re.max() <= 32767


def test_vector_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    x = ComplexFx16.from_complex(unit_disc(rng, 16))
    path = tmp_path / "v.csv"
    write_vector_csv(path, x)
    assert path.read_text().splitlines()[0] == "index,re_raw,im_raw"
    assert read_vector_csv(path).equals(x)
