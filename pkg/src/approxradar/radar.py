"""
OFDM radar chain: 4-QAM frame with Zadoff-Chu precoding, point-target AWGN
channel, spectral division and periodogram range estimation.

Everything up to the estimator runs in double precision. The grid that
enters the estimator is quantized to Q1.15 and pushed through the
fixed-point IFFT with whatever operator pair is injected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .fxp import ACC_PAIR, ComplexFx16, OperatorPair, RAW_MAX, SCALE, quantize_array, to_float
from .transform import build_rom, ifft

C_MPS = 299_792_458.0
ESTIMATOR_MODES = ("zeropad_average", "flattened")
PROBE_BLOCKS = ("division_input", "estimator_input")


@dataclass(frozen=True)
class RadarConfig:
    carrier_hz: float = 30e9
    n_subcarriers: int = 32
    n_symbols: int = 16
    subcarrier_spacing_hz: float = 960e3
    cp_s: float = 0.26e-6
    total_symbol_s: float = 1.3e-6
    zc_root: int = 1
    estimator_mode: str = "zeropad_average"
    n_ifft: int = 512
    twiddle_sign: int = 1
    c_mps: float = C_MPS

    def __post_init__(self):
        if self.n_subcarriers * self.n_symbols != self.n_ifft:
            raise ParameterError(
                f"n_subcarriers * n_symbols ({self.n_subcarriers}x{self.n_symbols}) "
                f"must equal n_ifft ({self.n_ifft})")
        if self.subcarrier_spacing_hz <= 0 or self.cp_s < 0:
            raise ParameterError("subcarrier spacing must be positive and CP non-negative")
        if abs(self.elementary_symbol_s + self.cp_s - self.total_symbol_s) > 0.01 * self.total_symbol_s:
            raise ParameterError("elementary symbol + CP must match total symbol duration within 1%")
        if self.estimator_mode not in ESTIMATOR_MODES:
            raise ParameterError(f"estimator_mode must be one of {ESTIMATOR_MODES}")
        if self.twiddle_sign not in (1, -1):
            raise ParameterError("twiddle_sign must be +1 or -1")
        _check_zc_root(self.n_subcarriers, self.zc_root)

    @property
    def elementary_symbol_s(self) -> float:
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def bin_to_m(self) -> float:
        """Range covered by one periodogram bin."""
        return self.c_mps / (2 * self.subcarrier_spacing_hz * self.n_ifft)

    @property
    def max_range_m(self) -> float:
        return self.c_mps / (2 * self.subcarrier_spacing_hz)


@dataclass(frozen=True)
class TargetModel:
    range_m: float = 50.0
    velocity_mps: float = 20.0
    amplitude: float = 1.0

    def delay_s(self, cfg: RadarConfig) -> float:
        return 2 * self.range_m / cfg.c_mps

    def doppler_hz(self, cfg: RadarConfig) -> float:
        return 2 * self.velocity_mps * cfg.carrier_hz / cfg.c_mps

    def validate(self, cfg: RadarConfig):
        if self.range_m < 0:
            raise ParameterError("target range must be non-negative")
        if self.delay_s(cfg) >= cfg.elementary_symbol_s:
            raise ParameterError(
                f"target at {self.range_m} m is beyond the unambiguous range {cfg.max_range_m:.2f} m")


@dataclass(frozen=True, eq=False)
class TxFrame:
    bits: np.ndarray        # (N_c, M, 2)
    qam: np.ndarray         # (N_c, M)
    zc: np.ndarray          # (N_c,)
    precoded: np.ndarray    # (N_c, M)


@dataclass(frozen=True, eq=False)
class ReceivedGrid:
    data: np.ndarray
    cp_exceeded: bool = False


@dataclass(frozen=True, eq=False)
class RangeProfile:
    power: np.ndarray
    bin_to_m: float
    mode: str
    peak_raw_power: float = 0.0

    @property
    def range_axis_m(self) -> np.ndarray:
        return np.arange(self.power.size) * self.bin_to_m

    def power_db(self, floor_db: float = -120.0) -> np.ndarray:
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(self.power)
        return np.maximum(db, floor_db)


@dataclass(frozen=True)
class RangeEstimate:
    range_m: float
    peak_bin: int
    peak_power_db: float


def _check_zc_root(n: int, u: int):
    if not 0 < u < n or math.gcd(u, n) != 1 or (n % 2 == 0 and u % 2 == 0):
        raise ParameterError(f"Zadoff-Chu root {u} is not valid for length {n}")


def zadoff_chu(n: int, u: int = 1) -> np.ndarray:
    """Even-length Zadoff-Chu sequence ``exp(-j*pi*u*i**2/n)``."""
    if n < 2 or n % 2:
        raise ParameterError(f"Zadoff-Chu length must be even, got {n}")
    _check_zc_root(n, u)
    i = np.arange(n)
    # reduce i^2*u mod 2n first so large indices keep full phase precision
    return np.exp(-1j * np.pi * ((u * i * i) % (2 * n)) / n)


_QAM = np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j]) / np.sqrt(2)


def qam4_map(bits: np.ndarray) -> np.ndarray:
    """Gray 4-QAM: 00 -> (+1+j), 01 -> (-1+j), 11 -> (-1-j), 10 -> (+1-j), /sqrt(2)."""
    bits = np.asarray(bits)
    return _QAM[2 * bits[..., 0] + bits[..., 1]]


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def generate_frame(cfg: RadarConfig, seed) -> TxFrame:
    rng = np.random.default_rng(_seed_sequence(seed))
    bits = rng.integers(0, 2, size=(cfg.n_subcarriers, cfg.n_symbols, 2), dtype=np.int64)
    qam = qam4_map(bits)
    zc = zadoff_chu(cfg.n_subcarriers, cfg.zc_root)
    return TxFrame(bits, qam, zc, qam * zc[:, None])


def complex_awgn(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Circularly symmetric complex Gaussian noise with total variance ``variance``."""
    s = math.sqrt(variance / 2)
    return s * rng.standard_normal(shape) + 1j * s * rng.standard_normal(shape)


def apply_channel(frame: TxFrame, tgt: TargetModel, snr_db: float, cfg: RadarConfig,
                  seed=None) -> ReceivedGrid:
    """Point target as a per-subcarrier phase ramp and per-symbol Doppler rotation.

    ``snr_db = inf`` gives a noiseless grid. ``cp_exceeded`` is set when the
    round-trip delay is longer than the cyclic prefix, where the circular
    (frequency-domain) channel model stops being exact.
    """
    tgt.validate(cfg)
    tau = tgt.delay_s(cfg)
    f_d = tgt.doppler_hz(cfg)
    k = np.arange(cfg.n_subcarriers)[:, None]
    m = np.arange(cfg.n_symbols)[None, :]
    h = tgt.amplitude * np.exp(-2j * np.pi * k * cfg.subcarrier_spacing_hz * tau) \
        * np.exp(2j * np.pi * f_d * m * cfg.total_symbol_s)
    rx = frame.precoded * h
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ParameterError(f"invalid SNR {snr_db}")
    if snr_db != math.inf:
        rng = np.random.default_rng(_seed_sequence(seed))
        rx = rx + complex_awgn(rng, rx.shape, 10 ** (-snr_db / 10))
    return ReceivedGrid(rx, cp_exceeded=tau > cfg.cp_s)


def _as_grid(rx) -> np.ndarray:
    return rx.data if isinstance(rx, ReceivedGrid) else np.asarray(rx)


def divide_float(rx, frame: TxFrame) -> np.ndarray:
    """Double-precision channel estimate ``rx / tx`` (tx has unit modulus)."""
    rx = _as_grid(rx)
    if rx.shape != frame.precoded.shape:
        raise ParameterError(f"grid shapes differ: {rx.shape} vs {frame.precoded.shape}")
    return rx * np.conj(frame.precoded)


def quantize_grid(d: np.ndarray) -> ComplexFx16:
    """Clamp each component into the Q1.15 range and quantize."""
    hi = RAW_MAX / SCALE
    return ComplexFx16(quantize_array(np.clip(d.real, -1.0, hi)),
                       quantize_array(np.clip(d.imag, -1.0, hi)))


def spectral_divide(rx, frame: TxFrame) -> ComplexFx16:
    return quantize_grid(divide_float(rx, frame))


def periodogram_profile(pair: OperatorPair, d: ComplexFx16, cfg: RadarConfig) -> RangeProfile:
    """Range profile from the fixed-point IFFT of the division grid.

    ``zeropad_average`` zero-pads each symbol's subcarriers to n_ifft points
    and sums |X|^2 over symbols; ``flattened`` runs one transform over the
    grid laid out subcarrier-fastest. With a negative twiddle sign the bins
    are read back in mirrored order so the bin index always means delay.
    """
    pair.require_functional()
    if d.shape != (cfg.n_subcarriers, cfg.n_symbols):
        raise ParameterError(f"division grid has shape {d.shape}, expected "
                             f"{(cfg.n_subcarriers, cfg.n_symbols)}")
    if not (np.any(d.re) or np.any(d.im)):
        raise DegenerateInputError("division grid is all zero")
    n = cfg.n_ifft
    rom = build_rom(n, cfg.twiddle_sign)
    if cfg.estimator_mode == "zeropad_average":
        re = np.zeros((cfg.n_symbols, n), np.int64)
        im = np.zeros((cfg.n_symbols, n), np.int64)
        re[:, :cfg.n_subcarriers] = d.re.T
        im[:, :cfg.n_subcarriers] = d.im.T
    else:
        re = d.re.T.reshape(1, n)
        im = d.im.T.reshape(1, n)
    out = ifft(pair, ComplexFx16(re, im), rom)
    xr, xi = to_float(out.re), to_float(out.im)
    power = (xr * xr + xi * xi).sum(axis=0)
    if cfg.twiddle_sign == -1:
        power = np.roll(power[::-1], 1)
    peak = float(power.max())
    norm = power / peak if peak > 0 else power
    return RangeProfile(norm, cfg.bin_to_m, cfg.estimator_mode, peak)


def estimate_from_profile(profile: RangeProfile) -> RangeEstimate:
    b = int(np.argmax(profile.power))  # first maximum = lowest bin on ties
    db = 10 * math.log10(profile.peak_raw_power) if profile.peak_raw_power > 0 else -math.inf
    return RangeEstimate(b * profile.bin_to_m, b, db)


def periodogram_estimate(pair: OperatorPair, d: ComplexFx16, cfg: RadarConfig):
    profile = periodogram_profile(pair, d, cfg)
    return profile, estimate_from_profile(profile)


def simulate(cfg: RadarConfig, tgt: TargetModel, pair: OperatorPair = ACC_PAIR,
             snr_db: float = math.inf, seed=0):
    """Full chain returning ``(profile, estimate)``."""
    frame_seq, noise_seq = _seed_sequence(seed).spawn(2)
    frame = generate_frame(cfg, frame_seq)
    rx = apply_channel(frame, tgt, snr_db, cfg, noise_seq)
    return periodogram_estimate(pair, spectral_divide(rx, frame), cfg)


def run_pipeline(cfg: RadarConfig, tgt: TargetModel, pair: OperatorPair = ACC_PAIR,
                 snr_db: float = math.inf, seed=0) -> RangeEstimate:
    """Frame -> channel -> division -> periodogram, seeded end to end."""
    return simulate(cfg, tgt, pair, snr_db, seed)[1]


def run_seeds(seed: int, runs: int) -> list[int]:
    """Per-run integer seeds derived from a master seed."""
    if runs < 1:
        raise ParameterError("runs must be >= 1")
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(runs, dtype=np.uint64)]


def resilience_probe(cfg: RadarConfig, tgt: TargetModel, block: str, sigma: float,
                     runs: int = 100, seed: int = 0, pair: OperatorPair = ACC_PAIR) -> float:
    """Mean |range error| when complex N(0, sigma^2) noise is injected at ``block``.

    The channel itself is noiseless; ``division_input`` perturbs the received
    grid before division, ``estimator_input`` the division result before it
    is quantized for the IFFT.
    """
    if block not in PROBE_BLOCKS:
        raise ParameterError(f"unknown probe block '{block}', expected one of {PROBE_BLOCKS}")
    if sigma < 0:
        raise ParameterError("sigma must be non-negative")
    devs = []
    for s in run_seeds(seed, runs):
        frame_seq, _, probe_seq = _seed_sequence(s).spawn(3)
        frame = generate_frame(cfg, frame_seq)
        rx = apply_channel(frame, tgt, math.inf, cfg).data
        noise = complex_awgn(np.random.default_rng(probe_seq), rx.shape, sigma ** 2)
        if block == "division_input":
            rx = rx + noise
        d = divide_float(rx, frame)
        if block == "estimator_input":
            d = d + noise
        est = periodogram_estimate(pair, quantize_grid(d), cfg)[1]
        devs.append(abs(est.range_m - tgt.range_m))
    return float(np.mean(devs))
