"""
Radix-2 decimation-in-time IFFT on Q1.15 data with injected operators.

Dataflow matches a fully parallel core: bit-reversed input, then log2(N)
stages of N/2 independent butterflies each, twiddles read from a ROM that is
filled once per size. Every stage halves its outputs (arithmetic shift,
i.e. floor), so the result carries the usual 1/N inverse-transform scaling
and the 17-bit butterfly sums never need to saturate.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvalidSizeError, ParameterError
from .fxp import ComplexFx16, OperatorPair, add, cmul, negate, quantize_array, saturate

MAX_N = 1 << 16


def _log2_size(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 2 or n > MAX_N or n & (n - 1):
        raise InvalidSizeError(f"size must be a power of two in [2, {MAX_N}], got {n}")
    return int(n).bit_length() - 1


def _frozen(a):
    a = np.array(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TwiddleRom:
    """Precomputed ``cos(2*pi*t/N) + sign*j*sin(2*pi*t/N)`` for t < N/2."""

    n: int
    sign: int
    entries: ComplexFx16

    def __len__(self):
        return self.n // 2

    def __getitem__(self, t) -> ComplexFx16:
        return self.entries[t]


@lru_cache(maxsize=None)
def build_rom(n: int, sign: int = 1) -> TwiddleRom:
    _log2_size(n)
    if sign not in (1, -1):
        raise ParameterError(f"twiddle sign must be +1 or -1, got {sign}")
    t = np.arange(n // 2)
    angle = 2 * np.pi * t / n
    re = quantize_array(np.cos(angle))
    im = sign * quantize_array(np.sin(angle))
    return TwiddleRom(n, sign, ComplexFx16(_frozen(re), _frozen(im)))


@lru_cache(maxsize=None)
def bit_reverse_indices(n: int) -> np.ndarray:
    bits = _log2_size(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return _frozen(rev)


def bit_reverse_permute(x):
    """Reorder the last axis into bit-reversed index order (an involution).

    Works on ``ComplexFx16`` and on anything numpy can index.
    """
    if isinstance(x, ComplexFx16):
        idx = bit_reverse_indices(x.shape[-1] if x.shape else 0)
        return ComplexFx16(x.re[..., idx], x.im[..., idx])
    arr = np.asarray(x)
    if arr.ndim == 0:
        raise InvalidSizeError("cannot permute a scalar")
    return arr[..., bit_reverse_indices(arr.shape[-1])]


@dataclass(frozen=True, eq=False)
class StagePlan:
    """Butterfly wiring of every stage.

    ``top[s]``/``bottom[s]`` list the N/2 index pairs of stage ``s`` and
    ``twiddle[s]`` the ROM address used by each butterfly.
    """

    n: int
    stages: int
    top: tuple
    bottom: tuple
    twiddle: tuple


@lru_cache(maxsize=None)
def stage_plan(n: int) -> StagePlan:
    stages = _log2_size(n)
    top, bottom, tw = [], [], []
    for s in range(stages):
        half = 1 << s
        span = half << 1
        j = np.arange(n // 2)
        group, offset = divmod(j, half)
        a = group * span + offset
        top.append(_frozen(a))
        bottom.append(_frozen(a + half))
        tw.append(_frozen(offset * (n // span)))
    return StagePlan(n, stages, tuple(top), tuple(bottom), tuple(tw))


def butterfly(pair: OperatorPair, xa: ComplexFx16, xb: ComplexFx16, w: ComplexFx16):
    """``ya = xa + w*xb``, ``yb = xa - w*xb`` with saturating adds, no scaling."""
    pair.require_functional()
    t = cmul(pair, w, xb)
    ya = ComplexFx16(add(pair.adder, xa.re, t.re), add(pair.adder, xa.im, t.im))
    yb = ComplexFx16(add(pair.adder, xa.re, negate(t.re)), add(pair.adder, xa.im, negate(t.im)))
    return ya, yb


class _Raw(NamedTuple):
    # unchecked raw pair for the inner loop
    re: np.ndarray
    im: np.ndarray


def _halving_add(adder, a, b):
    # keep the 17-bit sum, drop its LSB: this is the per-stage 1/2 scaling
    return saturate(adder.raw_sum(a, b) >> 1)


def ifft(pair: OperatorPair, x: ComplexFx16, rom: TwiddleRom) -> ComplexFx16:
    """Fixed-point inverse DFT along the last axis, scaled by 1/N.

    Leading axes are independent transforms. Exactly (N/2)*log2(N)
    butterflies run per transform, each with 4 multiplies and 6 adds.
    """
    pair.require_functional()
    n = x.shape[-1] if x.shape else 0
    if n != rom.n:
        raise InvalidSizeError(f"input length {n} does not match ROM size {rom.n}")
    plan = stage_plan(n)
    idx = bit_reverse_indices(n)
    re, im = x.re[..., idx], x.im[..., idx]
    wr_all, wi_all = rom.entries.re, rom.entries.im
    for s in range(plan.stages):
        a, b, t = plan.top[s], plan.bottom[s], plan.twiddle[s]
        prod = cmul(pair, _Raw(wr_all[t], wi_all[t]), _Raw(re[..., b], im[..., b]))
        xar, xai = re[..., a], im[..., a]
        new_re = np.empty_like(re)
        new_im = np.empty_like(im)
        new_re[..., a] = _halving_add(pair.adder, xar, prod.re)
        new_im[..., a] = _halving_add(pair.adder, xai, prod.im)
        new_re[..., b] = _halving_add(pair.adder, xar, negate(prod.re))
        new_im[..., b] = _halving_add(pair.adder, xai, negate(prod.im))
        re, im = new_re, new_im
    return ComplexFx16(re, im)


def write_vector_csv(path, x: ComplexFx16):
    """Test-vector file: one ``index,re_raw,im_raw`` line per sample."""
    with open(path, "w", newline="") as fh:
        fh.write("index,re_raw,im_raw\n")
        for i, (r, q) in enumerate(zip(x.re.tolist(), x.im.tolist())):
            fh.write(f"{i},{r},{q}\n")


def read_vector_csv(path) -> ComplexFx16:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    order = np.argsort(data[:, 0])
    return ComplexFx16(data[order, 1], data[order, 2])
