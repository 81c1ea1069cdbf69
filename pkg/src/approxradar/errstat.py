"""
Error characterization of approximate operators against the exact ones.

Metrics follow the usual approximate-circuit conventions, computed on the raw
(pre-saturation) outputs:

* EP  - percent of input pairs whose output differs from the exact one
* MAE - mean |error| as a percent of the output range (2**W_out - 1)
* WCE - max |error| as a percent of the same range
* MRE - mean of |error| / |exact| over pairs with a nonzero exact result

Adders have W_out = width + 1, multipliers W_out = 2 * width. Counts and
absolute-error sums are accumulated as Python ints and the per-pair relative
errors (each a correctly rounded double) are summed exactly as dyadic
rationals, so chunking order never changes the result.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .fxp import FIXTURE_CIRCUITS, AdderModel, MultModel

DEFAULT_SAMPLES = 10_000_000
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ErrorMetrics:
    name: str
    width: int
    mode: str
    ep_pct: float | None
    mae_pct: float | None
    wce_pct: float | None
    mre_pct: float | None
    pairs_evaluated: int
    zero_exact_skipped: int
    seed: int | None = None

    def csv_row(self) -> list:
        def fmt(v):
            return "" if v is None else repr(float(v))
        return [self.name, self.width, self.mode, fmt(self.ep_pct), fmt(self.mae_pct),
                fmt(self.wce_pct), fmt(self.mre_pct), self.pairs_evaluated]


CSV_HEADER = ["name", "width", "mode", "ep_pct", "mae_pct", "wce_pct", "mre_pct", "pairs"]


def _dyadic_sum(x: np.ndarray) -> Fraction:
    """Exact sum of finite non-negative doubles."""
    mant, expo = np.frexp(x)
    m = (mant * (1 << 53)).astype(np.int64)
    total = Fraction(0)
    for e in np.unique(expo):
        sel = m[expo == e]
        s = (int((sel >> 26).sum()) << 26) + int((sel & ((1 << 26) - 1)).sum())
        total += Fraction(s) * Fraction(2) ** (int(e) - 53)
    return total


class _Accumulator:
    def __init__(self):
        self.pairs = 0
        self.wrong = 0
        self.abs_sum = 0
        self.abs_max = 0
        self.rel_sum = Fraction(0)
        self.nonzero = 0

    def update(self, approx: np.ndarray, exact: np.ndarray):
        err = np.abs(approx - exact)
        self.pairs += int(err.size)
        self.wrong += int(np.count_nonzero(err))
        self.abs_sum += int(err.sum(dtype=np.int64))
        if err.size:
            self.abs_max = max(self.abs_max, int(err.max()))
        nz = exact != 0
        self.nonzero += int(np.count_nonzero(nz))
        self.rel_sum += _dyadic_sum(err[nz] / np.abs(exact[nz]))

    def metrics(self, name, width, out_bits, mode, seed) -> ErrorMetrics:
        full_scale = (1 << out_bits) - 1
        n = self.pairs
        ep = float(Fraction(100 * self.wrong, n))
        mae = float(Fraction(100 * self.abs_sum, n * full_scale))
        wce = float(Fraction(100 * self.abs_max, full_scale))
        mre = float(100 * self.rel_sum / self.nonzero) if self.nonzero else 0.0
        return ErrorMetrics(name, width, mode, ep, mae, wce, mre, n, n - self.nonzero, seed)


def _operand_range(width):
    return -(1 << (width - 1)), (1 << (width - 1))


def _exhaustive_chunks(width):
    lo, hi = _operand_range(width)
    b = np.arange(lo, hi, dtype=np.int64)
    rows = max(1, _CHUNK // b.size)
    for start in range(lo, hi, rows):
        a = np.arange(start, min(start + rows, hi), dtype=np.int64)
        aa, bb = np.meshgrid(a, b, indexing="ij")
        yield aa.ravel(), bb.ravel()


def _sampled_chunks(width, samples, seed):
    rng = np.random.default_rng(seed)
    lo, hi = _operand_range(width)
    left = samples
    while left > 0:
        n = min(left, _CHUNK)
        yield rng.integers(lo, hi, n, dtype=np.int64), rng.integers(lo, hi, n, dtype=np.int64)
        left -= n


def _check_width(width):
    if not 2 <= width <= 16:
        raise ParameterError(f"width must be in [2, 16], got {width}")


def _fixture_metrics(model, width, kind) -> ErrorMetrics:
    name = model.fixture
    entry = FIXTURE_CIRCUITS.get(name)
    published = entry[1] if entry and entry[0] == kind else {}
    return ErrorMetrics(name, width, "fixture", published.get("ep_pct"), published.get("mae_pct"),
                        published.get("wce_pct"), published.get("mre_pct"), 0, 0)


def _evaluate(model, width, mode, seed, samples, approx_fn, exact_fn, out_bits, kind):
    _check_width(width)
    if not model.functional:
        return _fixture_metrics(model, width, kind)
    if mode == "exhaustive":
        chunks = _exhaustive_chunks(width)
        seed = None
    elif mode == "sampled":
        if seed is None:
            raise ParameterError("sampled mode needs a seed")
        if samples is None or samples <= 0:
            raise ParameterError("sampled mode needs a positive sample count")
        chunks = _sampled_chunks(width, samples, seed)
    else:
        raise ParameterError(f"mode must be 'exhaustive' or 'sampled', got '{mode}'")
    acc = _Accumulator()
    for a, b in chunks:
        acc.update(approx_fn(a, b), exact_fn(a, b))
    return acc.metrics(model.name, width, out_bits, mode, seed)


def eval_adder_metrics(model: AdderModel, width: int = 16, mode: str = "exhaustive",
                       seed: int | None = None, samples: int | None = DEFAULT_SAMPLES) -> ErrorMetrics:
    """Error metrics of ``model`` against the exact (width+1)-bit sum.

    Fixture models return their published figures with ``mode='fixture'``.
    """
    return _evaluate(model, width, mode, seed, samples,
                     lambda a, b: model.raw_sum(a, b, width), lambda a, b: a + b,
                     width + 1, "adder")


def eval_mult_metrics(model: MultModel, width: int = 16, mode: str = "exhaustive",
                      seed: int | None = None, samples: int | None = DEFAULT_SAMPLES) -> ErrorMetrics:
    """Error metrics of ``model`` against the exact 2*width-bit product."""
    return _evaluate(model, width, mode, seed, samples,
                     lambda a, b: model.raw_product(a, b, width), lambda a, b: a * b,
                     2 * width, "mult")


def eval_metrics(model, width=16, mode="exhaustive", seed=None, samples=DEFAULT_SAMPLES):
    if isinstance(model, AdderModel):
        return eval_adder_metrics(model, width, mode, seed, samples)
    return eval_mult_metrics(model, width, mode, seed, samples)
