"""
Q1.15 fixed-point core with pluggable approximate adders and multipliers.

Values are carried as raw two's-complement integers (value = raw / 2**15).
Vector code works on int64 numpy arrays holding those raws; the scalar
``Fx16`` type exists for readability at API boundaries.

Operator families
-----------------
Adders (width W, raw result has W+1 bits before saturation):

- ``ACC``     exact sum
- ``LOA(k)``  lower-part OR adder: low k bits are ``a | b``, upper part exact
              with no carry from the low part
- ``TRA(k)``  truncation adder: low k bits forced to zero, upper part exact
- ``BCP(b)``  block adder, b-bit blocks, carry into every block predicted 0

Multipliers (sign-magnitude, raw result has 2W bits):

- ``ACC``     exact product
- ``TMUL(k)`` low k magnitude bits of both operands zeroed
- ``PPP(r)``  r least-significant partial-product rows omitted

``FIXTURE(name)`` models stand for published circuits that we only have
error/cost metadata for; they cannot be simulated.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, UnsupportedModelError

WIDTH = 16
FRAC_BITS = WIDTH - 1
RAW_MIN = -(1 << (WIDTH - 1))
RAW_MAX = (1 << (WIDTH - 1)) - 1
SCALE = float(1 << FRAC_BITS)

ADDER_FAMILIES = ("acc", "loa", "tra", "bcp")
MULT_FAMILIES = ("acc", "tmul", "ppp")

# Published metrics for the named circuits (percent). GV3 has none in print.
FIXTURE_CIRCUITS = {
    "add16se_3BD": ("adder", {"mae_pct": 0.046, "ep_pct": 99.02, "mre_pct": 0.96}),
    "mul16s_HFB": ("mult", {"mae_pct": 0.002, "ep_pct": 98.43, "mre_pct": 0.22}),
    "mul16s_GV3": ("mult", {}),
}


def saturate(x, width: int = WIDTH):
    lo = -(1 << (width - 1))
    hi = (1 << (width - 1)) - 1
    return np.clip(x, lo, hi)


@dataclass(frozen=True, order=True)
class Fx16:
    """A single Q1.15 sample."""

    raw: int

    def __post_init__(self):
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ParameterError(f"raw value {self.raw} does not fit in 16 bits")
        object.__setattr__(self, "raw", int(self.raw))

    @property
    def value(self) -> float:
        return self.raw / SCALE

    @classmethod
    def from_value(cls, x: float) -> "Fx16":
        return quantize(x)

    def __repr__(self):
        return f"Fx16({self.raw}, {self.value:.6g})"


def quantize_array(x) -> np.ndarray:
    """Round-to-nearest-even of ``x * 2**15`` saturated to the 16-bit range."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ParameterError("cannot quantize non-finite values")
    return saturate(np.rint(x * SCALE)).astype(np.int64)


def quantize(x: float) -> Fx16:
    return Fx16(int(quantize_array(x)))


def to_float(raw) -> np.ndarray:
    return np.asarray(raw, dtype=np.float64) / SCALE


@dataclass(frozen=True, eq=False)
class ComplexFx16:
    """Complex Q1.15 samples stored as separate raw real/imag int arrays.

    Any shape is allowed; a 0-d instance is one complex sample and a 1-d
    instance is a vector. Leading axes are treated as a batch by the
    transform code.
    """

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re_ = np.asarray(self.re, dtype=np.int64)
        im_ = np.asarray(self.im, dtype=np.int64)
        if re_.shape != im_.shape:
            raise ParameterError(f"re/im shapes differ: {re_.shape} vs {im_.shape}")
        if re_.size and (re_.min() < RAW_MIN or re_.max() > RAW_MAX
                         or im_.min() < RAW_MIN or im_.max() > RAW_MAX):
            raise ParameterError("component outside 16-bit range")
        object.__setattr__(self, "re", re_)
        object.__setattr__(self, "im", im_)

    @classmethod
    def from_complex(cls, z) -> "ComplexFx16":
        z = np.asarray(z, dtype=np.complex128)
        return cls(quantize_array(z.real), quantize_array(z.imag))

    @classmethod
    def zeros(cls, shape) -> "ComplexFx16":
        return cls(np.zeros(shape, np.int64), np.zeros(shape, np.int64))

    def to_complex(self) -> np.ndarray:
        return to_float(self.re) + 1j * to_float(self.im)

    @property
    def shape(self):
        return self.re.shape

    def __len__(self):
        return len(self.re)

    def __getitem__(self, idx) -> "ComplexFx16":
        return ComplexFx16(self.re[idx], self.im[idx])

    def equals(self, other: "ComplexFx16") -> bool:
        return np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im)

    def __repr__(self):
        return f"ComplexFx16({self.to_complex()!r})"


# -- adder families -----------------------------------------------------------

def _add_acc(a, b, width, _):
    return a + b


def _add_loa(a, b, width, k):
    if k == 0:
        return a + b
    low = (a | b) & ((1 << k) - 1)
    return (((a >> k) + (b >> k)) << k) | low


def _add_tra(a, b, width, k):
    return ((a >> k) + (b >> k)) << k


def _add_bcp(a, b, width, block):
    if block >= width:
        return a + b
    # the top block holds the sign bit and keeps its carry-out
    top = ((width - 1) // block) * block
    mask = (1 << block) - 1
    out = ((a >> top) + (b >> top)) << top
    for lo in range(0, top, block):
        out = out | ((((a >> lo) & mask) + ((b >> lo) & mask)) & mask) << lo
    return out


_ADDERS: dict[str, Callable] = {
    "acc": _add_acc,
    "loa": _add_loa,
    "tra": _add_tra,
    "bcp": _add_bcp,
}


# -- multiplier families ------------------------------------------------------

def _sign_magnitude(a, b, magnitude_product):
    neg = (a < 0) ^ (b < 0)
    p = magnitude_product(np.abs(a), np.abs(b))
    return np.where(neg, -p, p)


def _mul_acc(a, b, _):
    return a * b


def _mul_tmul(a, b, k):
    if k == 0:
        return a * b
    return _sign_magnitude(a, b, lambda x, y: ((x >> k) << k) * ((y >> k) << k))


def _mul_ppp(a, b, r):
    if r == 0:
        return a * b
    # row i of the array multiplier is x * bit_i(y) << i; dropping rows 0..r-1
    # is the same as clearing the low r bits of y
    return _sign_magnitude(a, b, lambda x, y: x * ((y >> r) << r))


_MULTS: dict[str, Callable] = {
    "acc": _mul_acc,
    "tmul": _mul_tmul,
    "ppp": _mul_ppp,
}


def _as_raw(x):
    if isinstance(x, Fx16):
        return np.int64(x.raw)
    return np.asarray(x, dtype=np.int64)


def _like(out, ref):
    if isinstance(ref, Fx16):
        return Fx16(int(out))
    return out


@dataclass(frozen=True)
class AdderModel:
    """Behavioral adder: ``family`` in acc/loa/tra/bcp or ``fixture``."""

    family: str
    param: int = 0
    fixture: str | None = None

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam == "fixture":
            if not self.fixture:
                raise ParameterError("fixture adder needs a circuit name")
            return
        if fam not in ADDER_FAMILIES:
            raise ParameterError(f"unknown adder family '{self.family}'")
        p = self.param
        if fam in ("loa", "tra") and not 0 <= p < WIDTH:
            raise ParameterError(f"{fam} needs 0 <= k < {WIDTH}, got {p}")
        if fam == "bcp" and (p <= 0 or WIDTH % p):
            raise ParameterError(f"bcp block size must divide {WIDTH}, got {p}")

    @property
    def functional(self) -> bool:
        return self.family != "fixture"

    @property
    def is_exact(self) -> bool:
        """True when the family reduces to the exact adder by construction."""
        return (self.family == "acc"
                or (self.family in ("loa", "tra") and self.param == 0)
                or (self.family == "bcp" and self.param >= WIDTH))

    @property
    def name(self) -> str:
        if self.family == "fixture":
            return self.fixture
        return "acc" if self.family == "acc" else f"{self.family}{self.param}"

    def raw_sum(self, a, b, width: int = WIDTH):
        """Unsaturated (width+1)-bit sum of two width-bit signed raws."""
        if not self.functional:
            raise UnsupportedModelError(f"fixture adder '{self.fixture}' has no functional model")
        return _ADDERS[self.family](np.asarray(a, np.int64), np.asarray(b, np.int64),
                                    width, self.param)


@dataclass(frozen=True)
class MultModel:
    """Behavioral signed multiplier: ``family`` in acc/tmul/ppp or ``fixture``."""

    family: str
    param: int = 0
    fixture: str | None = None

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam == "fixture":
            if not self.fixture:
                raise ParameterError("fixture multiplier needs a circuit name")
            return
        if fam not in MULT_FAMILIES:
            raise ParameterError(f"unknown multiplier family '{self.family}'")
        if fam != "acc" and not 0 <= self.param < WIDTH:
            raise ParameterError(f"{fam} needs 0 <= param < {WIDTH}, got {self.param}")

    @property
    def functional(self) -> bool:
        return self.family != "fixture"

    @property
    def is_exact(self) -> bool:
        return self.family == "acc" or (self.functional and self.param == 0)

    @property
    def name(self) -> str:
        if self.family == "fixture":
            return self.fixture
        return "acc" if self.family == "acc" else f"{self.family}{self.param}"

    def raw_product(self, a, b, width: int = WIDTH):
        """Full 2*width-bit signed product of two width-bit signed raws."""
        if not self.functional:
            raise UnsupportedModelError(f"fixture multiplier '{self.fixture}' has no functional model")
        return _MULTS[self.family](np.asarray(a, np.int64), np.asarray(b, np.int64), self.param)


ACC_ADDER = AdderModel("acc")
ACC_MULT = MultModel("acc")


@dataclass(frozen=True)
class OperatorPair:
    """An (adder, multiplier) pair injected into every butterfly."""

    name: str
    adder: AdderModel
    mult: MultModel

    @property
    def functional(self) -> bool:
        return self.adder.functional and self.mult.functional

    @property
    def is_baseline(self) -> bool:
        return self.adder.family == "acc" and self.mult.family == "acc"

    def require_functional(self):
        if not self.functional:
            raise UnsupportedModelError(f"pair '{self.name}' contains a fixture-only model")


ACC_PAIR = OperatorPair("acc+acc", ACC_ADDER, ACC_MULT)


def add(model: AdderModel, a, b):
    """Saturating 16-bit add through ``model``. Accepts Fx16 or raw arrays."""
    return _like(saturate(model.raw_sum(_as_raw(a), _as_raw(b))), a)


def negate(a):
    # -(-32768) saturates to 32767
    return _like(saturate(-_as_raw(a)), a)


def sub(model: AdderModel, a, b):
    """``a - b`` as ``a + (-b)`` through the adder model."""
    return add(model, a, negate(b))


def scale_product(p, width: int = WIDTH):
    """Round-half-up shift of a 2W-bit Q2.(2W-2) product back to QW, saturated."""
    shift = width - 1
    return saturate((np.asarray(p, np.int64) + (1 << (shift - 1))) >> shift, width)


def mul(model: MultModel, a, b):
    """Q1.15 multiply through ``model``; round-half-up, then saturate."""
    return _like(scale_product(model.raw_product(_as_raw(a), _as_raw(b))), a)


def cmul(pair: OperatorPair, x: ComplexFx16, y: ComplexFx16) -> ComplexFx16:
    """Complex product with 4 multiplier and 2 adder invocations."""
    rr = mul(pair.mult, x.re, y.re)
    ii = mul(pair.mult, x.im, y.im)
    ri = mul(pair.mult, x.re, y.im)
    ir = mul(pair.mult, x.im, y.re)
    return ComplexFx16(add(pair.adder, rr, negate(ii)), add(pair.adder, ri, ir))


# -- operator spec strings ------------------------------------------------------

_TOKEN = re.compile(r"^(acc|loa|tra|bcp|tmul|ppp)(\d*)$", re.IGNORECASE)


def parse_adder(token: str) -> AdderModel:
    token = token.strip()
    if token.lower().startswith("fixture:"):
        return AdderModel("fixture", fixture=token.split(":", 1)[1])
    m = _TOKEN.match(token)
    if not m or m.group(1).lower() not in ADDER_FAMILIES:
        raise ParameterError(f"bad adder spec '{token}'")
    fam, digits = m.group(1).lower(), m.group(2)
    if fam == "acc":
        if digits:
            raise ParameterError(f"bad adder spec '{token}'")
        return ACC_ADDER
    if not digits:
        raise ParameterError(f"adder spec '{token}' is missing its parameter")
    return AdderModel(fam, int(digits))


def parse_mult(token: str) -> MultModel:
    token = token.strip()
    if token.lower().startswith("fixture:"):
        return MultModel("fixture", fixture=token.split(":", 1)[1])
    m = _TOKEN.match(token)
    if not m or m.group(1).lower() not in MULT_FAMILIES:
        raise ParameterError(f"bad multiplier spec '{token}'")
    fam, digits = m.group(1).lower(), m.group(2)
    if fam == "acc":
        if digits:
            raise ParameterError(f"bad multiplier spec '{token}'")
        return ACC_MULT
    if not digits:
        raise ParameterError(f"multiplier spec '{token}' is missing its parameter")
    return MultModel(fam, int(digits))


def parse_model(token: str, kind: str | None = None):
    """Parse a single adder or multiplier token; ``kind`` resolves ``acc``."""
    t = token.strip()
    low = t.lower()
    if kind is None:
        if low.startswith("fixture:"):
            name = t.split(":", 1)[1]
            known = FIXTURE_CIRCUITS.get(name)
            if known:
                kind = known[0]
            else:
                kind = "mult" if name.lower().startswith("mul") else "adder"
        elif low.startswith(("tmul", "ppp")):
            kind = "mult"
        else:
            kind = "adder"
    if kind == "adder":
        return parse_adder(t)
    if kind == "mult":
        return parse_mult(t)
    raise ParameterError(f"unknown model kind '{kind}'")


def parse_pair(spec: str) -> OperatorPair:
    """Parse ``'loa4+tmul6'`` / ``'fixture:add16se_3BD+fixture:mul16s_HFB'``.

    Fixture prefixes are dropped from the pair name, so the second example
    is named ``add16se_3BD+mul16s_HFB``.
    """
    parts = spec.strip().split("+")
    if len(parts) != 2 or not all(p.strip() for p in parts):
        raise ParameterError(f"pair spec must be '<adder>+<multiplier>', got '{spec}'")
    adder, mult = parse_adder(parts[0]), parse_mult(parts[1])
    return OperatorPair(f"{adder.name}+{mult.name}", adder, mult)


# -- instrumentation ------------------------------------------------------------

@dataclass
class CountingAdder:
    """Wraps an adder and counts element-wise invocations."""

    inner: AdderModel
    calls: int = 0
    elements: int = 0

    functional = property(lambda self: self.inner.functional)
    name = property(lambda self: self.inner.name)
    family = property(lambda self: self.inner.family)

    def raw_sum(self, a, b, width: int = WIDTH):
        out = self.inner.raw_sum(a, b, width)
        self.calls += 1
        self.elements += int(np.size(out))
        return out


@dataclass
class CountingMult:
    inner: MultModel
    calls: int = 0
    elements: int = 0

    functional = property(lambda self: self.inner.functional)
    name = property(lambda self: self.inner.name)
    family = property(lambda self: self.inner.family)

    def raw_product(self, a, b, width: int = WIDTH):
        out = self.inner.raw_product(a, b, width)
        self.calls += 1
        self.elements += int(np.size(out))
        return out


@dataclass
class CountingPair:
    """Duck-typed OperatorPair whose models tally every element operation."""

    base: OperatorPair = field(default_factory=lambda: ACC_PAIR)

    def __post_init__(self):
        self.adder = CountingAdder(self.base.adder)
        self.mult = CountingMult(self.base.mult)
        self.name = self.base.name

    functional = property(lambda self: self.base.functional)

    def require_functional(self):
        self.base.require_functional()

    @property
    def adds(self) -> int:
        return self.adder.elements

    @property
    def muls(self) -> int:
        return self.mult.elements
