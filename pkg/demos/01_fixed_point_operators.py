"""Q1.15 arithmetic with exact and approximate operators."""
# %%
import numpy as np

from approxradar import fxp
from approxradar.errstat import eval_metrics

a, b = fxp.quantize(0.3), fxp.quantize(-0.1234)
print("a =", a.raw, a.value, " b =", b.raw, b.value)

# %% [markdown]
# Sums saturate instead of wrapping; products round the 30-bit result back
# to 15 fractional bits.

# %%
print("0.75 + 0.75 ->", fxp.add(fxp.ACC_ADDER, fxp.quantize(0.75), fxp.quantize(0.75)).value)
print("-1 * -1     ->", fxp.mul(fxp.ACC_MULT, fxp.Fx16(-32768), fxp.Fx16(-32768)).value)

# %%
for token in ["acc", "loa4", "tra4", "bcp4"]:
    m = fxp.parse_model(token, "adder")
    print(f"{token:>5}: a+b = {fxp.add(m, a, b).raw:6d}")
for token in ["acc", "tmul6", "ppp6"]:
    m = fxp.parse_model(token, "mult")
    print(f"{token:>5}: a*b = {fxp.mul(m, a, b).raw:6d}")

# %% [markdown]
# Error metrics: exhaustive at small widths, sampled at 16 bits.

# %%
for token in ["loa2", "loa4", "loa8", "tmul4", "ppp4"]:
    m = eval_metrics(fxp.parse_model(token), 8)
    print(f"{m.name:>6} ep={m.ep_pct:7.3f}%  mae={m.mae_pct:.4f}%  wce={m.wce_pct:.4f}%")

m = eval_metrics(fxp.parse_model("loa4"), 16, "sampled", seed=0, samples=1_000_000)
print("loa4 @16 bits, sampled:", round(m.ep_pct, 2), "% wrong")

# %%
# published figures for the library circuits that are not simulated here
print(eval_metrics(fxp.parse_model("fixture:add16se_3BD")))

# %%
x = fxp.ComplexFx16.from_complex(np.array([0.5 + 0.5j, -0.25j]))
w = fxp.ComplexFx16.from_complex(np.array([1j, 1j]) * (1 - 2 ** -15))
print(fxp.cmul(fxp.parse_pair("loa4+tmul6"), x, w).to_complex())
