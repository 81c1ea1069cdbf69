"""The fixed-point radix-2 IFFT against a float reference."""
# %%
import numpy as np

from approxradar.fxp import ACC_PAIR, ComplexFx16, CountingPair, parse_pair
from approxradar.transform import bit_reverse_indices, build_rom, ifft

N = 512
rom = build_rom(N)
print("bit reversal, n=8:", bit_reverse_indices(8))

rng = np.random.default_rng(1)
z = np.sqrt(rng.uniform(0, 0.99, N)) * np.exp(2j * np.pi * rng.uniform(size=N))
x = ComplexFx16.from_complex(z)

# %% [markdown]
# Each stage halves its outputs, so the result is already scaled by 1/N.

# %%
ref = np.fft.ifft(x.to_complex())
for name in ["acc+acc", "loa4+tmul6", "loa8+tmul10", "loa12+ppp12"]:
    out = ifft(parse_pair(name), x, rom).to_complex()
    err = np.abs(out - ref).max() * 2 ** 15
    print(f"{name:>12}: max error {err:8.1f} ulp")

# %%
c = CountingPair(ACC_PAIR)
ifft(c, x, rom)
print("butterflies:", N // 2 * 9, " muls:", c.muls, " adds:", c.adds)

# %%
# impulse in, constant out
imp = np.zeros(N, complex)
imp[0] = 0.5
print(np.unique(ifft(ACC_PAIR, ComplexFx16.from_complex(imp), rom).re))
