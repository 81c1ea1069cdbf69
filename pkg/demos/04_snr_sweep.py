"""Monte Carlo accuracy over SNR for a handful of operator pairs."""
# %%
import sys

from approxradar import dse
from approxradar.radar import RadarConfig, TargetModel, resilience_probe

cfg, tgt = RadarConfig(), TargetModel()
pairs = ["acc+acc", "loa4+tmul6", "loa8+tmul8", "loa12+tmul12"]
rows = dse.sweep(cfg, tgt, pairs, dse.snr_grid(-5, 10, 5), runs=30, seed=0)
dse.write_sweep_csv(rows, sys.stdout)

# %%
for p in pairs:
    devs = [r.mean_abs_dev_m for r in rows if r.pair_name == p]
    print(f"{p:>13}: " + "  ".join(f"{d:6.3f}" for d in devs))

# %% [markdown]
# Noise injected after the channel: the chain shrugs off small perturbations
# because the peak sits many dB above the sidelobes.

# %%
for sigma in (0.0, 0.2, 0.5, 1.0, 2.0):
    dev = resilience_probe(cfg, tgt, "estimator_input", sigma, runs=30)
    print(f"sigma {sigma:4.2f}: {dev:.4f} m")
