"""One radar frame from bits to a range estimate."""
# %%
import math

import numpy as np

from approxradar import radar
from approxradar.fxp import ACC_PAIR, parse_pair

cfg = radar.RadarConfig()
tgt = radar.TargetModel()          # 50 m, 20 m/s
print(f"bin width {cfg.bin_to_m:.4f} m, unambiguous range {cfg.max_range_m:.1f} m")
print(f"delay {tgt.delay_s(cfg) * 1e9:.1f} ns, doppler {tgt.doppler_hz(cfg):.1f} Hz")

# %%
frame = radar.generate_frame(cfg, seed=0)
rx = radar.apply_channel(frame, tgt, snr_db=math.inf, cfg=cfg)
print("delay exceeds cyclic prefix:", rx.cp_exceeded)
d = radar.spectral_divide(rx, frame)
profile, est = radar.periodogram_estimate(ACC_PAIR, d, cfg)
print(est)

# %%
db = profile.power_db()
top = np.argsort(db)[::-1][:5]
for b in sorted(top):
    print(f"bin {b:3d}  {profile.range_axis_m[b]:7.3f} m  {db[b]:6.2f} dB")

# %% [markdown]
# The flattened layout concatenates symbols, so the subcarrier phase ramp
# restarts every 32 samples and the peak lands a few bins short.

# %%
for mode in radar.ESTIMATOR_MODES:
    for v in (0.0, 20.0):
        c = radar.RadarConfig(estimator_mode=mode)
        _, e = radar.simulate(c, radar.TargetModel(velocity_mps=v), ACC_PAIR)
        print(f"{mode:>16} v={v:4.1f}: {e.range_m:.4f} m")

# %%
for name in ["loa4+tmul6", "loa10+tmul10", "loa15+ppp14"]:
    _, e = radar.simulate(cfg, tgt, parse_pair(name), snr_db=0.0, seed=3)
    print(f"{name:>12}: {e.range_m:7.3f} m")
