"""A walk through the channel and cost formulas.

Shows the dual-slope ground path loss with its breakpoint, the affine
exchange-cost map, the air-to-ground gain, and how the transmission rate
responds to power.
"""

import numpy as np

from vcsched import ChannelParams, SchedulingConfig, breakpoint_distance, rate, v2v_path_loss

channel = ChannelParams()
config = SchedulingConfig()

d_b = breakpoint_distance(channel)
print(f"breakpoint distance: {d_b:.2f} m "
      f"(ht={channel.ht} m, hr={channel.hr} m, wavelength={channel.wavelength} m)")

print("\nground path loss (no shadowing):")
for d in (1.0, 10.0, 100.0, d_b, 2 * d_b, 1000.0):
    pl = v2v_path_loss(d, channel)
    cost = config.cost_slope * pl + config.cost_offset
    print(f"  d = {d:8.2f} m   pl = {pl:7.2f} dB   exchange cost = {cost:7.3f}")

print("\nrate vs power at a few air-to-ground distances:")
for dist in (100.0, 300.0, 600.0):
    g = channel.g1 * dist ** (-channel.eta3)
    rates = [rate(q, g, channel) / 1e3 for q in (0.5, 1.0, 2.0)]
    print(f"  d = {dist:5.0f} m  gain = {g:.2e}  "
          f"rate(0.5 W) = {rates[0]:8.1f} kb/s  "
          f"rate(1 W) = {rates[1]:8.1f} kb/s  rate(2 W) = {rates[2]:8.1f} kb/s")

print("\nconcavity: doubling power never doubles the rate —")
g = channel.g1 * 300.0 ** (-channel.eta3)
for q in (0.25, 0.5, 1.0):
    r1, r2 = rate(q, g, channel), rate(2 * q, g, channel)
    print(f"  q = {q:.2f} W: rate x{r2 / r1:.3f} when power x2")
