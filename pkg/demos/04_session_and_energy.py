"""
Frames, downtime and the UE's energy bill
=========================================

The client measures a round trip per frame while connected. A migration
drops the stream; the client then polls until DNS points at a running
pod again. The UE spends encode power if it processes locally, and only
idle-level power while offloading.
"""

from mecsim import EnergyMode, EnergyProfile, energy, load_bundled, run_scenario

# %%
profile = EnergyProfile()
print("10 s local encode:", energy(10, EnergyMode.LOCAL, profile), "J")
print("10 s offloaded:   ", energy(10, EnergyMode.OFFLOADED, profile), "J")
print("ratio:", round(profile.offload_w / profile.encode_w, 3))

# %%
r = run_scenario(load_bundled("paper-walk"))
s = r.session
m = r.migrations[0]
print(f"disrupted at {s.t_disrupted[0]:.2f}s, reconnected at {s.t_reconnected[0]:.2f}s")
print(f"downtime {s.downtimes()[0]:.3f}s = migration {m.migration_latency:.3f}s "
      f"+ DNS {r.scenario.dns_propagation_s}s + polling slack")
print(f"connected {s.connected_time:.3f}s + disrupted {s.disrupted_time:.3f}s = {s.duration:.1f}s")
print(f"session energy offloaded {s.energy_offloaded():.1f} J vs local {s.energy_local():.1f} J")
