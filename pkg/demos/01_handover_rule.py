"""
The margin-based handover trigger
=================================

A neighbour cell takes over only when its RSRP beats the serving cell's
by more than that neighbour's margin. Equality is not enough.
"""

from mecsim import RadioSample, evaluate_handover

serving = RadioSample(t=0.0, cell_id=1, rsrp=-90.0, rsrq=-10.0, serving=True)

# %%
# -80 dBm against -90 dBm with a 3 dB margin: -80 > -87, so cell 2 wins.
for m_n in (-80.0, -86.9, -87.0, -95.0):
    d = evaluate_handover(serving, [RadioSample(0.0, 2, m_n, -10.0)], margins={2: 3.0})
    print(f"M_n={m_n:6.1f}  ->  {'handover to cell %d' % d.target_cell if d else 'stay'}")

# %%
# Two qualifying neighbours of equal strength: the lower cell id is chosen.
d = evaluate_handover(RadioSample(0, 3, -90, -10, True),
                      [RadioSample(0, 2, -80, -10), RadioSample(0, 1, -80, -10)],
                      margins={1: 3.0, 2: 3.0})
print("tie goes to cell", d.target_cell)

# %%
# With a time-to-trigger the neighbour must keep qualifying for that long.
state = {}
for k in range(5):
    t = 0.2 * k
    d = evaluate_handover(RadioSample(t, 1, -90, -10, True), [RadioSample(t, 2, -80, -10)],
                          margins={2: 3.0}, ttt=0.4, qualified_since=state)
    print(f"t={t:.1f}s  {'fires' if d else 'waiting'}")
