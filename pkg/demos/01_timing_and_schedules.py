"""Walk through pulse timing: single layers, nesting, and flattening.

Run with:  python3 demos/01_timing_and_schedules.py
"""

import numpy as np

from nested_udd import (
    EventList,
    LayerSpec,
    LayeredSchedule,
    flatten,
    nested_times,
    udd_times,
)

# ---------------------------------------------------------------------------
# A single UDD layer places N pulses at sine-squared fractions of the span.
# The spacing crowds toward both ends, which is what buys the high
# suppression order.

print("UDD pulse instants, N = 4 over [0, 1]:")
print(" ", np.round(udd_times(4, 0.0, 1.0), 6))

print("compare equidistant placement at the same N:")
print(" ", np.round(np.linspace(0, 1, 6)[1:-1], 6))

# ---------------------------------------------------------------------------
# Nesting: every layer subdivides the intervals left by the layers above
# it. Layer 0 is the outermost. With N=2 outside and N=2 inside, the inner
# layer runs its own 2-pulse pattern inside each of the three outer
# intervals, so drift intervals multiply: (2+1) * (2+1) = 9.

layers = (LayerSpec("X0", 2), LayerSpec("X1", 2))
per_layer = nested_times(layers, 1.0)
print("\nouter X0 times :", np.round(per_layer[0], 6))
print("inner X1 times :", np.round(per_layer[1], 6))

# ---------------------------------------------------------------------------
# flatten() turns the layered description into one chronological event
# list: (drift duration, pulse name) pairs. Odd-N layers append a terminal
# pulse at the end of each interval they govern; where several pulses land
# on the same instant the follow-ups appear as zero-duration events,
# composed inner layer first.

schedule = LayeredSchedule((LayerSpec("X0", 1), LayerSpec("X1", 1)), 1.0)
events = flatten(schedule)
print("\nflattened X0(N=1) over X1(N=1):")
print(f"{'#':>3} {'time':>10} {'duration':>10}  pulse")
for i, ev in enumerate(events.events):
    name = ev.pulse if ev.pulse is not None else "-"
    print(f"{i:>3} {ev.time:>10.6f} {ev.duration:>10.6f}  {name}")

assert isinstance(events, EventList)
print("\ntotal pulses:", events.total_pulses, " counts:", events.pulse_counts())
