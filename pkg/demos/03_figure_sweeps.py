"""Reduced-size decoherence sweeps: the shape of the figure experiments.

The full presets (fig1, fig2, fig3, fourlayer) average 10 models x 10
states over N = 1..10 and take a few seconds each; this demo shrinks the
grid to stay fast while showing the same three behaviour classes.

Run with:  python3 demos/03_figure_sweeps.py

The one-command full experiments are:
    nested-udd sweep --preset fig1 --out fig1.csv
    nested-udd sweep --preset fig2 --out fig2.csv
    nested-udd sweep --preset fig3 --out fig3.csv
    nested-udd sweep --preset fourlayer --out fourlayer.csv
"""

import numpy as np

from nested_udd import SweepConfig, fit_order, sweep

config = SweepConfig(
    orderings=(
        ("Xphi", "X1", "X0"),   # every layer lands on its suppressed sector
        ("X0", "X1", "Xphi"),   # middle layer fails to close: saturates
        ("X0", "Xphi", "X1"),   # non-invariant conjugation: stays flat
    ),
    n_values=(1, 2, 3, 4, 5, 6),
    n_models=3,
    n_states=3,
)
result = sweep(config)

table = {}
for row in result.rows:
    table.setdefault("-".join(row.ordering), {})[row.n] = row.mean_d

print("mean trace distance by pulses-per-layer N (T = 0.1):\n")
header = "ordering".ljust(14) + "".join(f"{f'N={n}':>11}" for n in config.n_values)
print(header)
for name, cells in table.items():
    print(name.ljust(14) + "".join(f"{cells[n]:>11.2e}" for n in config.n_values))

# ---------------------------------------------------------------------------
# The suppression-order law: halving T divides d by 2^(N+1) for a working
# single layer, so the log-log slope of d against T fits N+1.

print("\nlog-log slope of d vs T for a single X0 layer:")
for n in (1, 2):
    fit = fit_order(("X0",), n, np.geomspace(0.01, 0.1, 8), n_models=3)
    print(f"  N={n}: slope {fit.slope:.2f}  (expected about {n + 1})")
