"""Parameter sweeps over orderings and pulse counts, with CSV persistence.

A sweep cell is one (ordering, N): the same flattened schedule is executed for
every model realization, with all initial system states of that realization
batched as columns through a single propagation pass. Sub-seeds come from the
master seed through tagged derivations, so any cell can be recomputed in
isolation (and cells may run in parallel processes) without changing a single
output bit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path

import numpy as np

from nested_udd.linalg import NumericalFault, reduced_from_state, trace_distance
from nested_udd.evolve import evolve_vector, run_once
from nested_udd.model import (
    BATH_TAG,
    MODEL_TAG,
    STATE_TAG,
    build_model,
    derive_seed,
    random_bath_state,
    random_full_state,
    random_protected_state,
)
from nested_udd.operators import CONTROL_NAMES, SystemState, get_convention
from nested_udd.schedule import RULES, LayerSpec, LayeredSchedule, flatten

DEFAULT_MASTER_SEED = 123456789
NOISE_FLOOR = 1e-14

CSV_COLUMNS = (
    "ordering",
    "N",
    "rule",
    "mean_d",
    "geo_mean_d",
    "std_d",
    "min_d",
    "max_d",
    "runs",
    "pulses_total",
)


@dataclass(frozen=True)
class SweepConfig:
    orderings: tuple
    n_values: tuple = tuple(range(1, 11))
    total_time: float = 0.1
    n_models: int = 10
    n_states: int = 10
    rule: str = "udd"
    master_seed: int = DEFAULT_MASTER_SEED
    basis: str = "default"
    state_space: str = "pair"
    n_spins: int = 5
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "orderings", tuple(tuple(o) for o in self.orderings)
        )
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.orderings:
            raise ValueError("at least one ordering required")
        for o in self.orderings:
            for name in o:
                if name not in CONTROL_NAMES:
                    raise ValueError(f"unknown control operator {name!r}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if self.state_space not in ("pair", "full"):
            raise ValueError("state_space must be 'pair' or 'full'")
        get_convention(self.basis)
        if self.n_models < 1 or self.n_states < 1:
            raise ValueError("n_models and n_states must be >= 1")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")


@dataclass(frozen=True)
class SweepRow:
    ordering: tuple
    n: int
    rule: str
    mean_d: float
    geo_mean_d: float
    std_d: float
    min_d: float
    max_d: float
    runs: int
    pulses_total: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    config: SweepConfig
    max_norm_error: float


def _initial_states(config: SweepConfig):
    conv = get_convention(config.basis)
    states = []
    for si in range(config.n_states):
        seed = derive_seed(config.master_seed, STATE_TAG, si)
        if config.state_space == "pair":
            states.append(random_protected_state(seed, conv))
        else:
            states.append(random_full_state(seed))
    return states


def _compute_cell(config: SweepConfig, ordering: tuple, n: int):
    conv = get_convention(config.basis)
    sched = LayeredSchedule(
        layers=tuple(LayerSpec(c, n, config.rule) for c in ordering),
        total_time=config.total_time,
    )
    events = flatten(sched)
    states = _initial_states(config)
    n_bath = config.n_spins - 2
    ds = []
    max_err = 0.0
    for mi in range(config.n_models):
        model = build_model(config.n_spins, derive_seed(config.master_seed, MODEL_TAG, mi))
        bath = random_bath_state(derive_seed(config.master_seed, BATH_TAG, mi), n_bath)
        cols = np.stack([np.kron(st.amplitudes, bath) for st in states], axis=1)
        cols /= np.linalg.norm(cols, axis=0)
        out = evolve_vector(model, events, cols, basis=conv)
        norms = np.linalg.norm(out, axis=0)
        err = float(np.abs(norms - 1.0).max())
        max_err = max(max_err, err)
        if err > 1e-8:
            raise NumericalFault(f"state norm drifted by {err!r}")
        for k, st in enumerate(states):
            rho = reduced_from_state(out[:, k] / norms[k], 4)
            ds.append(trace_distance(rho, st.density()))
    ds = np.array(ds)
    row = SweepRow(
        ordering=ordering,
        n=n,
        rule=config.rule,
        mean_d=float(ds.mean()),
        geo_mean_d=float(np.exp(np.log(np.clip(ds, 1e-300, None)).mean())),
        std_d=float(ds.std(ddof=0)),
        min_d=float(ds.min()),
        max_d=float(ds.max()),
        runs=len(ds),
        pulses_total=events.total_pulses,
    )
    return row, max_err


def _cell_task(args):
    config, ordering, n = args
    return _compute_cell(config, ordering, n)


def sweep(config: SweepConfig) -> SweepResult:
    """Run the full (ordering x N) grid and aggregate per-cell statistics."""
    cells = [(config, o, n) for o in config.orderings for n in config.n_values]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_cell_task, cells))
    else:
        outcomes = [_cell_task(c) for c in cells]
    rows = tuple(row for row, _ in outcomes)
    max_err = max((err for _, err in outcomes), default=0.0)
    return SweepResult(rows=rows, config=config, max_norm_error=max_err)


def four_layer_sweep(config: SweepConfig | None = None) -> SweepResult:
    """Sweep for the all-layers-local scheme protecting arbitrary states.

    Requires the local basis convention (so every Z operator is single-qubit)
    and Haar-random full-space initial states.
    """
    if config is None:
        config = preset_config("fourlayer")
    if config.basis != "local":
        raise ValueError("four-layer sweep requires basis='local'")
    if config.state_space != "full":
        raise ValueError("four-layer sweep requires state_space='full'")
    return sweep(config)


@dataclass(frozen=True)
class FitResult:
    ordering: tuple
    n: int
    t_values: tuple
    mean_ds: tuple
    slope: float
    intercept: float
    below_noise_floor: bool


def fit_order(
    ordering,
    n: int,
    t_values,
    *,
    n_models: int = 5,
    master_seed: int = DEFAULT_MASTER_SEED,
    rule: str = "udd",
    basis: str = "default",
) -> FitResult:
    """Least-squares slope of log10(mean d) vs log10(T) at fixed N.

    Runs the schedule on the basis state of the protected pair, averaged over
    models. When every point sits below the numerical noise floor the slope
    is meaningless and flagged instead.
    """
    ordering = tuple(ordering)
    conv = get_convention(basis)
    state = SystemState.from_pair(1.0, 0.0, conv)
    models = [
        (
            build_model(5, derive_seed(master_seed, MODEL_TAG, mi)),
            derive_seed(master_seed, BATH_TAG, mi),
        )
        for mi in range(n_models)
    ]
    mean_ds = []
    for T in t_values:
        sched = LayeredSchedule(
            layers=tuple(LayerSpec(c, n, rule) for c in ordering),
            total_time=float(T),
        )
        ds = [
            run_once(model, sched, state, bath_seed, basis=conv).d_value
            for model, bath_seed in models
        ]
        mean_ds.append(float(np.mean(ds)))
    below = all(m < NOISE_FLOOR for m in mean_ds)
    if below:
        slope = intercept = float("nan")
    else:
        slope, intercept = np.polyfit(
            np.log10(np.asarray(t_values, dtype=float)),
            np.log10(np.clip(mean_ds, 1e-300, None)),
            1,
        )
    return FitResult(
        ordering=ordering,
        n=n,
        t_values=tuple(float(t) for t in t_values),
        mean_ds=tuple(mean_ds),
        slope=float(slope),
        intercept=float(intercept),
        below_noise_floor=below,
    )


def preset_config(name: str) -> SweepConfig:
    """Named sweep configurations for the published figures."""
    if name == "fig1":
        return SweepConfig(orderings=tuple(permutations(("Xphi", "X1", "X0"))))
    if name == "fig2":
        return SweepConfig(
            orderings=tuple(permutations(("Xphi", "X1", "X0"))), rule="periodic"
        )
    if name == "fig3":
        return SweepConfig(orderings=tuple(permutations(("X01", "X1", "Xphi"))))
    if name == "fourlayer":
        return SweepConfig(
            orderings=(("Z4", "Z3", "Z2", "Z1"), ("Z4", "Z2", "Z3", "Z1")),
            n_values=tuple(range(1, 7)),
            basis="local",
            state_space="full",
        )
    raise ValueError(f"unknown preset {name!r}")


def format_float(x: float) -> str:
    return "%.17g" % x


def write_csv(result: SweepResult, dest) -> None:
    """Write rows in the documented CSV schema; floats keep full precision."""
    lines = [",".join(CSV_COLUMNS)]
    for r in result.rows:
        lines.append(
            ",".join(
                (
                    "-".join(r.ordering),
                    str(r.n),
                    r.rule,
                    format_float(r.mean_d),
                    format_float(r.geo_mean_d),
                    format_float(r.std_d),
                    format_float(r.min_d),
                    format_float(r.max_d),
                    str(r.runs),
                    str(r.pulses_total),
                )
            )
        )
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)
