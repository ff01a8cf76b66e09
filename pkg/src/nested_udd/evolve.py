"""Execute flattened pulse schedules against a spin-bath model.

Propagation works directly on state vectors using the model's cached
eigendecomposition: each drift is two dense transforms plus a phase multiply,
each pulse a 4xB reshape and a small matrix product. Vectors may be stacked as
columns so one pass evolves many initial states through the same schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nested_udd.linalg import (
    NumericalFault,
    apply_propagator,
    reduced_from_state,
    trace_distance,
)
from nested_udd.model import JointState, SpinBathModel, initial_joint_state
from nested_udd.operators import BasisConvention, SystemState, build_control
from nested_udd.schedule import EventList, LayeredSchedule, flatten

NORM_FAULT_TOL = 1e-8


def _pulse_matrices(events: EventList, basis, controls=None) -> dict:
    conv = basis if basis is not None else BasisConvention.default()
    mats = {}
    for ev in events.events:
        if ev.pulse is not None and ev.pulse not in mats:
            if controls is not None and ev.pulse in controls:
                mats[ev.pulse] = np.asarray(controls[ev.pulse], dtype=complex)
            else:
                mats[ev.pulse] = build_control(ev.pulse, conv).sys_matrix
    return mats


def evolve_vector(
    model: SpinBathModel,
    events: EventList,
    psi,
    basis: BasisConvention | None = None,
    controls: dict | None = None,
) -> np.ndarray:
    """Evolve a vector (or stacked columns) through an event list, unnormalized."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != model.dim:
        raise ValueError("state dimension does not match model")
    mats = _pulse_matrices(events, basis, controls)
    bath_dim = model.bath_dim
    stacked = psi.ndim == 2
    for ev in events.events:
        if ev.duration != 0.0:
            psi = apply_propagator(model.eig, ev.duration, psi)
        if ev.pulse is not None:
            x = mats[ev.pulse]
            if stacked:
                blocks = psi.reshape(4, bath_dim, psi.shape[1])
                psi = np.tensordot(x, blocks, axes=([1], [0])).reshape(
                    model.dim, psi.shape[1]
                )
            else:
                psi = (x @ psi.reshape(4, bath_dim)).reshape(model.dim)
    return psi


def evolve(
    model: SpinBathModel,
    events: EventList,
    psi0: JointState,
    basis: BasisConvention | None = None,
    controls: dict | None = None,
) -> JointState:
    vec = evolve_vector(model, events, psi0.amplitudes, basis, controls)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_FAULT_TOL:
        raise NumericalFault(f"state norm drifted to {norm!r}")
    return JointState(vec / norm)


@dataclass(frozen=True)
class RunResult:
    """One schedule executed against one model and one initial state."""

    ordering: tuple
    n: int
    total_time: float
    d_value: float
    model_seed: int | None
    bath_seed: int
    state_seed: int | None
    pulse_count: int
    norm_error: float


def run_once(
    model: SpinBathModel,
    schedule,
    sys: SystemState,
    bath_seed: int,
    *,
    basis: BasisConvention | None = None,
    state_seed: int | None = None,
    coincident: str = "inner_first",
    controls: dict | None = None,
) -> RunResult:
    """Run one schedule and measure how far the system strayed.

    `schedule` may be a LayeredSchedule (flattened here) or an EventList
    (e.g. free evolution or an empty list for a zero-duration run). The
    reported d_value is the trace distance between the reduced final state
    and the initial system state.
    """
    if isinstance(schedule, EventList):
        events = schedule
        ordering: tuple = ()
        n = 0
    elif isinstance(schedule, LayeredSchedule):
        events = flatten(schedule, coincident)
        ordering = tuple(layer.control for layer in schedule.layers)
        n = schedule.layers[0].n_pulses
    else:
        raise TypeError("schedule must be a LayeredSchedule or EventList")
    joint0 = initial_joint_state(sys, bath_seed, model.n_bath_spins)
    vec = evolve_vector(model, events, joint0.amplitudes, basis, controls)
    norm = np.linalg.norm(vec)
    norm_error = abs(norm - 1.0)
    if norm_error > NORM_FAULT_TOL:
        raise NumericalFault(f"state norm drifted to {norm!r}")
    rho = reduced_from_state(vec / norm, 4)
    d = trace_distance(rho, sys.density())
    d = min(max(d, 0.0), 1.0)
    return RunResult(
        ordering=ordering,
        n=n,
        total_time=events.total_time,
        d_value=d,
        model_seed=model.seed,
        bath_seed=bath_seed,
        state_seed=state_seed,
        pulse_count=events.total_pulses,
        norm_error=norm_error,
    )
