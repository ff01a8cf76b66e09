"""Pulse timing rules, nested layer construction, and schedule flattening.

Layers are listed outermost first. Each layer places its pulses inside every
interval between consecutive pulse times of the layers enclosing it (with 0
and T acting as outer boundaries), so the number of drift intervals multiplies
layer by layer. A layer with odd N additionally fires one pulse at the end of
each interval it governs; that terminal pulse often coincides with an
enclosing layer's pulse, in which case the flattened list carries it as a
zero-duration event, inner layer first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from nested_udd.operators import CONTROL_NAMES, ControlOperator

RULES = ("udd", "periodic")
COINCIDENT_MODES = ("inner_first", "outer_first")


def udd_times(n: int, t_start: float, t_end: float) -> np.ndarray:
    """Pulse instants t_start + span * sin^2(j pi / (2n+2)), j = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    j = np.arange(1, n + 1)
    frac = np.sin(j * np.pi / (2 * n + 2)) ** 2
    return t_start + (t_end - t_start) * frac


def _periodic_times(n: int, t_start: float, t_end: float) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    k = np.arange(1, n + 1)
    return t_start + (t_end - t_start) * k / (n + 1)


def _rule_times(rule: str, n: int, t_start: float, t_end: float) -> np.ndarray:
    if rule == "udd":
        return udd_times(n, t_start, t_end)
    return _periodic_times(n, t_start, t_end)


@dataclass(frozen=True)
class LayerSpec:
    """One control layer: operator name, pulse count N, placement rule."""

    control: str
    n_pulses: int
    rule: str = "udd"

    def __post_init__(self):
        if self.control not in CONTROL_NAMES:
            raise ValueError(f"unknown control operator {self.control!r}")
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")


@dataclass(frozen=True)
class LayeredSchedule:
    """Ordered layers, index 0 outermost, over a total duration."""

    layers: tuple
    total_time: float

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValueError("schedule needs at least one layer")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")


@dataclass(frozen=True)
class Event:
    """Drift for `duration`, then apply `pulse` (None = no pulse).

    `time` is the closed-form instant at which the event ends; durations are
    differences of such instants, never accumulated sums.
    """

    duration: float
    pulse: str | None
    time: float


@dataclass(frozen=True)
class EventList:
    events: tuple
    total_time: float

    @property
    def total_pulses(self) -> int:
        return sum(1 for e in self.events if e.pulse is not None)

    def pulse_counts(self) -> dict:
        out: dict = {}
        for e in self.events:
            if e.pulse is not None:
                out[e.pulse] = out.get(e.pulse, 0) + 1
        return out


def _layer_times(layers, total_time: float):
    """Per-layer rule times; each layer subdivides the accumulated grid."""
    grid = [0.0, float(total_time)]
    per_layer = []
    for spec in layers:
        pts = sorted(grid)
        times = []
        for a, b in zip(pts[:-1], pts[1:]):
            times.extend(_rule_times(spec.rule, spec.n_pulses, a, b))
        per_layer.append(np.array(times))
        grid.extend(times)
    return per_layer


def nested_times(layers, T: float):
    """Rule times for every layer of a nested schedule, outermost first.

    Terminal pulses for odd N are a flattening concern and are not included
    here; they sit on grid points already present.
    """
    layers = tuple(layers)
    if len(layers) < 2:
        raise ValueError("nested_times needs at least two layers")
    if not T > 0:
        raise ValueError("T must be positive")
    return tuple(_layer_times(layers, T))


def flatten(s: LayeredSchedule, coincident: str = "inner_first") -> EventList:
    """Flatten a layered schedule into chronological (drift, pulse) events.

    Coincident pulses become zero-duration follow-up events; `coincident`
    selects which layer fires first at a shared instant. The two choices can
    only differ by a global phase when the operators involved commute or
    anticommute.
    """
    if coincident not in COINCIDENT_MODES:
        raise ValueError(f"coincident must be one of {COINCIDENT_MODES}")
    T = float(s.total_time)
    grid = [0.0, T]
    firing: dict = {}

    def add(t: float, layer_index: int, name: str):
        firing.setdefault(t, []).append((layer_index, name))

    for li, spec in enumerate(s.layers):
        pts = sorted(grid)
        layer_times = []
        for a, b in zip(pts[:-1], pts[1:]):
            for t in _rule_times(spec.rule, spec.n_pulses, a, b):
                add(t, li, spec.control)
                layer_times.append(t)
            if spec.n_pulses % 2 == 1:
                add(b, li, spec.control)
        grid.extend(layer_times)

    inner_first = coincident == "inner_first"
    events = []
    prev = 0.0
    for t in sorted(firing):
        entries = sorted(firing[t], key=lambda e: e[0], reverse=inner_first)
        events.append(Event(t - prev, entries[0][1], t))
        for _, name in entries[1:]:
            events.append(Event(0.0, name, t))
        prev = t
    if prev != T:
        events.append(Event(T - prev, None, T))
    return EventList(events=tuple(events), total_time=T)


def free_evolution(T: float) -> EventList:
    """Single pulse-free drift over T (the no-control baseline)."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0:
        return EventList(events=(), total_time=0.0)
    return EventList(events=(Event(T, None, T),), total_time=T)


def compose_coincident(pulses) -> np.ndarray:
    """Compose pulses firing at one instant, listed inner first.

    Returns the matrix product with the inner operator acting first, i.e.
    rightmost. All operators must be involutory.
    """
    mats = []
    for p in pulses:
        m = p.sys_matrix if isinstance(p, ControlOperator) else np.asarray(p, dtype=complex)
        if np.abs(m @ m - np.eye(m.shape[0])).max() > 1e-12:
            raise ValueError("coincident pulses must be involutory")
        mats.append(m)
    if not mats:
        raise ValueError("no pulses to compose")
    return reduce(lambda acc, m: m @ acc, mats)
