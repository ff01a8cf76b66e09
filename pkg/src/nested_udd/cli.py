"""Command-line front end: timings, algebra reports, runs, sweeps, fits.

Every figure-scale experiment is reachable through one invocation, e.g.
``nested-udd sweep --preset fig1 --out fig1.csv``. Options may also be
supplied through a JSON config file whose keys mirror the long flag names;
explicit flags win over config values, and unknown config keys are a usage
error (exit code 2). Numerical faults exit with code 1, success with 0.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from nested_udd.algebra import predict_chain
from nested_udd.evolve import run_once
from nested_udd.experiment import (
    DEFAULT_MASTER_SEED,
    SweepConfig,
    fit_order,
    format_float,
    four_layer_sweep,
    preset_config,
    sweep,
    write_csv,
)
from nested_udd.linalg import NumericalFault
from nested_udd.model import (
    MODEL_TAG,
    BATH_TAG,
    STATE_TAG,
    build_model,
    derive_seed,
    random_protected_state,
)
from nested_udd.operators import get_convention
from nested_udd.schedule import LayerSpec, LayeredSchedule, flatten

CONFIG_KEYS = frozenset(
    {
        "layers",
        "ordering",
        "n",
        "T",
        "rule",
        "models",
        "states",
        "seed",
        "basis",
        "preset",
        "out",
        "jobs",
    }
)


class UsageError(Exception):
    """Bad invocation: malformed values, unknown config keys, and the like."""


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must contain a JSON object")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def _option(args, config: dict, key: str, default=None):
    """Flag value if given, else config value, else the default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _names(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(str(x) for x in text)
    parts = [p.strip() for p in str(text).split(",")]
    if any(not p for p in parts):
        raise UsageError(f"malformed name list: {text!r}")
    return tuple(parts)


def _ints(text) -> tuple:
    """Parse '3', '1,2,5' or '1..10' into a tuple of ints."""
    if isinstance(text, int):
        return (text,)
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"malformed integer list: {text!r}") from exc


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_text(path, text: str) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _cmd_timing(args, config: dict) -> int:
    layers_opt = _option(args, config, "layers")
    if layers_opt is None:
        raise UsageError("timing requires --layers")
    names = _names(layers_opt)
    ns = _ints(_option(args, config, "n", 1))
    if len(ns) == 1:
        ns = ns * len(names)
    if len(ns) != len(names):
        raise UsageError("--n must give one value, or one per layer")
    rule = _option(args, config, "rule", "udd")
    total_time = float(_option(args, config, "T", 1.0))
    schedule = LayeredSchedule(
        tuple(LayerSpec(c, n, rule) for c, n in zip(names, ns)), total_time
    )
    events = flatten(schedule)
    lines = ["event_index,time,duration,pulse_name"]
    for i, ev in enumerate(events.events):
        name = ev.pulse if ev.pulse is not None else ""
        lines.append(
            f"{i},{format_float(ev.time)},{format_float(ev.duration)},{name}"
        )
    _write_text(_option(args, config, "out"), "\n".join(lines) + "\n")
    return 0


def _cmd_algebra(args, config: dict) -> int:
    ordering_opt = _option(args, config, "ordering")
    if ordering_opt is None:
        raise UsageError("algebra requires --ordering")
    ordering = _names(ordering_opt)
    convention = get_convention(_option(args, config, "basis", "default"))
    chain = predict_chain(ordering, basis=convention)
    _write_text(_option(args, config, "out"), chain.report() + "\n")
    return 0


def _cmd_run(args, config: dict) -> int:
    ordering_opt = _option(args, config, "ordering")
    if ordering_opt is None:
        raise UsageError("run requires --ordering")
    ordering = _names(ordering_opt)
    ns = _ints(_option(args, config, "n", 1))
    if len(ns) == 1:
        ns = ns * len(ordering)
    if len(ns) != len(ordering):
        raise UsageError("--n must give one value, or one per layer")
    rule = _option(args, config, "rule", "udd")
    total_time = float(_option(args, config, "T", 0.1))
    master = int(_option(args, config, "seed", DEFAULT_MASTER_SEED))
    convention = get_convention(_option(args, config, "basis", "default"))
    schedule = LayeredSchedule(
        tuple(LayerSpec(c, n, rule) for c, n in zip(ordering, ns)), total_time
    )
    model = build_model(5, derive_seed(master, MODEL_TAG, 0))
    bath_seed = derive_seed(master, BATH_TAG, 0)
    state_seed = derive_seed(master, STATE_TAG, 0)
    state = random_protected_state(state_seed, basis=convention)
    result = run_once(
        model,
        schedule,
        state,
        bath_seed,
        basis=convention,
        state_seed=state_seed,
    )
    lines = [
        "ordering,n,total_time,d,pulse_count,model_seed,bath_seed,state_seed,norm_error",
        ",".join(
            [
                "-".join(result.ordering),
                str(result.n),
                format_float(result.total_time),
                format_float(result.d_value),
                str(result.pulse_count),
                str(result.model_seed),
                str(result.bath_seed),
                str(result.state_seed),
                format_float(result.norm_error),
            ]
        ),
    ]
    _write_text(_option(args, config, "out"), "\n".join(lines) + "\n")
    return 0


def _sweep_config(args, config: dict) -> SweepConfig:
    preset = _option(args, config, "preset")
    if preset is not None:
        base = preset_config(str(preset))
    else:
        ordering_opt = _option(args, config, "ordering")
        if ordering_opt is None:
            raise UsageError("sweep requires --preset or --ordering")
        if isinstance(ordering_opt, (list, tuple)):
            orderings = tuple(_names(o) for o in ordering_opt)
        else:
            orderings = (_names(ordering_opt),)
        base = SweepConfig(orderings=orderings)
    updates = {}
    n_opt = _option(args, config, "n")
    if n_opt is not None:
        updates["n_values"] = _ints(n_opt)
    t_opt = _option(args, config, "T")
    if t_opt is not None:
        updates["total_time"] = float(t_opt)
    rule_opt = _option(args, config, "rule")
    if rule_opt is not None:
        updates["rule"] = str(rule_opt)
    models_opt = _option(args, config, "models")
    if models_opt is not None:
        updates["n_models"] = int(models_opt)
    states_opt = _option(args, config, "states")
    if states_opt is not None:
        updates["n_states"] = int(states_opt)
    seed_opt = _option(args, config, "seed")
    if seed_opt is not None:
        updates["master_seed"] = int(seed_opt)
    basis_opt = _option(args, config, "basis")
    if basis_opt is not None:
        updates["basis"] = str(basis_opt)
    jobs = _option(args, config, "jobs")
    updates["jobs"] = int(jobs) if jobs is not None else (os.cpu_count() or 1)
    return dataclasses.replace(base, **updates)


def _cmd_sweep(args, config: dict) -> int:
    cfg = _sweep_config(args, config)
    if cfg.state_space == "full":
        result = four_layer_sweep(cfg)
    else:
        result = sweep(cfg)
    out = _option(args, config, "out")
    fh, close = _open_out(out)
    try:
        write_csv(result, fh)
    finally:
        if close:
            fh.close()
    return 0


def _cmd_fit(args, config: dict) -> int:
    ordering_opt = _option(args, config, "ordering")
    if ordering_opt is None:
        raise UsageError("fit requires --ordering")
    ordering = _names(ordering_opt)
    ns = _ints(_option(args, config, "n", 1))
    if len(ns) != 1:
        raise UsageError("fit takes a single --n value")
    models_opt = _option(args, config, "models")
    seed = int(_option(args, config, "seed", DEFAULT_MASTER_SEED))
    rule = _option(args, config, "rule", "udd")
    basis_name = _option(args, config, "basis", "default")
    t_values = np.geomspace(0.01, 0.1, 8)
    result = fit_order(
        ordering,
        ns[0],
        t_values,
        n_models=int(models_opt) if models_opt is not None else 5,
        master_seed=seed,
        rule=str(rule),
        basis=str(basis_name),
    )
    lines = [
        "ordering,n,slope,intercept,below_noise_floor",
        ",".join(
            [
                "-".join(ordering),
                str(ns[0]),
                format_float(result.slope),
                format_float(result.intercept),
                str(result.below_noise_floor).lower(),
            ]
        ),
    ]
    _write_text(_option(args, config, "out"), "\n".join(lines) + "\n")
    return 0


_HANDLERS = {
    "timing": _cmd_timing,
    "algebra": _cmd_algebra,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nested-udd",
        description="Nested UDD pulse schedules, exact spin-bath dynamics, "
        "and operator-algebra ordering analysis.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="output path ('-' or omitted: stdout)")

    p_timing = sub.add_parser(
        "timing", help="flatten a layered schedule into a timing table"
    )
    p_timing.add_argument(
        "--layers", help="comma-separated control names, outermost first"
    )
    p_timing.add_argument("--n", help="pulses per layer: one int or a list")
    p_timing.add_argument("--T", help="total duration (default 1)")
    p_timing.add_argument("--rule", choices=("udd", "periodic"))
    add_common(p_timing)

    p_algebra = sub.add_parser(
        "algebra", help="predict how an ordering reduces the operator algebra"
    )
    p_algebra.add_argument(
        "--ordering", help="comma-separated control names, outermost first"
    )
    p_algebra.add_argument("--basis", choices=("default", "local"))
    add_common(p_algebra)

    p_run = sub.add_parser(
        "run", help="run one schedule on one seeded model and report d"
    )
    p_run.add_argument("--ordering", help="control names, outermost first")
    p_run.add_argument("--n", help="pulses per layer: one int or a list")
    p_run.add_argument("--T", help="total duration (default 0.1)")
    p_run.add_argument("--rule", choices=("udd", "periodic"))
    p_run.add_argument("--seed", help="master seed")
    p_run.add_argument("--basis", choices=("default", "local"))
    add_common(p_run)

    p_sweep = sub.add_parser(
        "sweep", help="grid of orderings and pulse numbers, CSV output"
    )
    p_sweep.add_argument(
        "--preset",
        choices=("fig1", "fig2", "fig3", "fourlayer"),
        help="frozen configuration reproducing one published figure",
    )
    p_sweep.add_argument(
        "--ordering",
        action="append",
        help="control names, outermost first; repeat for several orderings",
    )
    p_sweep.add_argument("--n", help="pulse numbers, e.g. '1..10' or '2,4,6'")
    p_sweep.add_argument("--T", help="total duration")
    p_sweep.add_argument("--rule", choices=("udd", "periodic"))
    p_sweep.add_argument("--models", help="number of model realizations")
    p_sweep.add_argument("--states", help="number of initial states")
    p_sweep.add_argument("--seed", help="master seed")
    p_sweep.add_argument("--basis", choices=("default", "local"))
    p_sweep.add_argument("--jobs", help="worker processes (default: all cores)")
    add_common(p_sweep)

    p_fit = sub.add_parser(
        "fit", help="fit the suppression order from a log-log scan over T"
    )
    p_fit.add_argument("--ordering", help="control names, outermost first")
    p_fit.add_argument("--n", help="pulses per layer")
    p_fit.add_argument("--models", help="number of model realizations")
    p_fit.add_argument("--seed", help="master seed")
    p_fit.add_argument("--rule", choices=("udd", "periodic"))
    p_fit.add_argument("--basis", choices=("default", "local"))
    add_common(p_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args.config) if args.config else {}
        return _HANDLERS[args.subcommand](args, config)
    except UsageError as exc:
        print(f"nested-udd: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"nested-udd: {exc}", file=sys.stderr)
        return 2
    except NumericalFault as exc:
        print(f"nested-udd: numerical fault: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
