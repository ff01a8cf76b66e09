"""Turn sweep CSV files into the log-scale decoherence figures.

The renderer consumes only the documented sweep schema
(``ordering,N,rule,mean_d,geo_mean_d,std_d,min_d,max_d,runs,pulses_total``)
and recomputes nothing: one curve per ordering, x = N, y = mean_d on a
log axis spanning at least [1e-12, 1], points exactly as they appear in
the file. Malformed or empty input is an error and no image is written.

Command line: ``render_figs <preset> <csv> <out.png>`` with preset one of
fig1, fig2, fig3, fourlayer. Exit codes: 0 on success, 1 on bad data,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

SCHEMA = (
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

TITLES = {
    "fig1": "Three-layer UDD: orderings of X0, X1, Xphi (T = 0.1)",
    "fig2": "Periodic pulse placement, same orderings (T = 0.1)",
    "fig3": "Three-layer UDD: orderings of X01, X1, Xphi (T = 0.1)",
    "fourlayer": "Four-layer Z scheme, full-state protection (T = 0.1)",
}


class DataError(Exception):
    """The CSV cannot be rendered: wrong schema or no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: preset name, input CSVs, and the figure title."""

    preset: str
    csv_paths: tuple
    title: str


def spec_for(preset: str, csv_paths) -> FigureSpec:
    if preset not in TITLES:
        raise ValueError(f"unknown preset {preset!r}")
    return FigureSpec(preset, tuple(str(p) for p in csv_paths), TITLES[preset])


def read_sweep_csv(path: str) -> list:
    """Rows of one sweep CSV as dicts with parsed N and mean_d."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: file is empty") from None
            missing = [c for c in SCHEMA if c not in header]
            if missing:
                raise DataError(f"{path}: missing columns: {', '.join(missing)}")
            idx = {c: header.index(c) for c in SCHEMA}
            rows = []
            for line in reader:
                if not line:
                    continue
                rows.append(
                    {
                        "ordering": line[idx["ordering"]],
                        "N": int(line[idx["N"]]),
                        "mean_d": float(line[idx["mean_d"]]),
                    }
                )
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return rows


def load_curves(spec: FigureSpec) -> dict:
    """Ordering name -> (N list, mean_d list), in file order."""
    rows = []
    for path in spec.csv_paths:
        rows.extend(read_sweep_csv(path))
    if not rows:
        raise DataError("no data rows to plot")
    curves: dict = {}
    for row in rows:
        ns, ds = curves.setdefault(row["ordering"], ([], []))
        ns.append(row["N"])
        ds.append(row["mean_d"])
    return curves


def build_figure(spec: FigureSpec):
    """Create the matplotlib figure; the caller saves or inspects it."""
    import matplotlib.pyplot as plt
    from matplotlib.ticker import MaxNLocator

    curves = load_curves(spec)
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for name, (ns, ds) in curves.items():
        ax.plot(ns, ds, marker="o", markersize=4, label=name)
    ax.set_yscale("log")
    positive = [d for _, (_, ds) in curves.items() for d in ds if d > 0]
    low = min([1e-12] + [0.5 * min(positive)]) if positive else 1e-12
    high = max([2.0] + [2.0 * max(positive)]) if positive else 2.0
    ax.set_ylim(low, high)
    ax.set_xlabel("N (pulses per layer)")
    ax.set_ylabel("mean trace distance")
    ax.set_title(spec.title)
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.grid(True, which="major", alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, ax


def render(spec: FigureSpec, out_path: str) -> str:
    """Validate, draw, and write the image; returns the output path.

    Validation happens before the output file is opened, so a bad CSV
    never leaves a partial image behind.
    """
    import matplotlib

    matplotlib.use("Agg", force=False)
    fig, _ = build_figure(spec)
    try:
        fig.savefig(out_path, dpi=150)
    finally:
        import matplotlib.pyplot as plt

        plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Render a sweep CSV into a log-scale decoherence figure.",
    )
    parser.add_argument("preset", choices=sorted(TITLES))
    parser.add_argument("csv", help="sweep CSV produced by the simulator")
    parser.add_argument("out", help="output image path (png)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        render(spec_for(args.preset, (args.csv,)), args.out)
    except DataError as exc:
        print(f"render_figs: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
