"""End-to-end acceptance check for the figure renderer.

Criterion 10: each preset figure is produced from a sweep CSV generated by
the nested-udd command line tool, is written as a valid PNG, uses a
logarithmic decoherence axis spanning the full dynamic range, and plots
every CSV row exactly (one line per ordering, y values bit-identical to
the mean_d column).
"""

import csv
import subprocess
import sys

import numpy as np
import pytest

from figplots import build_figure, render, spec_for

PRESETS = ("fig1", "fig2", "fig3")


@pytest.fixture(scope="module")
def preset_csvs(tmp_path_factory):
    base = tmp_path_factory.mktemp("sweeps")
    paths = {}
    for preset in PRESETS:
        out = base / f"{preset}.csv"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "nested_udd.cli",
                "sweep",
                "--preset",
                preset,
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        paths[preset] = str(out)
    return paths


def read_reference(path):
    curves = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            xs, ys = curves.setdefault(row["ordering"], ([], []))
            xs.append(int(row["N"]))
            ys.append(float(row["mean_d"]))
    return curves


@pytest.mark.parametrize("preset", PRESETS)
def test_c10_preset_figures(preset, preset_csvs, tmp_path):
    import matplotlib.pyplot as plt

    csv_path = preset_csvs[preset]
    out_png = tmp_path / f"{preset}.png"
    spec = spec_for(preset, (csv_path,))

    notes = []
    ok = True

    render(spec, str(out_png))
    magic = out_png.read_bytes()[:8]
    png_ok = magic == b"\x89PNG\r\n\x1a\n"
    ok &= png_ok
    notes.append(f"{preset}: wrote {out_png.name}, PNG signature {'ok' if png_ok else 'BAD'}")

    fig, ax = build_figure(spec)
    try:
        reference = read_reference(csv_path)
        n_lines = len(ax.lines)
        lines_ok = n_lines == len(reference) == 6
        ok &= lines_ok
        notes.append(f"{preset}: {n_lines} plotted lines for {len(reference)} orderings")

        scale_ok = ax.get_yscale() == "log"
        lo, hi = ax.get_ylim()
        span_ok = lo <= 1e-12 and hi >= 1.0
        ok &= scale_ok and span_ok
        notes.append(f"{preset}: yscale={ax.get_yscale()}, ylim=[{lo:.3g}, {hi:.3g}]")

        worst = 0.0
        for line in ax.lines:
            label = line.get_label()
            data_ok = label in reference
            ok &= data_ok
            if not data_ok:
                notes.append(f"{preset}: unexpected line label {label!r}")
                continue
            xs, ys = reference[label]
            exact = np.array_equal(line.get_xdata(), xs) and np.array_equal(
                line.get_ydata(), ys
            )
            ok &= exact
            if not exact:
                gap = float(np.max(np.abs(np.asarray(line.get_ydata()) - np.asarray(ys))))
                worst = max(worst, gap)
        notes.append(
            f"{preset}: line data exactly matches CSV rows"
            if worst == 0.0
            else f"{preset}: worst line/CSV gap {worst:.3e}"
        )
    finally:
        plt.close(fig)

    for note in notes:
        print(f"  C10: {note}")
    print(f"ACCEPTANCE C10 {'PASS' if ok else 'FAIL'} ({preset})")
    assert ok
