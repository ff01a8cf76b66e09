"""Figure rendering for nested-UDD sweep CSVs."""

from figplots.render import (
    SCHEMA,
    TITLES,
    DataError,
    FigureSpec,
    build_figure,
    load_curves,
    main,
    read_sweep_csv,
    render,
    spec_for,
)

__version__ = "0.1.0"
