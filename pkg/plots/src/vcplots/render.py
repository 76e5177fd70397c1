"""Render scheduler benchmark CSVs into static figures.

Four figure kinds, one per documented CSV layout:

- ``runtime-log``: wall time per method vs problem size, log-10 y axis
- ``count-bar``: template counts per method vs problem size, grouped bars
- ``objective-lines``: objective per method vs problem size
- ``p-sweep``: objective per template, one series per norm order

The renderer reads only the CSV headers documented in docs/csv_formats.md
and never imports the scheduler. Output is deterministic for a given
input: fixed styles, stable series order, and no timestamps in image
metadata.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "vcplots"

BENCH_HEADER = ["axis", "axis_value", "method", "templates_count", "objective", "wall_time_s"]
PSWEEP_HEADER = ["template_id", "p", "objective"]

KINDS = ("runtime-log", "count-bar", "objective-lines", "p-sweep")

_EXPECTED_HEADER = {
    "runtime-log": BENCH_HEADER,
    "count-bar": BENCH_HEADER,
    "objective-lines": BENCH_HEADER,
    "p-sweep": PSWEEP_HEADER,
}

_BENCH_Y = {
    "runtime-log": ("wall_time_s", "wall time (s)"),
    "count-bar": ("templates_count", "templates"),
    "objective-lines": ("objective", "objective"),
}


class HeaderMismatch(Exception):
    """CSV header does not match the documented layout for this kind."""


class EmptyInput(Exception):
    """CSV carries a header but no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple[str, ...]
    kind: str
    out: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; known: {KINDS}")
        if not self.csv_paths:
            raise ValueError("at least one input CSV is required")


@dataclass(frozen=True)
class RenderInfo:
    """What ended up in the figure; tests introspect this."""

    out: Path
    series: tuple[str, ...]
    rows_drawn: int


def _read_rows(spec: FigureSpec) -> list[dict]:
    expected = _EXPECTED_HEADER[spec.kind]
    rows: list[dict] = []
    for path in spec.csv_paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != expected:
                raise HeaderMismatch(
                    f"{path}: kind {spec.kind!r} expects columns {expected}, got {header}"
                )
            for raw in reader:
                rows.append(dict(zip(header, raw)))
    if not rows:
        raise EmptyInput(f"no data rows in {', '.join(spec.csv_paths)}")
    return rows


def _axis_values(rows: list[dict], column: str) -> list:
    seen = []
    for row in rows:
        value = row[column]
        if value not in seen:
            seen.append(value)
    return seen


def _render_bench(spec: FigureSpec, rows: list[dict], ax) -> tuple[tuple[str, ...], int]:
    y_col, y_default = _BENCH_Y[spec.kind]
    methods = _axis_values(rows, "method")
    x_values = _axis_values(rows, "axis_value")
    x_index = {v: i for i, v in enumerate(x_values)}
    drawn = 0
    if spec.kind == "count-bar":
        width = 0.8 / len(methods)
        for m_i, method in enumerate(methods):
            xs, ys = [], []
            for row in rows:
                if row["method"] != method or row[y_col] == "":
                    continue
                xs.append(x_index[row["axis_value"]] + (m_i - (len(methods) - 1) / 2) * width)
                ys.append(float(row[y_col]))
                drawn += 1
            ax.bar(xs, ys, width=width, label=method)
        ax.set_xticks(range(len(x_values)), x_values)
    else:
        for method in methods:
            xs, ys = [], []
            for row in rows:
                if row["method"] != method or row[y_col] == "":
                    continue
                xs.append(x_index[row["axis_value"]])
                ys.append(float(row[y_col]))
                drawn += 1
            ax.plot(xs, ys, marker="o", label=method)
        ax.set_xticks(range(len(x_values)), x_values)
        if spec.kind == "runtime-log":
            ax.set_yscale("log", base=10)
    ax.set_xlabel(spec.xlabel or (rows[0]["axis"] if rows else "size"))
    ax.set_ylabel(spec.ylabel or y_default)
    return tuple(methods), drawn


def _render_psweep(spec: FigureSpec, rows: list[dict], ax) -> tuple[tuple[str, ...], int]:
    p_values = _axis_values(rows, "p")
    drawn = 0
    for p in p_values:
        xs, ys = [], []
        for row in rows:
            if row["p"] != p or row["objective"] == "":
                continue
            xs.append(int(row["template_id"]))
            ys.append(float(row["objective"]))
            drawn += 1
        order = sorted(range(len(xs)), key=lambda i: xs[i])
        ax.plot([xs[i] for i in order], [ys[i] for i in order],
                marker="o", label=f"p={p}")
    ax.set_xlabel(spec.xlabel or "template")
    ax.set_ylabel(spec.ylabel or "objective")
    return tuple(f"p={p}" for p in p_values), drawn


def render(spec: FigureSpec) -> RenderInfo:
    """Produce one image from one spec; returns what was drawn."""
    rows = _read_rows(spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        if spec.kind == "p-sweep":
            series, drawn = _render_psweep(spec, rows, ax)
        else:
            series, drawn = _render_bench(spec, rows, ax)
        ax.legend()
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if out.suffix == ".svg" else None
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return RenderInfo(out=Path(spec.out), series=series, rows_drawn=drawn)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vcplots", description="Render scheduler benchmark CSVs into figures"
    )
    parser.add_argument("csv", nargs="+", help="input CSV file(s) with a documented header")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image (.svg default, .png supported)")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    args = parser.parse_args(argv)
    try:
        info = render(
            FigureSpec(
                csv_paths=tuple(args.csv), kind=args.kind, out=args.out,
                title=args.title, xlabel=args.xlabel, ylabel=args.ylabel,
            )
        )
    except (HeaderMismatch, EmptyInput, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {info.out} ({len(info.series)} series, {info.rows_drawn} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
