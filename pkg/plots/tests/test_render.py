"""Renderer behavior against the golden CSV fixtures."""

from pathlib import Path

import pytest

from vcplots import EmptyInput, FigureSpec, HeaderMismatch, render
from vcplots.render import main

DATA = Path(__file__).parent / "data"
BENCH = str(DATA / "bench_sp_count.csv")
PSWEEP = str(DATA / "psweep.csv")


@pytest.mark.parametrize("kind", ["runtime-log", "count-bar", "objective-lines"])
def test_bench_kinds_render(tmp_path, kind):
    out = tmp_path / f"{kind}.svg"
    info = render(FigureSpec(csv_paths=(BENCH,), kind=kind, out=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert info.series == ("proposed", "ua", "rsa")


def test_series_match_method_count(tmp_path):
    info = render(FigureSpec(csv_paths=(BENCH,), kind="objective-lines",
                             out=str(tmp_path / "o.svg")))
    assert len(info.series) == 3
    # objective column is empty for rsa rows: points drawn only for the rest
    assert info.rows_drawn == 6


def test_psweep_two_series(tmp_path):
    info = render(FigureSpec(csv_paths=(PSWEEP,), kind="p-sweep",
                             out=str(tmp_path / "p.svg")))
    assert info.series == ("p=1", "p=3")
    assert info.rows_drawn == 8


def test_render_deterministic(tmp_path):
    for name in ("first.svg", "second.svg"):
        render(FigureSpec(csv_paths=(BENCH,), kind="runtime-log",
                          out=str(tmp_path / name)))
    assert (tmp_path / "first.svg").read_bytes() == (tmp_path / "second.svg").read_bytes()


def test_png_output(tmp_path):
    out = tmp_path / "fig.png"
    render(FigureSpec(csv_paths=(BENCH,), kind="count-bar", out=str(out)))
    assert out.exists() and out.stat().st_size > 0


def test_header_mismatch(tmp_path):
    with pytest.raises(HeaderMismatch):
        render(FigureSpec(csv_paths=(PSWEEP,), kind="runtime-log",
                          out=str(tmp_path / "x.svg")))


def test_empty_input(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("axis,axis_value,method,templates_count,objective,wall_time_s\n",
                     encoding="utf-8")
    with pytest.raises(EmptyInput):
        render(FigureSpec(csv_paths=(str(empty),), kind="objective-lines",
                          out=str(tmp_path / "x.svg")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(csv_paths=(BENCH,), kind="pie", out=str(tmp_path / "x.svg"))


def test_cli_round_trip(tmp_path):
    out = tmp_path / "cli.svg"
    code = main([BENCH, "--kind", "runtime-log", "--out", str(out),
                 "--title", "runtime vs problem size"])
    assert code == 0
    assert out.exists() and out.stat().st_size > 0


def test_cli_bad_header_exit_code(tmp_path):
    code = main([PSWEEP, "--kind", "count-bar", "--out", str(tmp_path / "x.svg")])
    assert code == 2
