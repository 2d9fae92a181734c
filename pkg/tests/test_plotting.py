import re
from pathlib import Path

import numpy as np
import pytest

from dislex.exceptions import ShapeMismatch, TooManyClasses
from dislex.plotting import MAX_CLASSES, emit_scatter, palette, render_scatter

GOLDEN = Path(__file__).parent / "data" / "scatter20.svg"


def golden_input():
    t = np.arange(20)
    coords = np.column_stack([np.cos(t * 0.7) * (1 + t / 10), np.sin(t * 0.7) * (1 + t / 10)])
    labels = ["sg" if i % 3 else "pl" for i in t]
    return coords, labels


def test_four_points_two_labels():
    svg = render_scatter([[0, 0], [1, 1], [2, 0], [3, 1]], ["a", "b", "a", "b"])
    assert svg.count("<circle") == 4
    legend = svg.split('<g id="legend">')[1]
    assert legend.count("<text") == 2
    assert re.findall(r">(\w)</text>", legend) == ["a", "b"]


def test_empty_input_is_valid_svg():
    svg = render_scatter(np.zeros((0, 2)), [])
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    assert "<circle" not in svg


def test_colour_follows_label():
    svg = render_scatter([[0, 0], [1, 1], [2, 2]], ["x", "y", "x"])
    fills = re.findall(r'<circle[^>]*fill="(#[0-9a-f]{6})"', svg)
    assert fills[0] == fills[2] != fills[1]


def test_too_many_classes():
    n = MAX_CLASSES + 1
    with pytest.raises(TooManyClasses):
        render_scatter(np.zeros((n, 2)), list(range(n)))


def test_length_mismatch():
    with pytest.raises(ShapeMismatch):
        render_scatter([[0, 0]], ["a", "b"])


def test_palette_distinct():
    colors = palette(MAX_CLASSES)
    assert len(set(colors)) == MAX_CLASSES


def test_golden_20_points(tmp_path):
    coords, labels = golden_input()
    text = emit_scatter(coords, labels, tmp_path / "out.svg", title="golden")
    assert (tmp_path / "out.svg").read_text(encoding="utf-8") == text
    assert text == GOLDEN.read_text(encoding="utf-8")


def test_points_fill_the_plot_area():
    coords, labels = golden_input()
    svg = render_scatter(coords, labels)
    cx = [float(v) for v in re.findall(r'cx="([\d.]+)"', svg)]
    cy = [float(v) for v in re.findall(r'cy="([\d.]+)"', svg)]
    assert min(cx) == pytest.approx(20.0) and max(cx) <= 460.0
    assert max(cy) == pytest.approx(460.0) and min(cy) >= 20.0
    # the wider of the two spans fills its axis exactly
    assert max(cx) == pytest.approx(460.0) or min(cy) == pytest.approx(20.0)
