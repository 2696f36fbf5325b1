from __future__ import annotations

import xml.etree.ElementTree as ET

from crimekit.svgplot import (
    NOISE_COLOR,
    PALETTE,
    color_for,
    line_svg,
    scatter_svg,
    write_svg,
)

SVG_NS = "{http://www.w3.org/2000/svg}"


def _circles(svg: str):
    root = ET.fromstring(svg)
    return root.findall(f".//{SVG_NS}circle")


def test_color_for_palette_noise_and_default():
    assert color_for(None) == PALETTE[0]
    assert color_for(-1) == NOISE_COLOR
    assert color_for(0) == PALETTE[0]
    assert color_for(5) == PALETTE[5]
    assert color_for(16) == PALETTE[0]  # wraps around
    assert color_for(19) == PALETTE[3]


def test_scatter_one_circle_per_point():
    points = [(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]
    svg = scatter_svg(points, labels=[0, 1, -1], title="t", x_label="x", y_label="y")
    circles = _circles(svg)
    assert len(circles) == 3
    fills = [c.get("fill") for c in circles]
    assert fills == [PALETTE[0], PALETTE[1], NOISE_COLOR]
    assert 'viewBox="0 0 800 600"' in svg
    assert ">t</text>" in svg


def test_scatter_is_valid_xml_and_deterministic():
    points = [(0.5, 0.5), (0.25, 0.75)]
    a = scatter_svg(points, title="same")
    b = scatter_svg(points, title="same")
    assert a == b
    ET.fromstring(a)


def test_scatter_empty_points():
    svg = scatter_svg([], title="empty")
    assert _circles(svg) == []
    ET.fromstring(svg)


def test_scatter_degenerate_axis_centers_points():
    svg = scatter_svg([(1.0, 5.0), (1.0, 9.0)])
    xs = {c.get("cx") for c in _circles(svg)}
    assert len(xs) == 1  # identical x for every point: drawn mid-plot


def test_scatter_escapes_markup_in_title():
    svg = scatter_svg([(0, 0)], title="a < b & c")
    assert "a &lt; b &amp; c" in svg
    ET.fromstring(svg)


def test_line_sorts_points_and_marks_x():
    svg = line_svg([(8, 1.0), (2, 9.0), (4, 4.0)], mark=4)
    root = ET.fromstring(svg)
    polyline = root.find(f".//{SVG_NS}polyline")
    pairs = [p.split(",") for p in polyline.get("points").split()]
    px = [float(x) for x, _ in pairs]
    assert px == sorted(px)
    # 3 markers plus one highlight ring
    assert len(_circles(svg)) == 4
    rings = [c for c in _circles(svg) if c.get("fill") == "none"]
    assert len(rings) == 1


def test_line_without_mark():
    svg = line_svg([(1, 1.0), (2, 2.0)])
    assert len(_circles(svg)) == 2


def test_write_svg(tmp_path):
    p = tmp_path / "plot.svg"
    write_svg(scatter_svg([(0, 0)]), p)
    text = p.read_text(encoding="utf-8")
    assert text.startswith("<svg ")
    assert text.endswith("</svg>\n")
