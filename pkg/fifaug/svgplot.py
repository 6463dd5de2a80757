"""Static SVG line charts: interpolated curves as polylines, original points as markers."""
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .series import TimeSeries

WIDTH = 800
HEIGHT = 400
MARGIN = 40
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
MARKER_COLOR = "#000000"


@dataclass(frozen=True)
class Curve:
    label: str
    series: TimeSeries


def _fmt(v):
    return f"{v:.2f}"


class _Frame:
    """Maps data coordinates onto the drawable area, y growing upward."""

    def __init__(self, all_series):
        xs = np.concatenate([s.x for s in all_series])
        ys = np.concatenate([s.y for s in all_series])
        self.x0, self.x1 = float(xs.min()), float(xs.max())
        self.y0, self.y1 = float(ys.min()), float(ys.max())
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5

    def px(self, x):
        return MARGIN + (np.asarray(x) - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y):
        return HEIGHT - MARGIN - (np.asarray(y) - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def render_svg(curves: List[Curve], markers: Optional[Curve] = None, title=None):
    """An 800x400 SVG document (as text): one polyline per curve, one circle group for the markers."""
    all_series = [c.series for c in curves] + ([markers.series] if markers else [])
    if not all_series:
        raise ValueError("Nothing to plot")
    frame = _Frame(all_series)

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(WIDTH),
        "height": str(HEIGHT),
        "viewBox": f"0 0 {WIDTH} {HEIGHT}",
    })
    ET.SubElement(svg, "rect", {"width": str(WIDTH), "height": str(HEIGHT), "fill": "#ffffff"})
    axes = ET.SubElement(svg, "g", {"class": "axes", "stroke": "#444444", "stroke-width": "1"})
    ET.SubElement(axes, "line", {"x1": str(MARGIN), "y1": str(HEIGHT - MARGIN),
                                 "x2": str(WIDTH - MARGIN), "y2": str(HEIGHT - MARGIN)})
    ET.SubElement(axes, "line", {"x1": str(MARGIN), "y1": str(MARGIN),
                                 "x2": str(MARGIN), "y2": str(HEIGHT - MARGIN)})
    if title:
        ET.SubElement(svg, "text", {"x": str(WIDTH // 2), "y": str(MARGIN // 2), "text-anchor": "middle",
                                    "font-family": "sans-serif", "font-size": "14"}).text = title

    legend = ET.SubElement(svg, "g", {"class": "legend", "font-family": "sans-serif", "font-size": "12"})
    for k, curve in enumerate(curves):
        color = PALETTE[k % len(PALETTE)]
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(frame.px(curve.series.x), frame.py(curve.series.y)))
        ET.SubElement(svg, "polyline", {"points": points, "fill": "none", "stroke": color,
                                        "stroke-width": "1.5", "data-label": curve.label})
        ET.SubElement(legend, "text", {"x": str(WIDTH - MARGIN - 120), "y": str(MARGIN + 16 * k),
                                       "fill": color}).text = curve.label

    if markers is not None:
        group = ET.SubElement(svg, "g", {"class": "markers", "fill": MARKER_COLOR, "data-label": markers.label})
        for x, y in zip(frame.px(markers.series.x), frame.py(markers.series.y)):
            ET.SubElement(group, "circle", {"cx": _fmt(x), "cy": _fmt(y), "r": "3"})

    return ET.tostring(svg, encoding="unicode")


def write_svg(path, curves: List[Curve], markers: Optional[Curve] = None, title=None):
    with open(path, "w", encoding="utf-8") as f:
        f.write(render_svg(curves, markers, title))
        f.write("\n")
