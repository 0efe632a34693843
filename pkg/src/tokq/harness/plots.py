"""Minimal static SVG figures (boxplots, line plots, error bars)."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import InvalidArgumentError

W, H = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=70)
PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


class _Canvas:
    def __init__(self, title: str, xlabel: str = "", ylabel: str = ""):
        self.svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H),
                              viewBox=f"0 0 {W} {H}")
        ET.SubElement(self.svg, "rect", x="0", y="0", width=str(W), height=str(H), fill="white")
        t = ET.SubElement(self.svg, "text", x=str(W / 2), y="22", attrib={"text-anchor": "middle",
                                                                          "font-size": "15"})
        t.text = title
        if xlabel:
            e = ET.SubElement(self.svg, "text", x=str(W / 2), y=str(H - 12),
                              attrib={"text-anchor": "middle", "font-size": "12"})
            e.text = xlabel
        if ylabel:
            e = ET.SubElement(self.svg, "text", x="16", y=str(H / 2),
                              attrib={"text-anchor": "middle", "font-size": "12",
                                      "transform": f"rotate(-90 16 {H / 2})"})
            e.text = ylabel
        self.x0, self.x1 = MARGIN["left"], W - MARGIN["right"]
        self.y0, self.y1 = H - MARGIN["bottom"], MARGIN["top"]

    def set_y(self, lo: float, hi: float):
        if not hi > lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.ylo, self.yhi = lo - pad, hi + pad
        ax = ET.SubElement(self.svg, "g", attrib={"class": "y-axis"})
        ET.SubElement(ax, "line", x1=str(self.x0), y1=str(self.y0), x2=str(self.x0), y2=str(self.y1),
                      stroke="black")
        for v in np.linspace(self.ylo, self.yhi, 6):
            y = self.sy(v)
            ET.SubElement(ax, "line", x1=str(self.x0 - 4), y1=_fmt(y), x2=str(self.x0), y2=_fmt(y),
                          stroke="black")
            lab = ET.SubElement(ax, "text", x=str(self.x0 - 6), y=_fmt(y + 4),
                                attrib={"text-anchor": "end", "font-size": "10"})
            lab.text = f"{v:.4g}"

    def sy(self, v: float) -> float:
        return self.y0 - (v - self.ylo) / (self.yhi - self.ylo) * (self.y0 - self.y1)

    def write(self, out: str | Path) -> Path:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        ET.ElementTree(self.svg).write(out, encoding="utf-8", xml_declaration=True)
        return out


def box_stats(values: Sequence[float]) -> dict:
    """Quartiles (linear interpolation), 1.5*IQR whiskers and outliers."""
    x = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = (float(v) for v in np.quantile(x, [0.25, 0.5, 0.75], method="linear"))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    return dict(q1=q1, median=med, q3=q3, whisker_low=float(inside.min()), whisker_high=float(inside.max()),
                outliers=[float(v) for v in x if v < lo_fence or v > hi_fence])


def emit_boxplot(groups: Mapping[str, Sequence[float]] | Sequence[tuple[str, Sequence[float]]],
                 out: str | Path, title: str = "", ylabel: str = "") -> Path:
    """One box per named group, left to right in the given order."""
    items = list(groups.items()) if isinstance(groups, Mapping) else list(groups)
    if not items:
        raise InvalidArgumentError("no groups to plot")
    for name, vals in items:
        if len(vals) == 0:
            raise InvalidArgumentError(f"group {name!r} is empty")
    stats = [(name, box_stats(vals)) for name, vals in items]
    allv = np.concatenate([np.asarray(v, dtype=float) for _, v in items])
    c = _Canvas(title, "", ylabel)
    c.set_y(float(allv.min()), float(allv.max()))
    slot = (c.x1 - c.x0) / len(stats)
    bw = min(50.0, slot * 0.5)
    for k, (name, s) in enumerate(stats):
        cx = c.x0 + slot * (k + 0.5)
        g = ET.SubElement(c.svg, "g", attrib={"class": "box", "data-label": name, "data-index": str(k),
                                              **{f"data-{key.replace('_', '-')}": repr(v)
                                                 for key, v in s.items() if key != "outliers"}})
        color = PALETTE[k % len(PALETTE)]
        ET.SubElement(g, "line", x1=_fmt(cx), x2=_fmt(cx), y1=_fmt(c.sy(s["whisker_low"])),
                      y2=_fmt(c.sy(s["q1"])), stroke="black")
        ET.SubElement(g, "line", x1=_fmt(cx), x2=_fmt(cx), y1=_fmt(c.sy(s["q3"])),
                      y2=_fmt(c.sy(s["whisker_high"])), stroke="black")
        for wv in (s["whisker_low"], s["whisker_high"]):
            ET.SubElement(g, "line", x1=_fmt(cx - bw / 4), x2=_fmt(cx + bw / 4), y1=_fmt(c.sy(wv)),
                          y2=_fmt(c.sy(wv)), stroke="black")
        top, bot = c.sy(s["q3"]), c.sy(s["q1"])
        ET.SubElement(g, "rect", x=_fmt(cx - bw / 2), y=_fmt(top), width=_fmt(bw),
                      height=_fmt(max(bot - top, 0.5)), fill=color, attrib={"fill-opacity": "0.5"},
                      stroke="black")
        ET.SubElement(g, "line", x1=_fmt(cx - bw / 2), x2=_fmt(cx + bw / 2), y1=_fmt(c.sy(s["median"])),
                      y2=_fmt(c.sy(s["median"])), stroke="black", attrib={"stroke-width": "2"})
        for o in s["outliers"]:
            ET.SubElement(g, "circle", cx=_fmt(cx), cy=_fmt(c.sy(o)), r="3", fill="none", stroke="black",
                          attrib={"class": "outlier"})
        lab = ET.SubElement(g, "text", x=_fmt(cx), y=str(c.y0 + 16),
                            attrib={"text-anchor": "middle", "font-size": "10"})
        lab.text = name
    return c.write(out)


def emit_lines(series: Mapping[str, tuple[Sequence[float], Sequence[float]]], out: str | Path,
               title: str = "", xlabel: str = "", ylabel: str = "",
               bands: Mapping[str, tuple[Sequence[float], Sequence[float]]] | None = None) -> Path:
    """Line plot of ``{name: (x, y)}`` with optional shaded ``{name: (lo, hi)}`` bands."""
    if not series:
        raise InvalidArgumentError("no series to plot")
    xs = np.concatenate([np.asarray(x, float) for x, _ in series.values()])
    ys = [np.asarray(y, float) for _, y in series.values()]
    if bands:
        ys += [np.asarray(b, float) for pair in bands.values() for b in pair]
    ally = np.concatenate(ys)
    ally = ally[np.isfinite(ally)]
    c = _Canvas(title, xlabel, ylabel)
    c.set_y(float(ally.min()), float(ally.max()))
    xlo, xhi = float(xs.min()), float(xs.max())
    if not xhi > xlo:
        xhi = xlo + 1.0

    def sx(v):
        return c.x0 + (v - xlo) / (xhi - xlo) * (c.x1 - c.x0)

    for v in np.linspace(xlo, xhi, 6):
        lab = ET.SubElement(c.svg, "text", x=_fmt(sx(v)), y=str(c.y0 + 16),
                            attrib={"text-anchor": "middle", "font-size": "10"})
        lab.text = f"{v:.3g}"
    ET.SubElement(c.svg, "line", x1=str(c.x0), y1=str(c.y0), x2=str(c.x1), y2=str(c.y0), stroke="black")
    for k, (name, (x, y)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        if bands and name in bands:
            lo, hi = bands[name]
            pts = [(sx(a), c.sy(b)) for a, b in zip(x, hi)] + [(sx(a), c.sy(b)) for a, b in zip(x[::-1], lo[::-1])]
            ET.SubElement(c.svg, "polygon", points=" ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts),
                          fill=color, attrib={"fill-opacity": "0.2", "class": "band", "data-label": name})
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(c.sy(b))}" for a, b in zip(x, y) if math.isfinite(b))
        ET.SubElement(c.svg, "polyline", points=pts, fill="none", stroke=color,
                      attrib={"stroke-width": "1.5", "class": "series", "data-label": name})
        leg = ET.SubElement(c.svg, "text", x=str(c.x1 - 150), y=str(c.y1 + 14 * (k + 1)),
                            fill=color, attrib={"font-size": "11"})
        leg.text = name
    return c.write(out)


def emit_errorbars(groups: Sequence[tuple[str, float, float]], out: str | Path, title: str = "",
                   ylabel: str = "") -> Path:
    """Points with symmetric error bars, ``(name, value, err)`` in order."""
    if not groups:
        raise InvalidArgumentError("no groups to plot")
    lo = min(v - e for _, v, e in groups)
    hi = max(v + e for _, v, e in groups)
    c = _Canvas(title, "", ylabel)
    c.set_y(lo, hi)
    slot = (c.x1 - c.x0) / len(groups)
    for k, (name, v, e) in enumerate(groups):
        cx = c.x0 + slot * (k + 0.5)
        g = ET.SubElement(c.svg, "g", attrib={"class": "point", "data-label": name, "data-value": repr(v),
                                              "data-err": repr(e)})
        ET.SubElement(g, "line", x1=_fmt(cx), x2=_fmt(cx), y1=_fmt(c.sy(v - e)), y2=_fmt(c.sy(v + e)),
                      stroke="black")
        ET.SubElement(g, "circle", cx=_fmt(cx), cy=_fmt(c.sy(v)), r="4", fill=PALETTE[k % len(PALETTE)])
        lab = ET.SubElement(g, "text", x=_fmt(cx), y=str(c.y0 + 16),
                            attrib={"text-anchor": "middle", "font-size": "10"})
        lab.text = name
    return c.write(out)
