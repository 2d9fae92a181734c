"""Deterministic SVG scatterplots of 2-D coordinates (e.g. t-SNE output)."""

import colorsys
from xml.sax.saxutils import escape

import numpy as np

from ._io import atomic_write_text
from .exceptions import ShapeMismatch, TooManyClasses

MAX_CLASSES = 50
WIDTH = 640
HEIGHT = 480
LEGEND_WIDTH = 160
MARGIN = 20
RADIUS = 3.0

# the first ten are the usual categorical ten; the rest are evenly spaced hues
_BASE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def palette(k):
    colors = list(_BASE[:k])
    for i in range(max(0, k - len(_BASE))):
        h = (i * 0.618033988749895) % 1.0
        r, g, b = colorsys.hls_to_rgb(h, 0.45 + 0.15 * (i % 2), 0.65)
        colors.append("#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255)))
    return colors


def _label_order(labels):
    # sort on the string form so mixed label types still order deterministically
    return sorted(set(labels), key=lambda v: (str(type(v).__name__), str(v)))


def render_scatter(coords, labels, title=None):
    """SVG document text for the points ``coords`` coloured by ``labels``."""
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2) if len(coords) else np.zeros((0, 2))
    labels = list(labels)
    if coords.shape[0] != len(labels):
        raise ShapeMismatch(f"{coords.shape[0]} points but {len(labels)} labels")
    if not np.all(np.isfinite(coords)):
        raise ShapeMismatch("coordinates must be finite")
    classes = _label_order(labels)
    if len(classes) > MAX_CLASSES:
        raise TooManyClasses(f"{len(classes)} label values; at most {MAX_CLASSES} can be drawn")
    color = dict(zip(classes, palette(len(classes))))

    plot_w = WIDTH - LEGEND_WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<title>{escape(str(title))}</title>')
    if coords.shape[0]:
        lo = coords.min(axis=0)
        span = coords.max(axis=0) - lo
        span[span == 0] = 1.0
        scale = min(plot_w / span[0], plot_h / span[1])
        out.append('<g id="points">')
        for (x, y), lab in zip(coords, labels):
            px = MARGIN + (x - lo[0]) * scale
            py = HEIGHT - MARGIN - (y - lo[1]) * scale
            out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{RADIUS:g}" fill="{color[lab]}" '
                       f'fill-opacity="0.8"/>')
        out.append('</g>')
    out.append('<g id="legend">')
    x0 = WIDTH - LEGEND_WIDTH
    for i, lab in enumerate(classes):
        y = MARGIN + 16 * i
        out.append(f'<rect x="{x0}" y="{y}" width="10" height="10" fill="{color[lab]}"/>')
        out.append(f'<text x="{x0 + 16}" y="{y + 9}" font-family="sans-serif" font-size="11">'
                   f'{escape(str(lab))}</text>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def emit_scatter(coords, labels, path, title=None):
    """Write :func:`render_scatter` output to ``path`` (atomically) and return the text."""
    text = render_scatter(coords, labels, title)
    atomic_write_text(path, text)
    return text
