"""CSV ingestion and SVG scatterplot rendering.

CSV in: header ``x,y,label``, UTF-8, comma separated. Labels are remapped
to dense 0..K-1 ids in first-appearance order and coordinates are min-max
normalized on load.

SVG out: one opaque circle per drawn point, radius 3 px by default, drawn in
seeded random order so no class systematically occludes another. Glyphs are
inset by one radius so nothing is clipped at the canvas edge. Pixel
positions are coordinate * (canvas_px - 2 * radius) + radius on both axes;
note SVG's y axis grows downward.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, SampleIndexSet, Seed, normalize_points

__all__ = [
    "BOYNTON_PALETTE",
    "MONOCHROME_GREY",
    "RenderOptions",
    "load_csv",
    "render_svg",
    "save_indices",
    "load_indices",
    "save_csv",
]

# Boynton's eleven almost-never-confused colors, minus white and black which
# would vanish against a light canvas or the grey monochrome mode.
BOYNTON_PALETTE = (
    "#0000ff",  # blue
    "#ff0000",  # red
    "#00ff00",  # green
    "#ffff00",  # yellow
    "#ff00ff",  # magenta
    "#ff8080",  # pink
    "#808080",  # gray
    "#800000",  # brown
    "#ff8000",  # orange
)

MONOCHROME_GREY = "#404040"


@dataclass(frozen=True)
class RenderOptions:
    canvas_px: int = 1000
    point_radius_px: int = 3
    monochrome: bool = False
    palette: tuple = BOYNTON_PALETTE
    draw_order_seed: Seed = 0

    def __post_init__(self):
        if self.canvas_px < 2 * self.point_radius_px:
            raise ValueError("canvas must be at least one point diameter wide")
        if self.point_radius_px < 1:
            raise ValueError("point radius must be at least 1 px")


def load_csv(path) -> LabeledDataset:
    """Load an ``x,y,label`` CSV as a normalized, densely labeled dataset."""
    xs: list[float] = []
    ys: list[float] = []
    label_ids: list[int] = []
    id_of: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        cols = [c.strip().lower() for c in header]
        try:
            ix, iy, il = cols.index("x"), cols.index("y"), cols.index("label")
        except ValueError:
            raise ValueError(f"{path}: header must contain x, y and label columns") from None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(ix, iy, il):
                raise ValueError(f"{path}:{lineno}: expected {len(cols)} columns, got {len(row)}")
            try:
                xs.append(float(row[ix]))
                ys.append(float(row[iy]))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric coordinate") from None
            label = row[il].strip()
            if label not in id_of:
                id_of[label] = len(id_of)
            label_ids.append(id_of[label])
    if not xs:
        raise ValueError(f"{path}: no data rows")
    points = normalize_points(np.asarray(xs), np.asarray(ys))
    return LabeledDataset(points, np.asarray(label_ids, dtype=np.int64))


def save_csv(path, ds: LabeledDataset, indices: SampleIndexSet | None = None):
    """Write a dataset (or a sampled subset of it) back to x,y,label CSV."""
    sel = indices.indices if indices is not None else np.arange(ds.n)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "label"])
        for i in sel:
            writer.writerow([repr(float(ds.points.xs[i])), repr(float(ds.points.ys[i])), int(ds.labels[i])])


def save_indices(path, indices: SampleIndexSet):
    """One selected index per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in indices.indices:
            fh.write(f"{int(i)}\n")


def load_indices(path, n: int | None = None) -> SampleIndexSet:
    with open(path, encoding="utf-8") as fh:
        values = [int(line) for line in fh if line.strip()]
    return SampleIndexSet.from_any_order(values, n=n)


def render_svg(
    ds: LabeledDataset,
    sample: SampleIndexSet | None = None,
    opts: RenderOptions | None = None,
) -> str:
    """Render the dataset (or a sampled subset) as an SVG document string."""
    opts = opts or RenderOptions()
    drawn = sample.indices if sample is not None else np.arange(ds.n)
    if not opts.monochrome and ds.n_classes > len(opts.palette):
        raise ValueError(
            f"{ds.n_classes} classes exceed the {len(opts.palette)}-color palette; "
            "use monochrome mode or supply a larger palette"
        )
    rng = np.random.default_rng(opts.draw_order_seed)
    drawn = drawn[rng.permutation(drawn.size)]

    c, r = opts.canvas_px, opts.point_radius_px
    scale = c - 2 * r
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{c}" height="{c}" viewBox="0 0 {c} {c}">',
        f'<rect width="{c}" height="{c}" fill="#ffffff"/>',
    ]
    for i in drawn:
        px = ds.points.xs[i] * scale + r
        py = ds.points.ys[i] * scale + r
        fill = MONOCHROME_GREY if opts.monochrome else opts.palette[int(ds.labels[i])]
        lines.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="{r}" fill="{fill}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
