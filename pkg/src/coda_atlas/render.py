"""Deterministic SVG rendering of a fitted rank-2 biplot.

Entities are drawn as sector-colored points, parts as rays from the origin,
and requested ratios as link lines through the two ray extremes with one
perpendicular-foot tick mark per entity. The viewport transform uses a
single uniform scale factor for both axes: orthogonal projection onto a
link is the core visual operation, and unequal axis scaling would bend
those right angles.

Output is a pure function of (model, table, options): coordinates are
written with 6 decimal places and element order is fixed, so identical
inputs produce byte-identical documents.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .biplot import BiplotModel, make_link
from .composition import IndicatorTable, RatioDefinition
from .errors import (
    DegenerateBox,
    DegenerateLink,
    InvalidOptions,
    MismatchedEntities,
    NonFiniteValue,
    UnknownRatio,
    UnknownSector,
    UnsupportedRank,
)
from .ingest import default_ratio_catalog

#: fixed 10-color cycle for sectors without an explicit palette entry
COLOR_CYCLE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

#: sector colors mirroring the red-meat / blue-fish convention
DEFAULT_SECTOR_COLORS = {"101X": "#d62728", "102X": "#1f77b4"}

_HEX_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")

_POINT_RADIUS = 3.0
_TICK_HALF_LENGTH = 3.0


@dataclass(frozen=True)
class RenderOptions:
    """Figure geometry, palette and link selection.

    sector_palette=None assigns the built-in defaults plus a fixed color
    cycle for other sectors; an explicit mapping must cover every sector in
    the table. show_links names ratios from ratio_catalog. margin_fraction
    is the blank border on each side as a fraction of width/height.
    """

    width: int = 800
    height: int = 600
    sector_palette: Mapping[str, str] | None = None
    show_links: tuple[str, ...] = ()
    label_points: bool = True
    margin_fraction: float = 0.05
    ratio_catalog: tuple[RatioDefinition, ...] = field(
        default_factory=default_ratio_catalog
    )

    def __post_init__(self):
        if self.width < 100 or self.height < 100:
            raise InvalidOptions(
                f"viewport must be at least 100x100, got {self.width}x{self.height}"
            )
        if not 0.0 <= self.margin_fraction < 0.5:
            raise InvalidOptions(
                f"margin_fraction must be in [0, 0.5), got {self.margin_fraction}"
            )
        if self.sector_palette is not None:
            for sector, color in self.sector_palette.items():
                if not _HEX_COLOR.match(color):
                    raise InvalidOptions(
                        f"sector {sector!r}: {color!r} is not a #rrggbb color"
                    )


@dataclass(frozen=True)
class AffineTransform:
    """Uniform scale followed by translation; the same scale on both axes."""

    scale: float
    tx: float
    ty: float

    def apply(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        return xy * self.scale + np.array([self.tx, self.ty])


def scale_to_viewport(points, rays, options: RenderOptions) -> AffineTransform:
    """Fit the joint bounding box of points and rays into the margined viewport.

    Rays emanate from the origin, so the origin joins the box whenever rays
    are present. The scale factor is the same for x and y (angles are
    preserved); the box center lands on the viewport center.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    rays = np.asarray(rays, dtype=float).reshape(-1, 2)
    parts = [points, rays]
    if rays.shape[0]:
        parts.append(np.zeros((1, 2)))
    stacked = [p for p in parts if p.shape[0]]
    if not stacked:
        raise DegenerateBox("nothing to fit into the viewport")
    data = np.vstack(stacked)
    finite = np.isfinite(data)
    if not finite.all():
        r, c = np.argwhere(~finite)[0]
        raise NonFiniteValue(row=int(r), col=int(c), value=float(data[r, c]))

    xmin, ymin = data.min(axis=0)
    xmax, ymax = data.max(axis=0)
    spread_x, spread_y = xmax - xmin, ymax - ymin
    if spread_x == 0.0 and spread_y == 0.0:
        raise DegenerateBox("all coordinates coincide")

    avail_w = options.width * (1.0 - 2.0 * options.margin_fraction)
    avail_h = options.height * (1.0 - 2.0 * options.margin_fraction)
    candidates = []
    if spread_x > 0.0:
        candidates.append(avail_w / spread_x)
    if spread_y > 0.0:
        candidates.append(avail_h / spread_y)
    scale = min(candidates)
    tx = options.width / 2.0 - scale * (xmin + xmax) / 2.0
    ty = options.height / 2.0 - scale * (ymin + ymax) / 2.0
    return AffineTransform(scale=scale, tx=tx, ty=ty)


def sector_colors(
    sectors: Sequence[str], palette: Mapping[str, str] | None
) -> dict[str, str]:
    """Resolve one color per distinct sector code.

    With palette=None, known defaults apply and remaining sectors take
    colors from the fixed cycle in sorted-code order. An explicit palette
    must cover every sector (UnknownSector otherwise).
    """
    distinct = sorted(set(sectors))
    if palette is not None:
        missing = [s for s in distinct if s not in palette]
        if missing:
            raise UnknownSector(f"no palette entry for sector {missing[0]!r}")
        return {s: palette[s] for s in distinct}
    out = {}
    cycle_position = 0
    for sector in distinct:
        if sector in DEFAULT_SECTOR_COLORS:
            out[sector] = DEFAULT_SECTOR_COLORS[sector]
        else:
            out[sector] = COLOR_CYCLE[cycle_position % len(COLOR_CYCLE)]
            cycle_position += 1
    return out


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def render_biplot(
    model: BiplotModel,
    table: IndicatorTable,
    options: RenderOptions | None = None,
) -> str:
    """Render a rank-2 biplot as an SVG 1.1 document string.

    Model coordinates are mapped with the y axis flipped (SVG y grows
    downward) through a single uniform-scale transform. Points carry
    class "point", rays "ray", link lines "link" and projection feet
    "tick".
    """
    if options is None:
        options = RenderOptions()
    if model.k != 2:
        raise UnsupportedRank(f"rendering needs a rank-2 model, got k={model.k}")
    if model.entity_ids != table.entity_ids:
        raise MismatchedEntities("model and table disagree on entities")
    if model.part_names != table.part_names:
        raise MismatchedEntities("model and table disagree on parts")

    colors = sector_colors([e.sector_code for e in table.entities], options.sector_palette)

    flip = np.array([1.0, -1.0])
    data_points = model.points * flip
    data_rays = model.rays * flip
    transform = scale_to_viewport(data_points, data_rays, options)
    screen_points = transform.apply(data_points)
    screen_rays = transform.apply(data_rays)
    origin = transform.apply(np.zeros(2))

    catalog = {r.name: r for r in options.ratio_catalog}
    links = []
    for name in options.show_links:
        if name not in catalog:
            raise UnknownRatio(name)
        definition = catalog[name]
        i, j = definition.resolve(table)
        link = make_link(model, i, j, label=name)
        if link.degenerate:
            raise DegenerateLink(f"ratio {name!r}: ray extremes coincide")
        links.append((name, i, j))

    lines: list[str] = []
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{options.width}" height="{options.height}" '
        f'viewBox="0 0 {options.width} {options.height}">'
    )
    lines.append("<title>CLR biplot</title>")
    lines.append(
        f'<rect class="background" x="0" y="0" width="{options.width}" '
        f'height="{options.height}" fill="#ffffff"/>'
    )

    pc1 = f"PC1 ({model.explained[0] * 100.0:.1f}%)"
    pc2 = f"PC2 ({model.explained[1] * 100.0:.1f}%)"
    lines.append('<g class="axes" stroke="#cccccc" stroke-width="1">')
    lines.append(
        f'<line class="axis" x1="{_fmt(0.0)}" y1="{_fmt(origin[1])}" '
        f'x2="{_fmt(float(options.width))}" y2="{_fmt(origin[1])}"/>'
    )
    lines.append(
        f'<line class="axis" x1="{_fmt(origin[0])}" y1="{_fmt(0.0)}" '
        f'x2="{_fmt(origin[0])}" y2="{_fmt(float(options.height))}"/>'
    )
    lines.append("</g>")
    lines.append(
        f'<text class="axis-label" x="{_fmt(options.width - 6.0)}" '
        f'y="{_fmt(origin[1] - 6.0)}" text-anchor="end" font-size="12" '
        f'fill="#555555">{escape(pc1)}</text>'
    )
    lines.append(
        f'<text class="axis-label" x="{_fmt(origin[0] + 6.0)}" y="{_fmt(12.0)}" '
        f'text-anchor="start" font-size="12" fill="#555555">{escape(pc2)}</text>'
    )

    lines.append('<g class="rays" stroke="#444444" stroke-width="1.5">')
    for d, name in enumerate(model.part_names):
        tip = screen_rays[d]
        lines.append(
            f'<line class="ray" x1="{_fmt(origin[0])}" y1="{_fmt(origin[1])}" '
            f'x2="{_fmt(tip[0])}" y2="{_fmt(tip[1])}"/>'
        )
    lines.append("</g>")
    for d, name in enumerate(model.part_names):
        tip = screen_rays[d]
        lines.append(
            f'<text class="ray-label" x="{_fmt(tip[0] + 4.0)}" '
            f'y="{_fmt(tip[1] - 4.0)}" font-size="11" '
            f'fill="#444444">{escape(name)}</text>'
        )

    for name, i, j in links:
        a, b = screen_rays[i], screen_rays[j]
        gap = b - a
        length = float(np.hypot(gap[0], gap[1]))
        u = gap / length
        normal = np.array([-u[1], u[0]])
        feet_t = [float(np.dot(screen_points[r] - a, u)) for r in range(model.n)]
        t_lo = min(0.0, min(feet_t))
        t_hi = max(length, max(feet_t))
        start, end = a + t_lo * u, a + t_hi * u
        lines.append(f'<g class="link-group" data-ratio="{escape(name)}">')
        lines.append(
            f'<line class="link" x1="{_fmt(start[0])}" y1="{_fmt(start[1])}" '
            f'x2="{_fmt(end[0])}" y2="{_fmt(end[1])}" stroke="#999999" '
            f'stroke-width="1" stroke-dasharray="4 3"/>'
        )
        for t in feet_t:
            foot = a + t * u
            p_lo, p_hi = foot - _TICK_HALF_LENGTH * normal, foot + _TICK_HALF_LENGTH * normal
            lines.append(
                f'<line class="tick" x1="{_fmt(p_lo[0])}" y1="{_fmt(p_lo[1])}" '
                f'x2="{_fmt(p_hi[0])}" y2="{_fmt(p_hi[1])}" stroke="#999999" '
                f'stroke-width="1"/>'
            )
        lines.append("</g>")

    lines.append('<g class="points">')
    for r, entity in enumerate(table.entities):
        p = screen_points[r]
        lines.append(
            f'<circle class="point" cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" '
            f'r="{_fmt(_POINT_RADIUS)}" fill="{colors[entity.sector_code]}"/>'
        )
    lines.append("</g>")
    if options.label_points:
        for r, entity in enumerate(table.entities):
            p = screen_points[r]
            lines.append(
                f'<text class="point-label" x="{_fmt(p[0] + 5.0)}" '
                f'y="{_fmt(p[1] + 3.0)}" font-size="10" '
                f'fill="#222222">{escape(entity.id)}</text>'
            )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
