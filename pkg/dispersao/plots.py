"""Gravador SVG mínimo para as figuras de resultado (polilinhas, marcadores,
barras de erro e marcas de eixo)."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from dispersao.lattice import LABELS, Momentum, path_positions
from dispersao.schemas import ConvergenceReport, DispersionCurve, FitPoint

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

COLORS = ('#1f77b4', '#d62728', '#2ca02c')


@dataclass
class SvgPlot:
    width: int = 640
    height: int = 400
    margin: int = 56
    title: str = ''
    x_label: str = ''
    y_label: str = ''
    elements: List[str] = field(default_factory=list)
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None

    def set_ranges(self, xs: Sequence[float], ys: Sequence[float]):
        x0, x1 = float(min(xs)), float(max(xs))
        y0, y1 = float(min(ys)), float(max(ys))
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        pad = 0.08 * (y1 - y0) if y1 > y0 else max(abs(y0) * 0.05, 0.5)
        self.x_range = (x0, x1)
        self.y_range = (y0 - pad, y1 + pad)

    def sx(self, x: float) -> float:
        x0, x1 = self.x_range
        return self.margin + (x - x0) / (x1 - x0) * (
            self.width - 2 * self.margin
        )

    def sy(self, y: float) -> float:
        y0, y1 = self.y_range
        return self.height - self.margin - (y - y0) / (y1 - y0) * (
            self.height - 2 * self.margin
        )

    def polyline(self, points: Sequence[Point], color: str, dashed=False):
        coords = ' '.join(
            f'{self.sx(x):.2f},{self.sy(y):.2f}' for x, y in points
        )
        dash = ' stroke-dasharray="6 4"' if dashed else ''
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"{dash}/>'
        )

    def markers(self, points: Sequence[Point], color: str):
        for x, y in points:
            self.elements.append(
                f'<circle cx="{self.sx(x):.2f}" cy="{self.sy(y):.2f}" '
                f'r="3" fill="{color}"/>'
            )

    def error_bars(self, points: Sequence[Tuple[float, float, float]], color):
        for x, y, err in points:
            px = self.sx(x)
            lo, hi = self.sy(y - err), self.sy(y + err)
            self.elements.append(
                f'<line x1="{px:.2f}" y1="{lo:.2f}" x2="{px:.2f}" '
                f'y2="{hi:.2f}" stroke="{color}"/>'
            )

    def _text(self, x, y, text, anchor='middle', rotate=False):
        transform = ''
        if rotate:
            transform = f' transform="rotate(-90 {x:.2f} {y:.2f})"'
        return (
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="12" '
            f'text-anchor="{anchor}"{transform}>{escape(text)}</text>'
        )

    def render(
        self,
        x_ticks: Sequence[Tuple[float, str]],
        n_y_ticks: int = 5,
    ) -> str:
        left, right = self.margin, self.width - self.margin
        top, bottom = self.margin, self.height - self.margin
        axes = [
            f'<rect x="{left}" y="{top}" width="{right - left}" '
            f'height="{bottom - top}" fill="none" stroke="black"/>'
        ]
        for x, label in x_ticks:
            px = self.sx(x)
            axes.append(
                f'<line x1="{px:.2f}" y1="{top}" x2="{px:.2f}" '
                f'y2="{bottom}" stroke="#cccccc"/>'
            )
            axes.append(self._text(px, bottom + 16, label))
        for y in np.linspace(*self.y_range, n_y_ticks):
            py = self.sy(y)
            axes.append(
                f'<line x1="{left - 4}" y1="{py:.2f}" x2="{left}" '
                f'y2="{py:.2f}" stroke="black"/>'
            )
            axes.append(self._text(left - 6, py + 4, f'{y:.4g}', 'end'))
        axes.append(self._text(self.width / 2, top - 20, self.title))
        axes.append(self._text(self.width / 2, self.height - 12, self.x_label))
        axes.append(
            self._text(16, self.height / 2, self.y_label, rotate=True)
        )
        body = '\n'.join(axes + self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} '
            f'{self.height}">\n{body}\n</svg>\n'
        )


def _point_at(curve: DispersionCurve, k: Momentum) -> Optional[FitPoint]:
    for p in curve.points:
        if Momentum(tuple(p.components)) == k:
            return p
    return None


def plot_curve(
    curve: DispersionCurve,
    path: Path,
    series_rows: Optional[Sequence[Tuple[float, Momentum, float]]] = None,
    route: Optional[Sequence[Momentum]] = None,
) -> Path:
    """Δ ao longo de `route` (padrão: os pontos da curva, em ordem) com a
    série tracejada.

    Um ponto que se repete em `route` (Γ ... Γ) aparece em cada posição.
    `series_rows` deve usar as mesmas posições de caminho de `route`.
    """
    if route is None:
        route = [Momentum(tuple(p.components)) for p in curve.points]
    positions = path_positions(route) if len(route) > 1 else [0.0]
    fitted = [
        (x, p.delta)
        for x, k in zip(positions, route)
        if (p := _point_at(curve, k)) is not None and p.delta is not None
    ]
    reference = [(x, d) for x, _k, d in series_rows or []]
    ys = [y for _, y in fitted + reference] or [0.0]
    plot = SvgPlot(
        title=f'{curve.params.dimensionality}D J={curve.params.j:g} '
        f'g={curve.params.g:g} D={curve.d_max}',
        x_label='k',
        y_label=f'Δ_k / {curve.unit}',
    )
    plot.set_ranges(positions, ys)
    if reference:
        plot.polyline(reference, COLORS[1], dashed=True)
    if fitted:
        plot.polyline(fitted, COLORS[0])
        plot.markers(fitted, COLORS[0])
    ticks = [
        (x, LABELS.get(k.label, '') if k.label else '')
        for x, k in zip(positions, route)
    ]
    path.write_text(plot.render(ticks), encoding='utf-8')
    return path


def plot_convergence(report: ConvergenceReport, path: Path) -> Path:
    rows = [r for r in report.rows if r.mean is not None]
    ds = [float(r.d) for r in report.rows]
    ys = [r.mean + s * r.std for r in rows for s in (-1, 1)]
    if report.reference is not None:
        ys.append(report.reference)
    plot = SvgPlot(
        title=f'convergência em D ({report.k_label or "k"})',
        x_label='D',
        y_label=f'Δ_k / {report.unit}',
    )
    plot.set_ranges(ds, ys or [0.0])
    if report.reference is not None:
        plot.polyline(
            [(min(ds), report.reference), (max(ds), report.reference)],
            COLORS[1],
            dashed=True,
        )
    points = [(float(r.d), r.mean) for r in rows]
    plot.markers(points, COLORS[0])
    plot.error_bars(
        [(float(r.d), r.mean, r.std) for r in rows], COLORS[0]
    )
    ticks = [(d, str(int(d))) for d in ds]
    path.write_text(plot.render(ticks), encoding='utf-8')
    return path
