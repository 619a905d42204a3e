"""Arquivos de resultado: CSV com 9 algarismos significativos e JSON
completo (com proveniência) para curvas, convergência e séries."""

import csv
import logging
from pathlib import Path
from typing import List, Sequence

from dispersao.lattice import Momentum
from dispersao.schemas import ConvergenceReport, DispersionCurve, FitPoint
from dispersao.utils import format_number

logger = logging.getLogger(__name__)

AXIS_NAMES = ('kx', 'ky', 'kz')


def _bool(value: bool) -> str:
    return 'true' if value else 'false'


def curve_header(dimensionality: int) -> List[str]:
    return [
        'k_label',
        *AXIS_NAMES[:dimensionality],
        'delta',
        'slope_std',
        'residual',
        'plateau_ok',
        'series_ref',
    ]


def point_slug(point: FitPoint) -> str:
    if point.k_label:
        return point.k_label
    return 'k_' + '_'.join(f'{c:.6f}' for c in point.components)


def write_curve_csv(curve: DispersionCurve, path: Path) -> Path:
    dim = curve.params.dimensionality
    with path.open('w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(curve_header(dim))
        for p in curve.points:
            writer.writerow([
                p.k_label or '',
                *(format_number(c) for c in p.components),
                format_number(p.delta),
                format_number(p.slope_std),
                format_number(p.residual),
                _bool(p.plateau_ok),
                format_number(p.series_ref),
            ])
    return path


def write_curve_json(curve: DispersionCurve, path: Path) -> Path:
    path.write_text(curve.model_dump_json(indent=2), encoding='utf-8')
    return path


def read_curve_json(path: Path) -> DispersionCurve:
    return DispersionCurve.model_validate_json(
        Path(path).read_text(encoding='utf-8')
    )


def write_traces(curve: DispersionCurve, directory: Path) -> List[Path]:
    """Um `(tau,c)` CSV por momento em `directory`."""
    directory.mkdir(parents=True, exist_ok=True)
    by_key = {Momentum(tuple(p.components)): p for p in curve.points}
    written = []
    for trace in curve.traces:
        point = by_key[trace.k]
        path = directory / f'{point_slug(point)}.csv'
        with path.open('w', newline='', encoding='utf-8') as fh:
            writer = csv.writer(fh, lineterminator='\n')
            writer.writerow(['tau', 'c'])
            for tau, c in trace.samples:
                writer.writerow([format_number(tau), format_number(c)])
        written.append(path)
    return written


def write_convergence_csv(report: ConvergenceReport, path: Path) -> Path:
    n_trials = max((row.trials for row in report.rows), default=0)
    header = ['d', 'mean', 'std', 'std_defined', 'trials', 'reference']
    header += [f'trial_{i + 1}' for i in range(n_trials)]
    with path.open('w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in report.rows:
            writer.writerow([
                row.d,
                format_number(row.mean),
                format_number(row.std),
                _bool(row.std_defined),
                row.trials,
                format_number(report.reference),
                *(format_number(v) for v in row.values),
            ])
    return path


def write_convergence_json(report: ConvergenceReport, path: Path) -> Path:
    path.write_text(report.model_dump_json(indent=2), encoding='utf-8')
    return path


def read_convergence_json(path: Path) -> ConvergenceReport:
    return ConvergenceReport.model_validate_json(
        Path(path).read_text(encoding='utf-8')
    )


def write_series_csv(
    rows: Sequence[tuple[float, Momentum, float]],
    dimensionality: int,
    path: Path,
) -> Path:
    with path.open('w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(
            ['position', *AXIS_NAMES[:dimensionality], 'delta']
        )
        for position, k, delta in rows:
            writer.writerow([
                format_number(position),
                *(format_number(c) for c in k.components),
                format_number(delta),
            ])
    return path
