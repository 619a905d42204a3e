"""Execuções físicas completas; rode com `pytest -m slow`."""

import math
from pathlib import Path

import numpy as np
import pytest

from dispersao.cli import EXIT_OK, cmd_converge
from dispersao.config import load_config
from dispersao.dispersion import compute_curve
from dispersao.lattice import Momentum, symmetry_point
from dispersao.outputs import read_convergence_json
from dispersao.schemas import EvolutionParams, TfimParams

pytestmark = pytest.mark.slow

PI = math.pi

CONFIGS = Path(__file__).parent.parent / 'configs'


def evolution(d_max, max_steps=2000):
    return EvolutionParams(dtau=0.01, max_steps=max_steps, d_max=d_max)


def test_paramagnet_x_point():
    curve = compute_curve(
        TfimParams(j=0.1, g=1), evolution(4), [symmetry_point('X', 2)]
    )
    point = curve.points[0]
    assert point.status == 'ok'
    assert point.delta == pytest.approx(2.0201, rel=0.01)


def test_ferromagnet_m_point():
    curve = compute_curve(
        TfimParams(j=1, g=1), evolution(4), [symmetry_point('M', 2)]
    )
    assert curve.points[0].delta == pytest.approx(8.2436, rel=0.01)


def test_ferromagnet_3d_x_point():
    curve = compute_curve(
        TfimParams(j=1, g=1, dimensionality=3),
        evolution(3),
        [symmetry_point('X', 3)],
    )
    assert curve.points[0].delta == pytest.approx(11.880233, rel=0.02)


def test_paramagnet_path_minimum_at_gamma():
    ks = [symmetry_point(label, 2) for label in ('X', 'M', 'G')]
    curve = compute_curve(TfimParams(j=0.1, g=1), evolution(3), ks)
    deltas = {p.k_label: p.delta for p in curve.points}
    assert min(deltas, key=deltas.get) == 'G'
    for point in curve.points[:2]:
        assert point.delta == pytest.approx(point.series_ref, rel=0.02)


def test_square_lattice_symmetry():
    ks = [Momentum((PI, 0.0)), Momentum((0.0, PI))]
    curve = compute_curve(TfimParams(j=0.1, g=1), evolution(3), ks)
    a, b = curve.points
    assert abs(a.delta - b.delta) <= 2 * max(a.slope_std, b.slope_std, 1e-9)


def test_convergence_protocol(tmp_path):
    config = load_config(
        CONFIGS / 'ferro2d_m.toml',
        {'d_values': [4], 'output': {'directory': str(tmp_path)}},
    )
    assert cmd_converge(config) == EXIT_OK
    report = read_convergence_json(tmp_path / 'converge.json')
    row = report.rows[0]
    assert row.mean == pytest.approx(report.reference, rel=0.01)
    assert row.std < 0.01 * row.mean
    assert np.isfinite(row.values).all()


def test_cubic_lattice_permutation_symmetry():
    ks = [
        Momentum((PI, 0.0, 0.0)),
        Momentum((0.0, PI, 0.0)),
        Momentum((0.0, 0.0, PI)),
    ]
    curve = compute_curve(
        TfimParams(j=1, g=1, dimensionality=3), evolution(3), ks
    )
    deltas = [p.delta for p in curve.points]
    tol = 2 * max(*(p.slope_std for p in curve.points), 1e-9)
    assert max(deltas) - min(deltas) <= tol
