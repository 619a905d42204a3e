import math

import pytest

from dispersao.exceptions import DimensionMismatchError, LatticeError
from dispersao.lattice import (
    Momentum,
    high_symmetry_path,
    path_positions,
    symmetry_point,
)
from dispersao.schemas import TfimParams
from dispersao.series import (
    SeriesSpec,
    series_curve,
    series_delta,
    series_reference,
    series_valid,
)

PI = math.pi


def delta(dim, phase, coupling, label):
    spec = SeriesSpec(dim, phase, coupling)
    return series_delta(spec, symmetry_point(label, dim))


# ===== VALORES DE REFERÊNCIA =====


@pytest.mark.parametrize(
    ('dim', 'phase', 'coupling', 'label', 'expected'),
    [
        (2, 'paramagnetic', 0.1, 'X', 2.02015),
        (2, 'paramagnetic', 0.1, 'G', 1.57655),
        (2, 'paramagnetic', 0.2, 'G', 1.0888),
        (2, 'paramagnetic', 0.1, 'M', 2.38255),
        (2, 'paramagnetic', 0.2, 'S', 2.0824),
        (3, 'paramagnetic', 0.1, 'G', 1.325),
        (3, 'paramagnetic', 0.1, 'X', 1.823),
        (3, 'paramagnetic', 0.1, 'M', 2.217),
        (3, 'paramagnetic', 0.1, 'R', 2.555),
        (3, 'paramagnetic', 0.15, 'G', 0.914375),
    ],
)
def test_paramagnetic_values(dim, phase, coupling, label, expected):
    assert delta(dim, phase, coupling, label) == pytest.approx(
        expected, abs=5e-5
    )


@pytest.mark.parametrize(
    ('dim', 'coupling', 'label', 'expected'),
    [
        (2, 1.0, 'M', 8.24364217122396),
        (2, 1.0, 'G', 7.2833918818721),
        (2, 1.0, 'X', 7.7729571307),
        (2, 0.5, 'G', 7.81564625987),
        (2, 1.0, 'S', 7.77051572446),
        (3, 1.0, 'G', 11.6703703704),
        (3, 1.0, 'X', 11.8364583333),
        (3, 1.0, 'M', 12.0013888889),
        (3, 1.0, 'R', 12.1651620370),
        (3, 2.0, 'G', 10.7259259259),
    ],
)
def test_ferromagnetic_values(dim, coupling, label, expected):
    assert delta(dim, 'ferromagnetic', coupling, label) == pytest.approx(
        expected, rel=1e-8
    )


@pytest.mark.parametrize(
    ('dim', 'phase', 'expected'),
    [
        (2, 'paramagnetic', 2.0),
        (3, 'paramagnetic', 2.0),
        (2, 'ferromagnetic', 8.0),
        (3, 'ferromagnetic', 12.0),
    ],
)
def test_zero_coupling_is_flat(dim, phase, expected):
    for label in ('G', 'X', 'M'):
        assert delta(dim, phase, 0.0, label) == pytest.approx(expected)


# ===== SIMETRIAS =====


@pytest.mark.parametrize('phase', ['paramagnetic', 'ferromagnetic'])
def test_symmetric_under_axis_swap_and_inversion(phase):
    spec = SeriesSpec(2, phase, 0.3)
    k = Momentum((0.4, 1.9))
    value = series_delta(spec, k)
    assert series_delta(spec, Momentum((1.9, 0.4))) == pytest.approx(value)
    assert series_delta(spec, -k) == pytest.approx(value)
    assert series_delta(
        spec, Momentum((0.4 + 2 * PI, 1.9))
    ) == pytest.approx(value)


def test_cubic_symmetry():
    spec = SeriesSpec(3, 'paramagnetic', 0.1)
    a = series_delta(spec, Momentum((0.3, 1.1, 2.0)))
    b = series_delta(spec, Momentum((2.0, 0.3, 1.1)))
    assert a == pytest.approx(b)


def test_paramagnetic_minimum_at_gamma():
    spec = SeriesSpec(2, 'paramagnetic', 0.1)
    gamma = series_delta(spec, symmetry_point('G', 2))
    for label in ('X', 'M', 'S'):
        assert series_delta(spec, symmetry_point(label, 2)) > gamma


def test_gap_closes_towards_critical_point():
    values = [delta(2, 'paramagnetic', j, 'G') for j in (0.0, 0.1, 0.2)]
    assert values == sorted(values, reverse=True)


# ===== VALIDADE E PARÂMETROS DA SÉRIE =====


def test_validity_limits():
    assert series_valid(SeriesSpec(2, 'paramagnetic', 0.1))
    assert not series_valid(SeriesSpec(2, 'paramagnetic', 0.5))
    assert series_valid(SeriesSpec(3, 'paramagnetic', 0.15))
    assert series_valid(SeriesSpec(2, 'ferromagnetic', 1.0))
    assert not series_valid(SeriesSpec(2, 'ferromagnetic', 2.5))
    assert series_valid(SeriesSpec(3, 'ferromagnetic', 3.0))


def test_spec_errors():
    with pytest.raises(LatticeError):
        SeriesSpec(4, 'paramagnetic', 0.1)
    with pytest.raises(ValueError):
        SeriesSpec(2, 'paramagnetic', -0.1)
    with pytest.raises(DimensionMismatchError):
        series_delta(
            SeriesSpec(2, 'paramagnetic', 0.1), symmetry_point('R', 3)
        )


@pytest.mark.parametrize(
    ('dim', 'phase', 'order'),
    [
        (2, 'paramagnetic', 4),
        (3, 'paramagnetic', 3),
        (2, 'ferromagnetic', 6),
        (3, 'ferromagnetic', 4),
    ],
)
def test_spec_order(dim, phase, order):
    assert SeriesSpec(dim, phase, 0.1).order == order


def test_for_params_picks_phase_and_coupling():
    para = SeriesSpec.for_params(TfimParams(j=0.2, g=2))
    assert para.phase == 'paramagnetic'
    assert para.coupling == pytest.approx(0.1)
    ferro = SeriesSpec.for_params(TfimParams(j=2, g=1, dimensionality=3))
    assert ferro.phase == 'ferromagnetic'
    assert ferro.dimensionality == 3  # noqa: PLR2004
    assert ferro.coupling == pytest.approx(0.5)


def test_reference_is_in_reported_units():
    value, valid = series_reference(
        TfimParams(j=0.2, g=2), symmetry_point('X', 2)
    )
    assert valid
    assert value == pytest.approx(2.02015, abs=5e-5)


# ===== CURVA =====


def test_series_curve_follows_path():
    path = high_symmetry_path(2)
    spec = SeriesSpec(2, 'paramagnetic', 0.1)
    rows = series_curve(spec, path, 10)
    assert len(rows) == 1 + 9 * (len(path) - 1)
    assert rows[0][0] == 0.0
    assert rows[-1][0] == pytest.approx(path_positions(path)[-1])
    assert rows[0][2] == pytest.approx(2.02015, abs=5e-5)
    assert rows[-1][1] == path[-1]
    assert all(r[2] == series_delta(spec, r[1]) for r in rows)


def test_series_curve_warns_outside_validity(caplog):
    spec = SeriesSpec(2, 'paramagnetic', 0.5)
    with caplog.at_level('WARNING', logger='dispersao'):
        series_curve(spec, high_symmetry_path(2), 2)
    assert 'fora da validade' in caplog.text
