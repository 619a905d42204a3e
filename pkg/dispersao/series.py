"""Relações de dispersão analíticas por expansão em série (aglomerados
conexos), transcritas literalmente até a ordem impressa.

Paramagneto (g = 1): potências de J. Ferromagneto (J = 1): potências de g.
Abreviação: c_{nα} = cos(n·k_α). Os coeficientes ficam como frações
exatas e só viram ponto flutuante na avaliação.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from dispersao.exceptions import DimensionMismatchError, LatticeError
from dispersao.lattice import Momentum, interpolate_path
from dispersao.schemas import CRITICAL_RATIO, Phase, TfimParams

logger = logging.getLogger(__name__)

F = Fraction
AXES = {'x': 0, 'y': 1, 'z': 2}

# (potência, prefator, [(coeficiente, monômio em c_{nα})])
SeriesTable = list[tuple[int, Fraction, list[tuple[Fraction, str]]]]

PARA_2D: SeriesTable = [
    (0, F(1), [(F(2), '')]),
    (1, F(-2), [(F(1), 'c1x'), (F(1), 'c1y')]),
    (
        2,
        F(1),
        [
            (F(1), ''),
            (F(-2), 'c1x c1y'),
            (F(-1, 2), 'c2x'),
            (F(-1, 2), 'c2y'),
        ],
    ),
    (
        3,
        F(1, 4),
        [
            (F(1), 'c1x'),
            (F(1), 'c1y'),
            (F(-6), 'c2x c1y'),
            (F(-6), 'c1x c2y'),
            (F(-1), 'c3x'),
            (F(-1), 'c3y'),
        ],
    ),
    (
        4,
        F(1, 32),
        [
            (F(70), ''),
            (F(-16), 'c1x c1y'),
            (F(-60), 'c2x c2y'),
            (F(-24), 'c2x'),
            (F(-24), 'c2y'),
            (F(-40), 'c3x c1y'),
            (F(-40), 'c1x c3y'),
            (F(-5), 'c4x'),
            (F(-5), 'c4y'),
        ],
    ),
]

PARA_3D: SeriesTable = [
    (0, F(1), [(F(2), '')]),
    (1, F(-2), [(F(1), 'c1x'), (F(1), 'c1y'), (F(1), 'c1z')]),
    (
        2,
        F(1, 2),
        [
            (F(3), ''),
            (F(-4), 'c1x c1y'),
            (F(-4), 'c1x c1z'),
            (F(-4), 'c1y c1z'),
            (F(-1), 'c2x'),
            (F(-1), 'c2y'),
            (F(-1), 'c2z'),
        ],
    ),
    (
        3,
        F(1, 4),
        [
            (F(-24), 'c1x c1y c1z'),
            (F(1), 'c1x'),
            (F(1), 'c1y'),
            (F(1), 'c1z'),
            (F(-6), 'c2x c1y'),
            (F(-6), 'c1x c2y'),
            (F(-6), 'c2x c1z'),
            (F(-6), 'c1x c2z'),
            (F(-6), 'c2y c1z'),
            (F(-6), 'c1y c2z'),
            (F(-1), 'c3x'),
            (F(-1), 'c3y'),
            (F(-1), 'c3z'),
        ],
    ),
]

FERRO_2D: SeriesTable = [
    (0, F(1), [(F(8), '')]),
    (2, F(-1, 4), [(F(1), ''), (F(1), 'c1x'), (F(1), 'c1y')]),
    (4, F(1, 768), [(F(19), ''), (F(12), 'c1x'), (F(12), 'c1y')]),
    (
        6,
        F(-1, 884736),
        [
            (F(4745), ''),
            (F(4176), 'c1x c1y'),
            (F(4710), 'c1x'),
            (F(4710), 'c1y'),
            (F(504), 'c2x'),
            (F(504), 'c2y'),
            (F(276), 'c2x c1y'),
            (F(276), 'c1x c2y'),
            (F(46), 'c3x'),
            (F(46), 'c3y'),
        ],
    ),
]

FERRO_3D: SeriesTable = [
    (0, F(1), [(F(12), '')]),
    (
        2,
        F(-1, 12),
        [(F(1), ''), (F(1), 'c1x'), (F(1), 'c1y'), (F(1), 'c1z')],
    ),
    (
        4,
        F(1, 69120),
        [
            (F(151), ''),
            (F(60), 'c1x'),
            (F(60), 'c1y'),
            (F(60), 'c1z'),
            (F(-5), 'c2x'),
            (F(-5), 'c2y'),
            (F(-5), 'c2z'),
            (F(-20), 'c1x c1y'),
            (F(-20), 'c1x c1z'),
            (F(-20), 'c1y c1z'),
        ],
    ),
]

TABLES: dict[tuple[int, str], SeriesTable] = {
    (2, 'paramagnetic'): PARA_2D,
    (3, 'paramagnetic'): PARA_3D,
    (2, 'ferromagnetic'): FERRO_2D,
    (3, 'ferromagnetic'): FERRO_3D,
}

# alcance do acoplamento reduzido do ferromagneto: em 2D a série diverge
# em g = 2; em 3D g = 4 já fica fora do alcance
FERRO_LIMIT = {2: 2.0, 3: 4.0}


@dataclass(frozen=True)
class SeriesSpec:
    """Qual série avaliar.

    @Attributes
        dimensionality: 2 ou 3
        phase: 'paramagnetic' (acoplamento J/g) ou 'ferromagnetic' (g/J)
        coupling: acoplamento reduzido >= 0
    """

    dimensionality: int
    phase: Phase
    coupling: float

    def __post_init__(self):
        if (self.dimensionality, self.phase) not in TABLES:
            raise LatticeError(
                f'sem série para {self.dimensionality}D/{self.phase}'
            )
        if self.coupling < 0:
            raise ValueError(
                f'acoplamento deve ser não negativo: {self.coupling}'
            )

    @property
    def order(self) -> int:
        return TABLES[self.dimensionality, self.phase][-1][0]

    @classmethod
    def for_params(cls, p: TfimParams) -> SeriesSpec:
        if p.phase == 'ferromagnetic':
            return cls(p.dimensionality, 'ferromagnetic', p.g / p.j)
        return cls(p.dimensionality, 'paramagnetic', p.j / p.g)


def _monomial(text: str, k: Sequence[float]) -> float:
    value = 1.0
    for factor in text.split():
        n, axis = int(factor[1:-1]), AXES[factor[-1]]
        value *= np.cos(n * k[axis])
    return value


def series_delta(spec: SeriesSpec, k: Momentum) -> float:
    if k.dimensionality != spec.dimensionality:
        raise DimensionMismatchError(
            f'momento {k.dimensionality}D para série {spec.dimensionality}D'
        )
    total = 0.0
    for power, prefactor, terms in TABLES[spec.dimensionality, spec.phase]:
        bracket = sum(
            float(coef) * _monomial(mono, k.components)
            for coef, mono in terms
        )
        total += float(prefactor) * spec.coupling**power * bracket
    return float(total)


def series_valid(spec: SeriesSpec) -> bool:
    """A série truncada só vale longe do ponto crítico."""
    if spec.phase == 'paramagnetic':
        return spec.coupling < 1.0 / CRITICAL_RATIO[spec.dimensionality]
    return spec.coupling < FERRO_LIMIT[spec.dimensionality]


def series_curve(
    spec: SeriesSpec, path: Sequence[Momentum], samples_per_segment: int
) -> list[tuple[float, Momentum, float]]:
    """(posição no caminho, k, Δ) com amostragem uniforme por segmento."""
    if not series_valid(spec):
        logger.warning(
            'acoplamento %.4g fora da validade da série %dD/%s',
            spec.coupling,
            spec.dimensionality,
            spec.phase,
        )
    return [
        (position, k, series_delta(spec, k))
        for position, k in interpolate_path(path, samples_per_segment)
    ]


def series_reference(p: TfimParams, k: Momentum) -> tuple[float, bool]:
    """Δ da série nas mesmas unidades do Δ ajustado, e sua validade."""
    spec = SeriesSpec.for_params(p)
    return series_delta(spec, k), series_valid(spec)
