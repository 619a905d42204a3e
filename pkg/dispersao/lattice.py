"""Geometria da célula unitária periódica e momentos comensuráveis.

A célula L_x × L_y (× L_z) é guardada como um `networkx.MultiGraph`: cada
ligação (r, ê_i) que liga r a r+ê_i mod L vira uma aresta própria, com a
`Bond` como chave. Com L_i = 2 os mesmos dois sítios ficam ligados por duas
arestas distintas (pernas +i e −i), que o multigrafo preserva.

Convenção das pernas virtuais de um tensor de sítio (depois da perna física
0): 1 = +x, 2 = −x, 3 = +y, 4 = −y, 5 = +z, 6 = −z.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from dispersao.exceptions import (
    DimensionMismatchError,
    IncommensurateMomentumError,
    LatticeError,
    UnsupportedDimensionalityError,
)

TWO_PI = 2 * math.pi
MOMENTUM_TOL = 1e-12
MAX_CELL_SIZE = 64

Site = tuple[int, ...]

# Rótulos ASCII usados nas saídas -> nome exibido
LABELS = {'G': 'Γ', 'X': 'X', 'M': 'M', 'S': 'Σ', 'R': 'R'}

SYMMETRY_POINTS: dict[int, dict[str, tuple[float, ...]]] = {
    2: {
        'G': (0.0, 0.0),
        'X': (math.pi, 0.0),
        'M': (math.pi, math.pi),
        'S': (math.pi / 2, math.pi / 2),
    },
    3: {
        'G': (0.0, 0.0, 0.0),
        'X': (math.pi, 0.0, 0.0),
        'M': (math.pi, math.pi, 0.0),
        'R': (math.pi, math.pi, math.pi),
    },
}

PATHS = {2: ('X', 'M', 'S', 'G', 'X', 'S'), 3: ('G', 'X', 'M', 'R', 'G')}


def _check_dimensionality(dimensionality: int):
    if dimensionality not in SYMMETRY_POINTS:
        raise UnsupportedDimensionalityError(
            f'dimensionalidade {dimensionality} não suportada (use 2 ou 3)'
        )


def leg(axis: int, step: int) -> int:
    """Índice da perna virtual na direção ±ê_axis."""
    return 1 + 2 * axis if step > 0 else 2 + 2 * axis


@dataclass(frozen=True)
class Bond:
    """Ligação (site, ê_axis): liga `site` a `site + ê_axis` (mod L)."""

    site: Site
    axis: int

    def neighbor(self, cell: UnitCell) -> Site:
        return cell.shift(self.site, self.axis, 1)


@dataclass(frozen=True)
class UnitCell:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        _check_dimensionality(len(dims))
        if any(n < 1 for n in dims):
            raise LatticeError(f'dimensões da célula devem ser >= 1: {dims}')
        object.__setattr__(self, 'dims', dims)

    @property
    def dimensionality(self) -> int:
        return len(self.dims)

    @property
    def label(self) -> str:
        return 'x'.join(str(n) for n in self.dims)

    @cached_property
    def sites(self) -> tuple[Site, ...]:
        return tuple(itertools.product(*(range(n) for n in self.dims)))

    @cached_property
    def bonds(self) -> tuple[Bond, ...]:
        # ordem site-major, depois direção x < y < z
        return tuple(
            Bond(site, axis)
            for site in self.sites
            for axis in range(self.dimensionality)
        )

    @cached_property
    def graph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.sites)
        for bond in self.bonds:
            graph.add_edge(bond.site, bond.neighbor(self), key=bond)
        return graph

    def shift(self, site: Site, axis: int, step: int) -> Site:
        coords = list(site)
        coords[axis] = (coords[axis] + step) % self.dims[axis]
        return tuple(coords)

    def incident(self, site: Site) -> list[tuple[int, Bond]]:
        """(perna, ligação) das 2d pernas virtuais de `site`."""
        out = []
        for axis in range(self.dimensionality):
            out.append((leg(axis, 1), Bond(site, axis)))
            out.append((leg(axis, -1), Bond(self.shift(site, axis, -1), axis)))
        return out

    def bonds_between(self, a: Site, b: Site) -> list[Bond]:
        data = self.graph.get_edge_data(a, b) or {}
        return sorted(
            data.keys(), key=lambda bond: (bond.axis, bond.site != a)
        )

    def sweep_order(self) -> list[Bond]:
        """Ordem direction-major: todas as ligações x, depois y, depois z."""
        return sorted(
            self.bonds,
            key=lambda bond: (bond.axis, self.sites.index(bond.site)),
        )


@dataclass(frozen=True, eq=False)
class Momentum:
    """Vetor de onda em [0, 2π)^d (radianos por unidade de rede).

    A igualdade é módulo 2π com tolerância `MOMENTUM_TOL`; o rótulo não
    participa da comparação.
    """

    components: tuple[float, ...]
    label: str | None = None

    def __post_init__(self):
        comps = []
        for c in self.components:
            c = float(c) % TWO_PI
            if abs(c - TWO_PI) < MOMENTUM_TOL or abs(c) < MOMENTUM_TOL:
                c = 0.0
            comps.append(c)
        _check_dimensionality(len(comps))
        if self.label is not None and self.label not in LABELS:
            raise LatticeError(
                f'rótulo de simetria desconhecido: {self.label}'
            )
        object.__setattr__(self, 'components', tuple(comps))

    @property
    def dimensionality(self) -> int:
        return len(self.components)

    @property
    def display(self) -> str:
        if self.label:
            return LABELS[self.label]
        return '(' + ', '.join(f'{c:.4f}' for c in self.components) + ')'

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(round(c / TWO_PI * 1e9) % 10**9 for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, Momentum):
            return NotImplemented
        if self.dimensionality != other.dimensionality:
            return False
        for a, b in zip(self.components, other.components):
            diff = abs(a - b) % TWO_PI
            if min(diff, TWO_PI - diff) > MOMENTUM_TOL:
                return False
        return True

    def __hash__(self):
        return hash(self.key)

    def __neg__(self) -> Momentum:
        return Momentum(tuple(-c for c in self.components))

    def with_label(self) -> Momentum:
        """Cópia com o rótulo de simetria, se for um ponto notável."""
        for label, comps in SYMMETRY_POINTS[self.dimensionality].items():
            if self == Momentum(comps):
                return Momentum(self.components, label)
        return Momentum(self.components)

    def is_commensurate(self, cell: UnitCell) -> bool:
        if cell.dimensionality != self.dimensionality:
            return False
        for c, n in zip(self.components, cell.dims):
            x = c * n / TWO_PI
            if abs(x - round(x)) > 1e-9:
                return False
        return True


def symmetry_point(label: str, dimensionality: int) -> Momentum:
    _check_dimensionality(dimensionality)
    points = SYMMETRY_POINTS[dimensionality]
    if label not in points:
        raise LatticeError(
            f'ponto {label} não existe em {dimensionality}D '
            f'(disponíveis: {", ".join(points)})'
        )
    return Momentum(points[label], label)


def momentum_grid(cell: UnitCell) -> list[Momentum]:
    """Todos os Π L_i momentos k_i = 2π n_i / L_i da célula."""
    return [
        Momentum(
            tuple(TWO_PI * n / size for n, size in zip(ns, cell.dims))
        ).with_label()
        for ns in itertools.product(*(range(size) for size in cell.dims))
    ]


def high_symmetry_path(dimensionality: int) -> list[Momentum]:
    _check_dimensionality(dimensionality)
    return [
        symmetry_point(label, dimensionality)
        for label in PATHS[dimensionality]
    ]


def phase(k: Momentum, r: Sequence[int]) -> complex:
    """e^{i k·r}; múltiplos de π/2 saem exatos (±1, ±i)."""
    if len(r) != k.dimensionality:
        raise DimensionMismatchError(
            f'momento {k.dimensionality}D e posição {len(r)}D'
        )
    theta = float(np.dot(k.components, r)) % TWO_PI
    quarter = theta / (math.pi / 2)
    if abs(quarter - round(quarter)) < 1e-12:
        return (1, 1j, -1, -1j)[round(quarter) % 4] + 0j
    return complex(np.exp(1j * theta))


def _minimal_length(component: float) -> int:
    for size in range(1, MAX_CELL_SIZE + 1):
        x = component * size / TWO_PI
        if abs(x - round(x)) < 1e-9:
            return size
    raise IncommensurateMomentumError(
        f'componente {component} não é múltiplo racional de 2π '
        f'com denominador <= {MAX_CELL_SIZE}'
    )


def minimal_cell_for(k: Momentum) -> UnitCell:
    """Menor célula comensurável com `k`, com ao menos 2 sítios por eixo."""
    return UnitCell(
        tuple(max(2, _minimal_length(c)) for c in k.components)
    )


def common_cell(ks: Iterable[Momentum]) -> UnitCell:
    """Menor célula comensurável com todos os momentos (mmc por eixo)."""
    cells = [minimal_cell_for(k) for k in ks]
    if not cells:
        raise LatticeError('nenhum momento informado')
    dims = {c.dimensionality for c in cells}
    if len(dims) != 1:
        raise DimensionMismatchError('momentos com dimensionalidades mistas')
    return UnitCell(
        tuple(
            math.lcm(*(c.dims[axis] for c in cells))
            for axis in range(cells[0].dimensionality)
        )
    )


_ANGLE = re.compile(r'([+-]?\d*\.?\d*)\*?pi(?:/(\d+(?:\.\d*)?))?')


def _parse_angle(text: str) -> float:
    s = text.strip().lower().replace(' ', '').replace('π', 'pi')
    if 'pi' not in s:
        try:
            return float(s)
        except ValueError as exc:
            raise LatticeError(f'componente inválida: {text!r}') from exc
    match = _ANGLE.fullmatch(s)
    if match is None:
        raise LatticeError(f'componente inválida: {text!r}')
    coeff, den = match.groups()
    if coeff in {'', '+'}:
        factor = 1.0
    elif coeff == '-':
        factor = -1.0
    else:
        factor = float(coeff)
    return factor * math.pi / float(den or 1)


def parse_momentum(text: str, dimensionality: int) -> Momentum:
    """Aceita rótulos (G/Γ, X, M, S/Σ, R) ou 'pi,0', 'pi/2,pi/2', ..."""
    s = text.strip()
    alias = {'Γ': 'G', 'Σ': 'S'}.get(s, s.upper())
    if alias in LABELS:
        return symmetry_point(alias, dimensionality)
    parts = s.strip('()').split(',')
    if len(parts) != dimensionality:
        raise DimensionMismatchError(
            f'{text!r} tem {len(parts)} componentes; esperado {dimensionality}'
        )
    return Momentum(tuple(_parse_angle(p) for p in parts)).with_label()


def _segment_length(a: Momentum, b: Momentum) -> float:
    return float(np.linalg.norm(np.subtract(b.components, a.components)))


def path_positions(path: Sequence[Momentum]) -> list[float]:
    """Comprimento de arco acumulado ao longo do caminho."""
    positions = [0.0]
    for a, b in itertools.pairwise(path):
        positions.append(positions[-1] + _segment_length(a, b))
    return positions


def interpolate_path(
    path: Sequence[Momentum], samples_per_segment: int
) -> list[tuple[float, Momentum]]:
    """Amostra cada segmento reto com `samples_per_segment` pontos
    uniformes (extremos incluídos, vértices internos sem repetição)."""
    if len(path) < 2:
        raise LatticeError('o caminho precisa de ao menos 2 pontos')
    if samples_per_segment < 2:
        raise LatticeError('samples_per_segment deve ser >= 2')
    out: list[tuple[float, Momentum]] = [(0.0, path[0])]
    start = 0.0
    for a, b in itertools.pairwise(path):
        length = _segment_length(a, b)
        ca, cb = np.array(a.components), np.array(b.components)
        for t in np.linspace(0.0, 1.0, samples_per_segment)[1:]:
            if t == 1.0:
                k = b
            else:
                k = Momentum(tuple(ca + t * (cb - ca)))
            out.append((start + t * length, k))
        start += length
    return out
