"""Modelo de Ising em campo transverso: termos de ligação, portas de
Trotter e expansão local exata do comutador [H, O_k] com O_k = Σ e^{ik·r} σ^y.

O campo é repartido igualmente entre as 2d ligações de cada sítio
(peso g/(2d) em cada porta), de modo que a soma de `bond_hamiltonian` sobre
todas as ligações reproduz H.

Índices de operadores de dois sítios: (saída_a, saída_b, entrada_a,
entrada_b), com `a` o primeiro sítio.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from dispersao.exceptions import (
    DecompositionError,
    DimensionMismatchError,
    IncommensurateMomentumError,
    ShapeMismatchError,
)
from dispersao.lattice import Bond, Momentum, Site, UnitCell, phase
from dispersao.schemas import TfimParams
from dispersao.tensor import Tensor

logger = logging.getLogger(__name__)

EYE2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class TrotterGate:
    """exp(−dtau·h_bond) como tensor (2,2,2,2)."""

    matrix: Tensor
    dtau: float

    def as_matrix(self) -> np.ndarray:
        return self.matrix.data.reshape(4, 4)


@dataclass(frozen=True)
class CommutatorTerm:
    """Um termo `prefactor · operator` da expansão de [H, O_k].

    `sites` segue a ordem dos fatores de `operator`; termos de dois sítios
    carregam a ligação (`bond`) que une os sítios.
    """

    prefactor: complex
    sites: tuple[Site, ...]
    operator: Tensor
    bond: Bond | None = None


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _split_scale(matrix: np.ndarray) -> tuple[complex, np.ndarray]:
    """matrix = scale · op, com o maior elemento de op igual a 1."""
    idx = int(np.argmax(np.abs(matrix)))
    scale = complex(matrix.flat[idx])
    return scale, matrix / scale


def bond_hamiltonian(p: TfimParams) -> Tensor:
    z = 2 * p.dimensionality
    h = -p.j * np.kron(SIGMA_Z, SIGMA_Z) - (p.g / z) * (
        np.kron(SIGMA_X, EYE2) + np.kron(EYE2, SIGMA_X)
    )
    return Tensor(h.reshape(2, 2, 2, 2))


def build_gate(p: TfimParams, dtau: float) -> TrotterGate:
    """Porta exp(−dtau·h_bond) por autodecomposição exata 4×4.

    dtau = 0 devolve a identidade; dtau negativo é rejeitado.
    """
    if dtau < 0:
        raise ValueError(f'dtau deve ser não negativo, recebeu {dtau}')
    if dtau == 0:
        return TrotterGate(Tensor(np.eye(4).reshape(2, 2, 2, 2)), 0.0)

    h = bond_hamiltonian(p).data.reshape(4, 4).real
    try:
        w, v = linalg.eigh(h)
    except linalg.LinAlgError as exc:
        raise DecompositionError(f'eigh do termo de ligação: {exc}') from exc
    gate = (v * np.exp(-dtau * w)) @ v.T
    return TrotterGate(Tensor(gate.reshape(2, 2, 2, 2)), float(dtau))


def commutator_terms(
    p: TfimParams, k: Momentum, cell: UnitCell
) -> list[CommutatorTerm]:
    """Expansão exata de [H, O_k] restrita a uma célula.

    Para cada sítio j: o termo de campo e^{ik·r_j}(−g)[σx, σy]_j e, para
    cada um dos 2d vizinhos i, e^{ik·r_j}(−J) σz_i ⊗ [σz, σy]_j.
    Termos de acoplamento nulo são omitidos.
    """
    if cell.dimensionality != k.dimensionality:
        raise DimensionMismatchError(
            f'momento {k.dimensionality}D em célula {cell.label}'
        )
    if p.dimensionality != cell.dimensionality:
        raise DimensionMismatchError(
            f'modelo {p.dimensionality}D em célula {cell.label}'
        )
    if not k.is_commensurate(cell):
        raise IncommensurateMomentumError(
            f'{k.display} não é comensurável com a célula {cell.label}'
        )

    field_scale, field_op = _split_scale(commutator(SIGMA_X, SIGMA_Y))
    bond_scale, bond_op = _split_scale(
        commutator(np.kron(SIGMA_Z, SIGMA_Z), np.kron(EYE2, SIGMA_Y))
    )
    field_op_t = Tensor(field_op)
    bond_op_t = Tensor(bond_op.reshape(2, 2, 2, 2))

    terms: list[CommutatorTerm] = []
    for site in cell.sites:
        ph = phase(k, site)
        if p.g != 0:
            terms.append(
                CommutatorTerm(ph * -p.g * field_scale, (site,), field_op_t)
            )
        if p.j == 0:
            continue
        for _leg, bond in cell.incident(site):
            other = bond.neighbor(cell) if bond.site == site else bond.site
            terms.append(
                CommutatorTerm(
                    ph * -p.j * bond_scale, (other, site), bond_op_t, bond
                )
            )
    return terms


# ===== CONSTRUTORES DENSOS (células pequenas) =====


def embed(op: Tensor, positions: Sequence[int], n_sites: int) -> np.ndarray:
    """Matriz 2^N × 2^N do operador local `op` agindo nas `positions`."""
    m = len(positions)
    if op.shape != (2,) * (2 * m):
        raise ShapeMismatchError(
            f'operador {op.shape} incompatível com {m} sítio(s)'
        )
    eye = np.eye(2**n_sites, dtype=complex).reshape((2,) * (2 * n_sites))
    out = np.tensordot(
        op.data, eye, axes=(list(range(m, 2 * m)), list(positions))
    )
    # eixos de saída de `op` voltam para as posições originais
    out = np.moveaxis(out, list(range(m)), list(positions))
    return out.reshape(2**n_sites, 2**n_sites)


def cell_hamiltonian(p: TfimParams, cell: UnitCell) -> np.ndarray:
    """H da célula periódica (uma parcela por ligação da célula)."""
    n = len(cell.sites)
    index = {s: i for i, s in enumerate(cell.sites)}
    zz = Tensor(np.kron(SIGMA_Z, SIGMA_Z).reshape(2, 2, 2, 2))
    x = Tensor(SIGMA_X)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for bond in cell.bonds:
        pos = [index[bond.site], index[bond.neighbor(cell)]]
        h -= p.j * embed(zz, pos, n)
    for site in cell.sites:
        h -= p.g * embed(x, [index[site]], n)
    return h


def cell_probe(k: Momentum, cell: UnitCell) -> np.ndarray:
    n = len(cell.sites)
    y = Tensor(SIGMA_Y)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for i, site in enumerate(cell.sites):
        out += phase(k, site) * embed(y, [i], n)
    return out


def assemble_commutator(
    terms: Sequence[CommutatorTerm], cell: UnitCell
) -> np.ndarray:
    n = len(cell.sites)
    index = {s: i for i, s in enumerate(cell.sites)}
    out = np.zeros((2**n, 2**n), dtype=complex)
    for term in terms:
        pos = [index[s] for s in term.sites]
        out += term.prefactor * embed(term.operator, pos, n)
    return out
