"""Estado iPEPS numa célula periódica e a atualização simples (simple update).

Os tensores de sítio guardam a forma (física, +x, −x, +y, −y[, +z, −z]) e
ficam sem os pesos de ligação: cada vetor λ mora uma única vez na ligação
(forma de Vidal). A atualização de uma ligação absorve os λ das outras
pernas, aplica a porta, trunca pela SVD e divide os λ de volta.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from math import prod
from pathlib import Path
from typing import Sequence

import numpy as np

from dispersao.exceptions import (
    BondNotFoundError,
    CellTooSmallError,
    EvolutionError,
    NotAdjacentError,
    ShapeMismatchError,
)
from dispersao.lattice import Bond, Site, UnitCell, leg
from dispersao.model import (
    SIGMA_Z,
    CommutatorTerm,
    TrotterGate,
    bond_hamiltonian,
)
from dispersao.schemas import TfimParams
from dispersao.tensor import Tensor, contract, permute, qr_split, svd_truncate

logger = logging.getLogger(__name__)

# pesos abaixo disto (relativos ao maior) são descartados na truncagem
WEIGHT_CUTOFF = 1e-12

CHECKPOINT_VERSION = 1


@dataclass
class IpepsState:
    """Estado iPEPS de uma trajetória.

    @Attributes
        cell: célula unitária periódica
        site_tensors: sítio -> tensor (2, D_+x, D_-x, ...)
        bond_weights: ligação -> vetor λ (positivo, decrescente, max = 1)
        d_max: dimensão de ligação alvo D
        tau: tempo imaginário acumulado
        seed: semente da inicialização
        truncation_error: maior erro de truncagem da última varredura
    """

    cell: UnitCell
    site_tensors: dict[Site, Tensor]
    bond_weights: dict[Bond, np.ndarray]
    d_max: int
    tau: float = 0.0
    seed: int | None = None
    truncation_error: float = field(default=0.0, compare=False)

    def copy(self) -> IpepsState:
        return IpepsState(
            cell=self.cell,
            site_tensors=dict(self.site_tensors),
            bond_weights={b: w.copy() for b, w in self.bond_weights.items()},
            d_max=self.d_max,
            tau=self.tau,
            seed=self.seed,
            truncation_error=self.truncation_error,
        )

    def max_bond_dimension(self) -> int:
        return max(len(w) for w in self.bond_weights.values())

    def check_consistency(self):
        """Levanta `EvolutionError` se pernas pareadas divergirem."""
        for bond, weight in self.bond_weights.items():
            a = self.site_tensors[bond.site]
            b = self.site_tensors[bond.neighbor(self.cell)]
            dims = (
                a.shape[leg(bond.axis, 1)],
                b.shape[leg(bond.axis, -1)],
                len(weight),
            )
            if len(set(dims)) != 1:
                raise EvolutionError(
                    f'dimensões inconsistentes na ligação {bond}: {dims}'
                )
            if dims[0] > self.d_max:
                raise EvolutionError(
                    f'ligação {bond} com D={dims[0]} > d_max={self.d_max}'
                )


def init_random(cell: UnitCell, seed: int, d_max: int = 1) -> IpepsState:
    """Estado produto D=1 com amplitudes reais uniformes em [0, 1)."""
    if any(n < 2 for n in cell.dims):
        raise CellTooSmallError(
            f'célula {cell.label}: a atualização exige >= 2 sítios por eixo'
        )
    rng = np.random.default_rng(seed)
    virtual = (1,) * (2 * cell.dimensionality)
    tensors = {
        site: Tensor(rng.random(2).reshape((2, *virtual)))
        for site in cell.sites
    }
    weights = {bond: np.ones(1) for bond in cell.bonds}
    return IpepsState(cell, tensors, weights, d_max=d_max, seed=seed)


def _scale_leg(t: Tensor, axis: int, vec: np.ndarray) -> Tensor:
    shape = [1] * t.rank
    shape[axis] = len(vec)
    return Tensor(t.data * np.reshape(vec, shape))


def _absorb(
    state: IpepsState, site: Site, skip: int | None, power: float
) -> Tensor:
    """Tensor do sítio com λ**power em todas as pernas exceto `skip`."""
    t = state.site_tensors[site]
    for leg_index, bond in state.cell.incident(site):
        if leg_index == skip:
            continue
        t = _scale_leg(t, leg_index, state.bond_weights[bond] ** power)
    return t


def _inverse(order: Sequence[int]) -> list[int]:
    return [int(i) for i in np.argsort(order)]


def apply_gate_to_pair(
    a: Tensor,
    leg_a: int,
    b: Tensor,
    leg_b: int,
    weight: np.ndarray,
    gate: Tensor,
    d_max: int,
    rel_cutoff: float = WEIGHT_CUTOFF,
) -> tuple[Tensor, Tensor, np.ndarray, float]:
    """Aplica `gate` ao par (a, b) ligado por a[leg_a]-weight-b[leg_b].

    Os ambientes já devem estar absorvidos em `a` e `b`. Cada lado é
    reduzido por QR ao fator que toca a ligação; a porta age em
    θ = R_a·diag(weight)·R_b, truncado para no máximo `d_max`.

    Devolve (novo a, novo b, pesos normalizados, erro de truncagem).
    """
    others_a = [i for i in range(1, a.rank) if i != leg_a]
    others_b = [i for i in range(1, b.rank) if i != leg_b]
    order_a = [*others_a, 0, leg_a]
    order_b = [leg_b, 0, *others_b]
    dims_a = [a.shape[i] for i in others_a]
    dims_b = [b.shape[i] for i in others_b]
    da, db = a.shape[leg_a], b.shape[leg_b]
    if not da == db == len(weight):
        raise EvolutionError(
            f'dimensões da ligação divergem: {da}, {db}, {len(weight)}'
        )

    mat_a = permute(a, order_a).reshape((prod(dims_a), 2 * da))
    q_a, r_a = qr_split(mat_a)
    mat_b = permute(b, order_b).reshape((2 * db, prod(dims_b)))
    q_bt, r_bt = qr_split(permute(mat_b, [1, 0]))
    ra, rb = r_a.shape[0], r_bt.shape[0]

    r_a = _scale_leg(r_a.reshape((ra, 2, da)), 2, weight)
    l_b = permute(r_bt, [1, 0]).reshape((db, 2, rb))
    theta = contract(r_a, [2], l_b, [0])  # (ra, s, t, rb)
    theta = contract(gate, [2, 3], theta, [1, 2])  # (s', t', ra, rb)
    theta = permute(theta, [2, 0, 1, 3]).reshape((ra * 2, 2 * rb))

    svd = svd_truncate(theta, d_max, rel_cutoff)
    s = np.asarray(svd.singular_values)
    chi = svd.kept

    new_a = contract(q_a, [1], svd.left.reshape((ra, 2 * chi)), [0])
    new_a = permute(new_a.reshape((*dims_a, 2, chi)), _inverse(order_a))
    q_b = permute(q_bt, [1, 0])
    new_b = contract(svd.right.reshape((chi * 2, rb)), [1], q_b, [0])
    new_b = permute(new_b.reshape((chi, 2, *dims_b)), _inverse(order_b))

    return new_a, new_b, s / s[0], svd.truncation_error


def simple_update_step(
    state: IpepsState, gate: TrotterGate, bond: Bond
) -> IpepsState:
    """Atualiza uma ligação no próprio `state` e o devolve."""
    if bond not in state.bond_weights:
        raise BondNotFoundError(f'{bond} não pertence à célula')
    cell = state.cell
    site_a, site_b = bond.site, bond.neighbor(cell)
    leg_a, leg_b = leg(bond.axis, 1), leg(bond.axis, -1)

    a = _absorb(state, site_a, leg_a, 1.0)
    b = _absorb(state, site_b, leg_b, 1.0)
    new_a, new_b, weight, error = apply_gate_to_pair(
        a, leg_a, b, leg_b, state.bond_weights[bond], gate.matrix,
        state.d_max,
    )

    state.bond_weights[bond] = weight
    state.site_tensors[site_a] = new_a
    state.site_tensors[site_b] = new_b
    for site, skip in ((site_a, leg_a), (site_b, leg_b)):
        t = _absorb(state, site, skip, -1.0)
        state.site_tensors[site] = t * (1.0 / t.max_abs())
    state.truncation_error = max(state.truncation_error, error)
    return state


def sweep(
    state: IpepsState, gate: TrotterGate, reverse: bool = False
) -> IpepsState:
    """Uma porta por ligação na ordem de `UnitCell.sweep_order`.

    `reverse` percorre a ordem de trás para frente; alternar o sentido a
    cada passo compõe pares palíndromos (x y | y x), de segunda ordem em
    dtau.
    """
    state.truncation_error = 0.0
    order = state.cell.sweep_order()
    for bond in reversed(order) if reverse else order:
        simple_update_step(state, gate, bond)
    state.tau += gate.dtau
    return state


# ===== VALORES ESPERADOS =====


def pair_expectation(
    a: Tensor,
    leg_a: int,
    b: Tensor,
    leg_b: int,
    weight: np.ndarray,
    op: Tensor,
) -> complex:
    """⟨op⟩ no par (a, b) com o ambiente já absorvido nas outras pernas."""
    if op.shape != (2, 2, 2, 2):
        raise ShapeMismatchError(
            f'operador de dois sítios com forma {op.shape}'
        )
    others_a = [i for i in range(1, a.rank) if i != leg_a]
    others_b = [i for i in range(1, b.rank) if i != leg_b]
    m_a = contract(a, others_a, a.conj(), others_a)  # (s, α, s', α')
    w2 = np.outer(weight, weight)
    m_a = Tensor(m_a.data * w2[None, :, None, :])
    m_b = contract(b, others_b, b.conj(), others_b)  # (t, β, t', β')
    rho = contract(m_a, [1, 3], m_b, [1, 3])  # (s, s', t, t')
    rho = permute(rho, [0, 2, 1, 3]).data.reshape(4, 4)
    return complex(np.trace(op.data.reshape(4, 4) @ rho) / np.trace(rho))


def expect_local(
    state: IpepsState,
    op: Tensor,
    sites: Sequence[Site],
    bond: Bond | None = None,
) -> complex:
    """⟨op⟩ com ambientes de atualização simples (λ nas pernas soltas).

    Para dois sítios, `bond` escolhe entre ligações paralelas (L = 2);
    sem ela usa a primeira ligação entre os sítios.
    """
    sites = [tuple(s) for s in sites]
    cell = state.cell
    if len(sites) == 1:
        if op.shape != (2, 2):
            raise ShapeMismatchError(
                f'operador de um sítio com forma {op.shape}'
            )
        t = _absorb(state, sites[0], None, 1.0)
        virtual = list(range(1, t.rank))
        rho = contract(t, virtual, t.conj(), virtual).data
        return complex(np.trace(op.data @ rho) / np.trace(rho))

    if len(sites) != 2:  # noqa: PLR2004
        raise ShapeMismatchError(f'{len(sites)} sítios; esperado 1 ou 2')
    if bond is None:
        candidates = cell.bonds_between(sites[0], sites[1])
        if not candidates:
            raise NotAdjacentError(f'{sites[0]} e {sites[1]} não são vizinhos')
        bond = candidates[0]
    pair = (bond.site, bond.neighbor(cell))
    if set(sites) != set(pair) or sites[0] == sites[1]:
        raise NotAdjacentError(f'{sites} não são os extremos de {bond}')
    if sites[0] != pair[0]:
        op = permute(op, [1, 0, 3, 2])

    leg_a, leg_b = leg(bond.axis, 1), leg(bond.axis, -1)
    a = _absorb(state, pair[0], leg_a, 1.0)
    b = _absorb(state, pair[1], leg_b, 1.0)
    return pair_expectation(
        a, leg_a, b, leg_b, state.bond_weights[bond], op
    )


def evaluate_commutator(
    state: IpepsState,
    terms: Sequence[CommutatorTerm],
    cache: dict | None = None,
) -> complex:
    """Σ prefactor·⟨operator⟩ sobre os termos.

    `cache` reaproveita valores esperados entre momentos avaliados no mesmo
    estado; deve ser descartado depois de cada passo.
    """
    cache = {} if cache is None else cache
    total = 0j
    for term in terms:
        if term.prefactor == 0:
            continue
        key = (term.sites, term.bond, term.operator.data.tobytes())
        if key not in cache:
            cache[key] = expect_local(
                state, term.operator, term.sites, term.bond
            )
        total += term.prefactor * cache[key]
    return total


def energy_per_site(state: IpepsState, params: TfimParams) -> float:
    h = bond_hamiltonian(params)
    total = sum(
        expect_local(
            state, h, (bond.site, bond.neighbor(state.cell)), bond
        ).real
        for bond in state.cell.bonds
    )
    return total / len(state.cell.sites)


def magnetization(state: IpepsState) -> float:
    """Média de ⟨σz⟩ sobre os sítios da célula."""
    z = Tensor(SIGMA_Z)
    values = [expect_local(state, z, [s]).real for s in state.cell.sites]
    return float(np.mean(values))


# ===== CHECKPOINT =====


def save_checkpoint(state: IpepsState, path: str | Path) -> Path:
    """Grava o estado num único `.npz` com cabeçalho JSON."""
    path = Path(path)
    sites = list(state.cell.sites)
    bonds = list(state.cell.bonds)
    meta = {
        'version': CHECKPOINT_VERSION,
        'dims': list(state.cell.dims),
        'd_max': state.d_max,
        'tau': state.tau,
        'seed': state.seed,
        'sites': [list(s) for s in sites],
        'bonds': [[list(b.site), b.axis] for b in bonds],
        'shapes': [list(state.site_tensors[s].shape) for s in sites],
    }
    arrays = {'meta': np.array(json.dumps(meta))}
    for i, site in enumerate(sites):
        arrays[f'site_{i}'] = np.asarray(state.site_tensors[site].data)
    for i, bond in enumerate(bonds):
        arrays[f'bond_{i}'] = np.asarray(state.bond_weights[bond])
    with path.open('wb') as fh:
        np.savez(fh, **arrays)
    logger.debug('checkpoint gravado em %s (tau=%.4f)', path, state.tau)
    return path


def load_checkpoint(path: str | Path) -> IpepsState:
    with np.load(Path(path), allow_pickle=False) as archive:
        meta = json.loads(str(archive['meta']))
        cell = UnitCell(tuple(meta['dims']))
        tensors = {
            tuple(site): Tensor(archive[f'site_{i}'])
            for i, site in enumerate(meta['sites'])
        }
        weights = {
            Bond(tuple(site), axis): np.array(archive[f'bond_{i}'])
            for i, (site, axis) in enumerate(meta['bonds'])
        }
    state = IpepsState(
        cell,
        tensors,
        weights,
        d_max=meta['d_max'],
        tau=meta['tau'],
        seed=meta['seed'],
    )
    state.check_consistency()
    return state
