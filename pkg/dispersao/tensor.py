"""Álgebra densa de tensores complexos.

O `Tensor` é o portador numérico de todo o pacote: tensores de sítio do
iPEPS, matrizes de Pauli, portas de Trotter e densidades reduzidas.
Os dados ficam num `numpy.ndarray` complexo somente-leitura (ordem
row-major); todas as operações públicas devolvem tensores novos e validam
que nenhum elemento é NaN/Inf.

A contração é reduzida a um único produto de matrizes: permutamos os eixos
livres para a frente (em `a`) e para trás (em `b`), remodelamos e
multiplicamos.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np
from scipy import linalg

from dispersao.exceptions import (
    AxisIndexError,
    DecompositionError,
    InvalidPermutationError,
    NonFiniteError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)

DTYPE = np.complex128


@dataclass(frozen=True, eq=False)
class Tensor:
    """Tensor denso complexo imutável.

    @Attributes
        data: array complexo somente-leitura; `shape` e a ordem row-major
            do array definem o layout plano.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=DTYPE, copy=True)
        if 0 in arr.shape:
            raise ShapeMismatchError(
                f'dimensões devem ser positivas: {arr.shape}'
            )
        if not np.isfinite(arr).all():
            raise NonFiniteError('tensor contém NaN ou Inf')
        arr.setflags(write=False)
        object.__setattr__(self, 'data', arr)

    @classmethod
    def from_flat(cls, shape: Sequence[int], flat: Sequence[complex]):
        shape = tuple(int(n) for n in shape)
        if prod(shape) != len(flat):
            raise ShapeMismatchError(
                f'produto de {shape} difere de {len(flat)} elementos'
            )
        return cls(np.asarray(flat, dtype=DTYPE).reshape(shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.data.ravel()

    def reshape(self, shape: Sequence[int]) -> Tensor:
        shape = tuple(int(n) for n in shape)
        if prod(shape) != self.data.size:
            raise ShapeMismatchError(
                f'não é possível remodelar {self.shape} em {shape}'
            )
        return Tensor(self.data.reshape(shape))

    def conj(self) -> Tensor:
        return Tensor(self.data.conj())

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def max_abs(self) -> float:
        return float(np.abs(self.data).max())

    def __add__(self, other: Tensor) -> Tensor:
        if self.shape != other.shape:
            raise ShapeMismatchError(
                f'soma de formas diferentes: {self.shape} e {other.shape}'
            )
        return Tensor(self.data + other.data)

    def __sub__(self, other: Tensor) -> Tensor:
        return self + (-1.0) * other

    def __mul__(self, alpha: complex) -> Tensor:
        return Tensor(self.data * complex(alpha))

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        return self * -1.0


@dataclass(frozen=True)
class SvdResult:
    """Resultado de `svd_truncate`.

    `left` (m×χ) e `right` (χ×n) são isometrias; `singular_values` estão em
    ordem decrescente; `truncation_error` é o peso relativo descartado
    sqrt(Σ_desc s² / Σ s²).
    """

    left: Tensor
    singular_values: np.ndarray
    right: Tensor
    truncation_error: float

    @property
    def kept(self) -> int:
        return len(self.singular_values)


def identity(n: int) -> Tensor:
    return Tensor(np.eye(n))


def _check_axes(t: Tensor, axes: Sequence[int], name: str):
    for ax in axes:
        if not 0 <= ax < t.rank:
            raise AxisIndexError(
                f'eixo {ax} fora do intervalo para {name} de ordem {t.rank}'
            )
    if len(set(axes)) != len(axes):
        raise AxisIndexError(f'eixos repetidos em {name}: {list(axes)}')


def contract(
    a: Tensor,
    axes_a: Sequence[int],
    b: Tensor,
    axes_b: Sequence[int],
) -> Tensor:
    """Contrai `a` e `b` sobre os pares (axes_a[i], axes_b[i]).

    Os eixos restantes saem na ordem: livres de `a`, depois livres de `b`.
    """
    axes_a = [int(x) for x in axes_a]
    axes_b = [int(x) for x in axes_b]
    if len(axes_a) != len(axes_b):
        raise ShapeMismatchError(
            f'listas de eixos com tamanhos diferentes: {axes_a} e {axes_b}'
        )
    _check_axes(a, axes_a, 'a')
    _check_axes(b, axes_b, 'b')
    for ax, bx in zip(axes_a, axes_b):
        if a.shape[ax] != b.shape[bx]:
            raise ShapeMismatchError(
                f'par de eixos ({ax}, {bx}) com dimensões '
                f'{a.shape[ax]} != {b.shape[bx]}'
            )

    free_a = [i for i in range(a.rank) if i not in axes_a]
    free_b = [i for i in range(b.rank) if i not in axes_b]
    shape_free_a = [a.shape[i] for i in free_a]
    shape_free_b = [b.shape[i] for i in free_b]
    inner = prod(a.shape[i] for i in axes_a)

    mat_a = np.transpose(a.data, free_a + axes_a).reshape(-1, inner)
    mat_b = np.transpose(b.data, axes_b + free_b).reshape(inner, -1)
    out = mat_a @ mat_b
    return Tensor(out.reshape(shape_free_a + shape_free_b))


def permute(a: Tensor, order: Sequence[int]) -> Tensor:
    order = [int(x) for x in order]
    if sorted(order) != list(range(a.rank)):
        raise InvalidPermutationError(
            f'{order} não é permutação de 0..{a.rank - 1}'
        )
    return Tensor(np.transpose(a.data, order))


def svd_truncate(
    m: Tensor, d_max: int, rel_cutoff: float = 0.0
) -> SvdResult:
    """SVD truncada de uma matriz.

    Mantém os min(d_max, min(m.shape)) maiores valores singulares; se
    `rel_cutoff` > 0, também descarta os menores que rel_cutoff·s_max
    (sempre sobra ao menos um).
    """
    if m.rank != 2:
        raise ShapeMismatchError(
            f'svd_truncate espera matriz, recebeu ordem {m.rank}'
        )
    if d_max < 1:
        raise ValueError(f'd_max deve ser >= 1, recebeu {d_max}')

    try:
        u, s, vh = linalg.svd(
            m.data, full_matrices=False, lapack_driver='gesdd'
        )
    except linalg.LinAlgError:
        logger.warning('gesdd não convergiu; tentando gesvd')
        try:
            u, s, vh = linalg.svd(
                m.data, full_matrices=False, lapack_driver='gesvd'
            )
        except linalg.LinAlgError as exc:
            raise DecompositionError(f'SVD não convergiu: {exc}') from exc

    keep = min(d_max, len(s))
    if rel_cutoff > 0 and s[0] > 0:
        keep = min(keep, max(1, int(np.count_nonzero(s > rel_cutoff * s[0]))))

    total = float(np.sum(s**2))
    if total > 0:
        error = float(np.sqrt(np.sum(s[keep:] ** 2) / total))
    else:
        error = 0.0

    kept = np.array(s[:keep], dtype=float)
    kept.setflags(write=False)
    return SvdResult(
        left=Tensor(u[:, :keep]),
        singular_values=kept,
        right=Tensor(vh[:keep, :]),
        truncation_error=min(error, 1.0),
    )


def qr_split(m: Tensor) -> tuple[Tensor, Tensor]:
    """QR econômica: m = Q·R com Q isometria (m×r), r = min(m.shape)."""
    if m.rank != 2:
        raise ShapeMismatchError(
            f'qr_split espera matriz, recebeu ordem {m.rank}'
        )
    try:
        q, r = linalg.qr(m.data, mode='economic')
    except linalg.LinAlgError as exc:
        raise DecompositionError(f'QR falhou: {exc}') from exc
    return Tensor(q), Tensor(r)
