import logging
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from importlib.metadata import PackageNotFoundError, version
from typing import Callable, Iterable, List, Sequence, TypeVar
from zoneinfo import ZoneInfo

from dispersao.lattice import (
    Momentum,
    UnitCell,
    high_symmetry_path,
    momentum_grid,
    parse_momentum,
)
from dispersao.schemas import MomentaSpec

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

UTC = ZoneInfo('UTC')


def now() -> datetime:
    return datetime.now(UTC)


def package_version() -> str:
    try:
        return version('dispersao')
    except PackageNotFoundError:
        return '0.0.0+local'


def format_number(x: float | None) -> str:
    """9 algarismos significativos; vazio para ausente."""
    if x is None:
        return ''
    return f'{x:.9g}'


def dedupe(ks: Iterable[Momentum]) -> List[Momentum]:
    """Remove momentos repetidos (módulo 2π) preservando a ordem."""
    out: List[Momentum] = []
    for k in ks:
        if k not in out:
            out.append(k)
    return out


def resolve_momenta(
    spec: MomentaSpec, dimensionality: int, unique: bool = True
) -> List[Momentum]:
    """Lista de momentos pedida pela configuração.

    'path' usa o caminho de alta simetria padrão, ou `points` quando dado.
    Com `unique` os vértices repetidos (Γ ... Γ) aparecem uma só vez; sem
    ele o caminho volta inteiro, com os trechos de retorno.
    """
    if spec.kind == 'grid':
        if len(spec.grid) != dimensionality:
            raise ValueError(
                f'grade {spec.grid} não tem {dimensionality} dimensões'
            )
        return momentum_grid(UnitCell(tuple(spec.grid)))
    if spec.points:
        ks = [parse_momentum(p, dimensionality) for p in spec.points]
    else:
        ks = high_symmetry_path(dimensionality)
    return dedupe(ks) if unique else ks


def run_parallel(
    fn: Callable[[T], R], jobs: Sequence[T], workers: int = 1
) -> List[R]:
    """`map` em processo único ou num pool de `workers` processos.

    A ordem dos resultados segue a dos `jobs`.
    """
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    n = min(workers, len(jobs))
    logger.info('distribuindo %d tarefas em %d processos', len(jobs), n)
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))
