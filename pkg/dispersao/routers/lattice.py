from fastapi import APIRouter

from dispersao.exceptions import LatticeError
from dispersao.lattice import MAX_CELL_SIZE, UnitCell, momentum_grid
from dispersao.schemas import GridPublic, MomentumPublic

router = APIRouter(prefix='/lattice', tags=['Rede'])


@router.get('/grid', response_model=GridPublic)
def lattice_grid(dims: str):
    """Momentos comensuráveis de uma célula, ex.: `dims=4,4`."""
    try:
        sizes = tuple(int(n) for n in dims.split(','))
    except ValueError as exc:
        raise LatticeError(f'dims inválido: {dims!r}') from exc
    if any(n > MAX_CELL_SIZE for n in sizes):
        raise LatticeError(f'células limitadas a {MAX_CELL_SIZE} por eixo')
    cell = UnitCell(sizes)
    return GridPublic(
        dims=list(cell.dims),
        momenta=[
            MomentumPublic(components=list(k.components), label=k.label)
            for k in momentum_grid(cell)
        ],
    )
