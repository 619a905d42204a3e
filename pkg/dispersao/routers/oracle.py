from fastapi import APIRouter, Query

from dispersao.lattice import (
    high_symmetry_path,
    parse_momentum,
    path_positions,
)
from dispersao.schemas import (
    MomentumPublic,
    OracleDeltaPublic,
    OraclePathPublic,
    PathSample,
    PathVertex,
    Phase,
)
from dispersao.series import (
    SeriesSpec,
    series_curve,
    series_delta,
    series_valid,
)

router = APIRouter(prefix='/oracle', tags=['Série'])


@router.get('/delta', response_model=OracleDeltaPublic)
def oracle_delta(
    k: str,
    phase: Phase,
    coupling: float = Query(ge=0),
    dimensionality: int = Query(default=2, ge=2, le=3),
):
    """Δ_k da série truncada num único momento.

    `k` aceita rótulos (G, X, M, S, R) ou componentes ('pi,0').
    """
    spec = SeriesSpec(dimensionality, phase, coupling)
    momentum = parse_momentum(k, dimensionality)
    return OracleDeltaPublic(
        dimensionality=dimensionality,
        phase=phase,
        coupling=coupling,
        order=spec.order,
        k=MomentumPublic(
            components=list(momentum.components), label=momentum.label
        ),
        delta=series_delta(spec, momentum),
        valid=series_valid(spec),
    )


@router.get('/path', response_model=OraclePathPublic)
def oracle_path(
    phase: Phase,
    coupling: float = Query(ge=0),
    dimensionality: int = Query(default=2, ge=2, le=3),
    samples: int = Query(default=20, ge=2, le=500),
):
    """Série amostrada ao longo do caminho de alta simetria padrão."""
    spec = SeriesSpec(dimensionality, phase, coupling)
    path = high_symmetry_path(dimensionality)
    rows = series_curve(spec, path, samples)
    return OraclePathPublic(
        dimensionality=dimensionality,
        phase=phase,
        coupling=coupling,
        order=spec.order,
        valid=series_valid(spec),
        vertices=[
            PathVertex(label=k.label, position=x)
            for k, x in zip(path, path_positions(path))
        ],
        points=[
            PathSample(position=x, components=list(k.components), delta=d)
            for x, k, d in rows
        ],
    )
