"""Interface de linha de comando: `dispersion`, `converge` e `oracle`.

Códigos de saída: 0 sucesso, 2 configuração inválida, 3 falha numérica.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import typer

from dispersao.config import load_config
from dispersao.dispersion import compute_curve
from dispersao.exceptions import NUMERICAL_ERRORS, ConfigError, LatticeError
from dispersao.log import configure_logging
from dispersao.outputs import (
    write_convergence_csv,
    write_convergence_json,
    write_curve_csv,
    write_curve_json,
    write_series_csv,
    write_traces,
)
from dispersao.plots import plot_convergence, plot_curve
from dispersao.schemas import (
    ConvergenceReport,
    ConvergenceRow,
    FitPoint,
    Provenance,
    RunConfig,
)
from dispersao.series import (
    SeriesSpec,
    series_curve,
    series_delta,
    series_reference,
    series_valid,
)
from dispersao.settings import Settings, get_settings
from dispersao.utils import (
    dedupe,
    now,
    package_version,
    resolve_momenta,
    run_parallel,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# amostras por segmento da série de referência nas figuras
SERIES_SAMPLES = 20

app = typer.Typer(
    help='Relações de dispersão do Ising em campo transverso via iPEPS.',
    no_args_is_help=True,
)


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _warn_points(points: List[FitPoint]):
    for p in points:
        name = p.k_label or str(p.components)
        if p.status == 'no_plateau':
            logger.warning('%s: ajuste sem platô (melhor esforço)', name)
        if p.series_valid is False:
            logger.warning('%s: referência fora da validade da série', name)


# ===== COMANDOS =====


def cmd_dispersion(
    config: RunConfig, settings: Optional[Settings] = None
) -> int:
    settings = settings or get_settings()
    params = config.model
    route = resolve_momenta(
        config.momenta, params.dimensionality, unique=False
    )
    ks = dedupe(route)
    out = _output_dir(config)

    curve = compute_curve(
        params,
        config.evolution,
        ks,
        config.cell_policy,
        config.plateau.rel_tol,
        config.plateau.min_frac,
        settings.WORKERS,
    )
    if not config.oracle:
        curve = curve.model_copy(
            update={
                'points': [
                    p.model_copy(
                        update={'series_ref': None, 'series_valid': None}
                    )
                    for p in curve.points
                ]
            }
        )
    write_curve_csv(curve, out / 'curve.csv')
    write_curve_json(curve, out / 'curve.json')
    if config.output.traces:
        write_traces(curve, out / 'traces')
    if config.output.svg:
        rows = None
        if config.oracle and len(route) > 1:
            rows = series_curve(
                SeriesSpec.for_params(params), route, SERIES_SAMPLES
            )
        plot_curve(curve, out / 'curve.svg', rows, route)

    _warn_points(curve.points)
    if curve.failed:
        for p in curve.failed:
            logger.error(
                'falha em %s: %s', p.k_label or p.components, p.message
            )
        return EXIT_NUMERICAL
    logger.info('curva gravada em %s', out)
    return EXIT_OK


def _converge_job(job) -> FitPoint:
    config, d, seed, k, workers = job
    ev = config.evolution.model_copy(update={'d_max': d, 'seed': seed})
    curve = compute_curve(
        config.model,
        ev,
        [k],
        config.cell_policy,
        config.plateau.rel_tol,
        config.plateau.min_frac,
        workers,
    )
    return curve.points[0]


def _convergence_row(d: int, points: List[FitPoint]) -> ConvergenceRow:
    values = [p.delta for p in points]
    valid = np.array([v for v in values if v is not None])
    mean = float(valid.mean()) if len(valid) else None
    # com uma tentativa o desvio fica 0 e marcado como indefinido
    std_defined = len(valid) > 1
    std = float(valid.std(ddof=1)) if std_defined else 0.0
    return ConvergenceRow(
        d=d,
        values=values,
        mean=mean,
        std=std,
        std_defined=std_defined,
        trials=len(points),
    )


def cmd_converge(
    config: RunConfig, settings: Optional[Settings] = None
) -> int:
    settings = settings or get_settings()
    params = config.model
    d_values = list(config.d_values)
    if not d_values:
        raise ConfigError('converge exige ao menos um valor de D')
    if d_values != sorted(set(d_values)):
        raise ConfigError(f'valores de D devem ser crescentes: {d_values}')
    ks = resolve_momenta(config.momenta, params.dimensionality)
    if len(ks) != 1:
        raise ConfigError(
            f'converge exige exatamente um momento (recebeu {len(ks)})'
        )
    k = ks[0]
    out = _output_dir(config)
    started = now()

    seeds = [config.evolution.seed + t for t in range(config.trials)]
    jobs = [(config, d, seed, k, 1) for d in d_values for seed in seeds]
    points = run_parallel(_converge_job, jobs, settings.WORKERS)

    rows = []
    for i, d in enumerate(d_values):
        chunk = points[i * len(seeds) : (i + 1) * len(seeds)]
        rows.append(_convergence_row(d, chunk))
        logger.info('D=%d: média %s', d, rows[-1].mean)

    reference, valid = series_reference(params, k)
    report = ConvergenceReport(
        params=params,
        k_label=k.label,
        components=list(k.components),
        unit=params.unit,
        d_values=d_values,
        rows=rows,
        reference=reference if config.oracle else None,
        reference_valid=valid if config.oracle else None,
        provenance=Provenance(
            seed=config.evolution.seed,
            started_at=started,
            finished_at=now(),
            version=package_version(),
            workers=settings.WORKERS,
        ),
    )
    write_convergence_csv(report, out / 'converge.csv')
    write_convergence_json(report, out / 'converge.json')
    if config.output.svg:
        plot_convergence(report, out / 'converge.svg')

    failed = [p for p in points if p.status == 'failed']
    for p in failed:
        logger.error('falha em %s: %s', k.display, p.message)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_oracle(
    config: RunConfig, samples_per_segment: int = SERIES_SAMPLES
) -> int:
    params = config.model
    spec = SeriesSpec.for_params(params)
    ks = resolve_momenta(config.momenta, params.dimensionality, unique=False)
    if len(ks) == 1:
        rows = [(0.0, ks[0], series_delta(spec, ks[0]))]
    else:
        rows = series_curve(spec, ks, samples_per_segment)
    if not series_valid(spec):
        logger.warning(
            'acoplamento %.4g fora da validade da série', spec.coupling
        )
    out = _output_dir(config)
    write_series_csv(rows, params.dimensionality, out / 'series.csv')
    logger.info('série gravada em %s', out / 'series.csv')
    return EXIT_OK


# ===== TYPER =====


def _overrides(  # noqa: PLR0913, PLR0917
    *,
    out: Optional[Path] = None,
    j: Optional[float] = None,
    g: Optional[float] = None,
    dimensionality: Optional[int] = None,
    seed: Optional[int] = None,
    d: Optional[int] = None,
    dtau: Optional[float] = None,
    max_steps: Optional[int] = None,
    trials: Optional[int] = None,
    svg: bool = False,
    path: bool = False,
    k: Optional[List[str]] = None,
    grid: Optional[str] = None,
) -> Dict[str, Any]:
    chosen = [bool(path), bool(k), grid is not None]
    if sum(chosen) > 1:
        raise ConfigError('use apenas uma entre --path, --k e --grid')
    momenta: Dict[str, Any] = {}
    if path:
        momenta = {'kind': 'path', 'points': []}
    elif k:
        momenta = {'kind': 'list', 'points': list(k)}
    elif grid is not None:
        try:
            dims = [int(x) for x in grid.split(',')]
        except ValueError as exc:
            raise ConfigError(f'--grid inválido: {grid!r}') from exc
        momenta = {'kind': 'grid', 'grid': dims}
    return {
        'model': {'j': j, 'g': g, 'dimensionality': dimensionality},
        'evolution': {
            'seed': seed,
            'd_max': d,
            'dtau': dtau,
            'max_steps': max_steps,
        },
        'trials': trials,
        'output': {
            'directory': str(out) if out is not None else None,
            'svg': True if svg else None,
        },
        'momenta': momenta or None,
    }


def _defaults(settings: Settings) -> Dict[str, Any]:
    return {
        'output': {'directory': settings.OUTPUT_DIR},
        'plateau': {
            'rel_tol': settings.PLATEAU_REL_TOL,
            'min_frac': settings.PLATEAU_MIN_FRAC,
        },
    }


def _run(build, command) -> int:
    try:
        return command(build())
    except NUMERICAL_ERRORS as exc:
        typer.echo(f'falha numérica: {exc}', err=True)
        return EXIT_NUMERICAL
    except (ConfigError, LatticeError, ValueError) as exc:
        typer.echo(f'erro de configuração: {exc}', err=True)
        return EXIT_CONFIG


ConfigOpt = typer.Option(None, '--config', help='Arquivo TOML de execução.')
OutOpt = typer.Option(None, '--out', help='Diretório de saída.')
SeedOpt = typer.Option(None, '--seed')
DtauOpt = typer.Option(None, '--dtau')
JOpt = typer.Option(None, '--j', help='Acoplamento de Ising J.')
GOpt = typer.Option(None, '--g', help='Campo transverso g.')
DimOpt = typer.Option(None, '--dim', help='Dimensionalidade (2 ou 3).')
StepsOpt = typer.Option(None, '--max-steps')
SvgOpt = typer.Option(False, '--svg', help='Gravar figura SVG.')
PathOpt = typer.Option(False, '--path', help='Caminho de alta simetria.')
KOpt = typer.Option(None, '--k', help="Momento explícito ('X', 'pi,0').")
GridOpt = typer.Option(None, '--grid', help="Grade da célula ('4,4').")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, '--log-level'),
):
    configure_logging(log_level or get_settings().LOG_LEVEL)


@app.command()
def dispersion(  # noqa: PLR0913, PLR0917
    config: Optional[Path] = ConfigOpt,
    out: Optional[Path] = OutOpt,
    seed: Optional[int] = SeedOpt,
    d: Optional[int] = typer.Option(None, '--d', help='Dimensão D.'),
    dtau: Optional[float] = DtauOpt,
    max_steps: Optional[int] = StepsOpt,
    j: Optional[float] = JOpt,
    g: Optional[float] = GOpt,
    dim: Optional[int] = DimOpt,
    svg: bool = SvgOpt,
    path: bool = PathOpt,
    k: Optional[List[str]] = KOpt,
    grid: Optional[str] = GridOpt,
):
    """Curva de dispersão: curve.csv, curve.json, traces/ e curve.svg."""
    settings = get_settings()

    def build():
        overrides = _overrides(
            out=out, j=j, g=g, dimensionality=dim, seed=seed, d=d,
            dtau=dtau, max_steps=max_steps, svg=svg, path=path, k=k,
            grid=grid,
        )
        return load_config(config, overrides, _defaults(settings))

    code = _run(build, lambda cfg: cmd_dispersion(cfg, settings))
    raise typer.Exit(code)


@app.command()
def converge(  # noqa: PLR0913, PLR0917
    config: Optional[Path] = ConfigOpt,
    out: Optional[Path] = OutOpt,
    seed: Optional[int] = SeedOpt,
    d: Optional[List[int]] = typer.Option(
        None, '--d', help='Valores de D (repita a opção).'
    ),
    dtau: Optional[float] = DtauOpt,
    max_steps: Optional[int] = StepsOpt,
    trials: Optional[int] = typer.Option(None, '--trials'),
    j: Optional[float] = JOpt,
    g: Optional[float] = GOpt,
    dim: Optional[int] = DimOpt,
    svg: bool = SvgOpt,
    k: Optional[List[str]] = KOpt,
):
    """Convergência em D de um único momento: converge.csv/.json/.svg."""
    settings = get_settings()

    def build():
        overrides = _overrides(
            out=out, j=j, g=g, dimensionality=dim, seed=seed, dtau=dtau,
            max_steps=max_steps, trials=trials, svg=svg, k=k,
        )
        overrides['d_values'] = list(d) if d else None
        return load_config(config, overrides, _defaults(settings))

    code = _run(build, lambda cfg: cmd_converge(cfg, settings))
    raise typer.Exit(code)


@app.command()
def oracle(  # noqa: PLR0913, PLR0917
    config: Optional[Path] = ConfigOpt,
    out: Optional[Path] = OutOpt,
    j: Optional[float] = JOpt,
    g: Optional[float] = GOpt,
    dim: Optional[int] = DimOpt,
    samples: int = typer.Option(
        SERIES_SAMPLES, '--samples', help='Amostras por segmento.'
    ),
    path: bool = PathOpt,
    k: Optional[List[str]] = KOpt,
):
    """Série de referência ao longo do caminho ou nos pontos dados."""
    settings = get_settings()

    def build():
        overrides = _overrides(
            out=out, j=j, g=g, dimensionality=dim, path=path, k=k
        )
        return load_config(config, overrides, _defaults(settings))

    code = _run(build, lambda cfg: cmd_oracle(cfg, samples))
    raise typer.Exit(code)
