"""Evolução em tempo imaginário com registro de C_k(τ) e extração de Δ_k.

C_k(τ) = ln|⟨φ(τ)|[H, O_k]|φ(τ)⟩| decai linearmente com inclinação −Δ_k
quando τ é grande. Uma única trajetória serve a todos os momentos de uma
célula: o estado não depende de k, só o observável.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from dispersao.exceptions import (
    NUMERICAL_ERRORS,
    FitError,
    TooFewSamplesError,
    WindowTooSmallError,
)
from dispersao.ipeps import (
    IpepsState,
    energy_per_site,
    evaluate_commutator,
    init_random,
    sweep,
)
from dispersao.lattice import Momentum, UnitCell, common_cell, minimal_cell_for
from dispersao.model import build_gate, commutator_terms
from dispersao.schemas import (
    DispersionCurve,
    EvolutionParams,
    FitPoint,
    Provenance,
    TfimParams,
)
from dispersao.series import series_reference
from dispersao.utils import dedupe, now, package_version, run_parallel

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 10
LOG_EVERY = 100
# fração do traço removida a cada nova tentativa de achar o platô
RETRY_TRIM = 0.05
# subdivisões da janela usadas na estimativa do erro sistemático
SPLIT_PARTS = (2, 3)


@dataclass(frozen=True)
class EvolutionTrace:
    """C_k(τ) amostrado após cada varredura.

    @Attributes
        k: momento
        tau: instantes n·dtau (crescentes, uniformes)
        c: ln|⟨[H, O_k]⟩| em cada instante
        values: ⟨[H, O_k]⟩ complexo em cada instante
        truncated_at: τ em que |⟨[H, O_k]⟩| caiu abaixo do piso
    """

    k: Momentum
    tau: np.ndarray
    c: np.ndarray
    values: np.ndarray | None = None
    truncated_at: float | None = None

    def __len__(self) -> int:
        return len(self.tau)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.tau.tolist(), self.c.tolist()))

    def head(self, n: int) -> EvolutionTrace:
        values = None if self.values is None else self.values[:n]
        return EvolutionTrace(self.k, self.tau[:n], self.c[:n], values)


@dataclass(frozen=True)
class FitResult:
    k: Momentum
    delta_k: float
    window: tuple[float, float]
    residual: float
    slope_std: float
    plateau_ok: bool
    intercept: float
    n_samples: int


def run_trace(
    params: TfimParams,
    ev: EvolutionParams,
    ks: Sequence[Momentum],
    cell: UnitCell,
    initial: IpepsState | None = None,
) -> list[EvolutionTrace]:
    """Uma trajetória; avalia todos os `ks` após cada varredura.

    O traço de um k é encerrado quando |⟨[H, O_k]⟩| < `ev.floor` (ou deixa
    de ser finito); a evolução para em `ev.max_steps` ou quando todos os
    traços se encerram.
    """
    terms = [commutator_terms(params, k, cell) for k in ks]
    if initial is None:
        state = init_random(cell, ev.seed, ev.d_max)
    else:
        state = initial.copy()
        state.d_max = ev.d_max
    gate = build_gate(params, ev.dtau)

    taus: list[list[float]] = [[] for _ in ks]
    cs: list[list[float]] = [[] for _ in ks]
    values: list[list[complex]] = [[] for _ in ks]
    truncated: list[float | None] = [None] * len(ks)
    active = list(range(len(ks)))

    logger.info(
        'trajetória: célula %s, %d momento(s), D=%d, dtau=%g',
        cell.label,
        len(ks),
        ev.d_max,
        ev.dtau,
    )
    for step in range(1, ev.max_steps + 1):
        sweep(state, gate, reverse=step % 2 == 0)
        tau = step * ev.dtau
        cache: dict = {}
        for i in list(active):
            value = evaluate_commutator(state, terms[i], cache)
            magnitude = abs(value)
            if not math.isfinite(magnitude) or magnitude < ev.floor:
                truncated[i] = tau
                active.remove(i)
                logger.debug('%s encerrado em tau=%.4f', ks[i].display, tau)
                continue
            taus[i].append(tau)
            cs[i].append(math.log(magnitude))
            values[i].append(value)

        logger.debug('passo %d tau=%.4f', step, tau)
        if step % LOG_EVERY == 0:
            logger.info(
                'tau=%.2f energia/sítio=%.8f D=%d ativos=%d',
                tau,
                energy_per_site(state, params),
                state.max_bond_dimension(),
                len(active),
            )
        if not active:
            break

    traces = []
    for i, k in enumerate(ks):
        if len(taus[i]) < MIN_FIT_SAMPLES:
            logger.warning(
                '%s: traço encerrado com %d amostra(s)',
                k.display,
                len(taus[i]),
            )
        traces.append(
            EvolutionTrace(
                k,
                np.array(taus[i], dtype=float),
                np.array(cs[i], dtype=float),
                np.array(values[i], dtype=complex),
                truncated[i],
            )
        )
    return traces


def numerical_derivative(trace: EvolutionTrace) -> np.ndarray:
    """C′_k(τ): diferenças centrais no interior, laterais nas pontas."""
    if len(trace) < 3:  # noqa: PLR2004
        raise TooFewSamplesError(
            f'{trace.k.display}: {len(trace)} amostras (mínimo 3)'
        )
    return np.gradient(trace.c, trace.tau, edge_order=2)


def detect_plateau(
    trace: EvolutionTrace, rel_tol: float = 1e-3, min_frac: float = 0.2
) -> tuple[float, float] | None:
    """Maior sufixo em que C′ varia menos que rel_tol·|mediana de C′|.

    O sufixo precisa cobrir ao menos `min_frac` do traço.
    """
    if not rel_tol > 0 or not 0 < min_frac < 1:
        raise ValueError('exige rel_tol > 0 e 0 < min_frac < 1')
    deriv = numerical_derivative(trace)
    n = len(deriv)
    min_len = max(3, math.ceil(min_frac * n))
    # máximos/mínimos de cada sufixo
    suffix_max = np.maximum.accumulate(deriv[::-1])[::-1]
    suffix_min = np.minimum.accumulate(deriv[::-1])[::-1]
    suffix_abs = np.maximum(np.abs(suffix_max), np.abs(suffix_min))
    for start in range(n - min_len + 1):
        spread = suffix_max[start] - suffix_min[start]
        if spread >= rel_tol * suffix_abs[start]:
            continue
        if spread < rel_tol * abs(np.median(deriv[start:])):
            return float(trace.tau[start]), float(trace.tau[-1])
    return None


def fit_slope(
    trace: EvolutionTrace,
    window: tuple[float, float],
    plateau_ok: bool = False,
) -> FitResult:
    """Mínimos quadrados de C sobre τ dentro da janela; Δ_k = −inclinação.

    `slope_std` soma em quadratura o erro padrão da regressão e a
    dispersão das inclinações ajustadas nas metades e nos terços da janela.
    """
    eps = 1e-9 * max(1.0, abs(window[1]))
    mask = (trace.tau >= window[0] - eps) & (trace.tau <= window[1] + eps)
    n = int(mask.sum())
    if n < MIN_FIT_SAMPLES:
        raise WindowTooSmallError(
            f'{trace.k.display}: janela com {n} amostras '
            f'(mínimo {MIN_FIT_SAMPLES})'
        )
    tau, c = trace.tau[mask], trace.c[mask]
    fit = stats.linregress(tau, c)
    residual = float(
        np.sqrt(np.mean((c - (fit.intercept + fit.slope * tau)) ** 2))
    )
    delta = -float(fit.slope)
    if plateau_ok and delta < 0:
        logger.warning(
            '%s: inclinação positiva no platô (%.6g)', trace.k.display, delta
        )
        plateau_ok = False
    return FitResult(
        k=trace.k,
        delta_k=delta,
        window=(float(tau[0]), float(tau[-1])),
        residual=residual,
        slope_std=float(np.hypot(fit.stderr, _split_spread(tau, c))),
        plateau_ok=plateau_ok,
        intercept=float(fit.intercept),
        n_samples=n,
    )


def _split_spread(tau: np.ndarray, c: np.ndarray) -> float:
    slopes = [
        stats.linregress(t, y).slope
        for parts in SPLIT_PARTS
        for t, y in zip(
            np.array_split(tau, parts), np.array_split(c, parts)
        )
    ]
    return float(np.std(slopes, ddof=1))


def fit_trace(
    trace: EvolutionTrace, rel_tol: float = 1e-3, min_frac: float = 0.2
) -> FitResult:
    """Procura o platô encurtando o traço aos poucos (o fim, perto do piso,
    acumula ruído de arredondamento); sem platô, ajusta a metade final."""
    n = len(trace)
    if n < MIN_FIT_SAMPLES:
        raise TooFewSamplesError(
            f'{trace.k.display}: {n} amostras (mínimo {MIN_FIT_SAMPLES})'
        )
    trim = max(1, int(RETRY_TRIM * n))
    length = n
    while length >= max(n // 2, MIN_FIT_SAMPLES):
        sub = trace.head(length)
        window = detect_plateau(sub, rel_tol, min_frac)
        if window is not None:
            try:
                return fit_slope(sub, window, plateau_ok=True)
            except WindowTooSmallError:
                pass
        length -= trim

    logger.warning(
        '%s: platô não encontrado; ajuste na metade final', trace.k.display
    )
    start = min(n // 2, n - MIN_FIT_SAMPLES)
    return fit_slope(
        trace, (float(trace.tau[start]), float(trace.tau[-1])), False
    )


# ===== CURVA DE DISPERSÃO =====


def _group_momenta(
    ks: Sequence[Momentum], cell_policy: str
) -> list[tuple[UnitCell, list[Momentum]]]:
    if cell_policy == 'shared':
        return [(common_cell(ks), list(ks))]
    groups: dict[UnitCell, list[Momentum]] = {}
    for k in ks:
        groups.setdefault(minimal_cell_for(k), []).append(k)
    return list(groups.items())


def _run_group(job) -> tuple[list[EvolutionTrace] | None, str | None]:
    params, ev, ks, cell = job
    try:
        return run_trace(params, ev, ks, cell), None
    except NUMERICAL_ERRORS as exc:
        logger.error('célula %s falhou: %s', cell.label, exc)
        return None, f'{type(exc).__name__}: {exc}'


def _fit_point(
    params: TfimParams,
    k: Momentum,
    cell: UnitCell,
    trace: EvolutionTrace | None,
    error: str | None,
    rel_tol: float,
    min_frac: float,
) -> FitPoint:
    ref, valid = series_reference(params, k)
    base = {
        'k_label': k.label,
        'components': list(k.components),
        'cell': list(cell.dims),
        'series_ref': ref,
        'series_valid': valid,
    }
    if trace is None:
        return FitPoint(**base, status='failed', message=error)
    base['samples'] = len(trace)
    base['truncated_at'] = trace.truncated_at
    try:
        fit = fit_trace(trace, rel_tol, min_frac)
    except FitError as exc:
        logger.error('%s: %s', k.display, exc)
        return FitPoint(**base, status='failed', message=str(exc))

    unit = params.unit_energy
    return FitPoint(
        **base,
        status='ok' if fit.plateau_ok else 'no_plateau',
        delta=fit.delta_k / unit,
        slope_std=fit.slope_std / unit,
        residual=fit.residual,
        intercept=fit.intercept,
        window=list(fit.window),
        plateau_ok=fit.plateau_ok,
    )


def compute_curve(
    params: TfimParams,
    ev: EvolutionParams,
    momenta: Sequence[Momentum],
    cell_policy: str = 'minimal',
    rel_tol: float = 1e-3,
    min_frac: float = 0.2,
    workers: int = 1,
) -> DispersionCurve:
    """Agrupa os momentos por célula, roda uma trajetória por grupo e
    ajusta cada traço. Pontos que falham entram com status 'failed'."""
    started = now()
    ks = dedupe(momenta)
    groups = _group_momenta(ks, cell_policy)
    jobs = [(params, ev, group, cell) for cell, group in groups]
    results = run_parallel(_run_group, jobs, workers)

    found: dict[Momentum, tuple] = {}
    for (cell, group), (traces, error) in zip(groups, results):
        for i, k in enumerate(group):
            trace = traces[i] if traces is not None else None
            found[k] = (cell, trace, error)

    points, traces = [], []
    for k in ks:
        cell, trace, error = found[k]
        points.append(
            _fit_point(params, k, cell, trace, error, rel_tol, min_frac)
        )
        if trace is not None:
            traces.append(trace)

    curve = DispersionCurve(
        params=params,
        d_max=ev.d_max,
        dtau=ev.dtau,
        unit=params.unit,
        cell_policy=cell_policy,
        points=points,
        provenance=Provenance(
            seed=ev.seed,
            started_at=started,
            finished_at=now(),
            version=package_version(),
            workers=workers,
        ),
    )
    curve.attach_traces(traces)
    return curve
