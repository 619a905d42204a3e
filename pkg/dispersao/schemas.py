from datetime import datetime
from typing import List, Literal, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    model_validator,
)

Phase = Literal['paramagnetic', 'ferromagnetic']

# g_c / J do ponto crítico quântico
CRITICAL_RATIO = {2: 3.044, 3: 5.29}

MACHINE_EPS = 2.220446049250313e-16

# ===== SCHEMAS DO MODELO E DA EVOLUÇÃO =====


class TfimParams(BaseModel):
    """Parâmetros do Ising em campo transverso H = −J Σ σzσz − g Σ σx.

    @Attributes
        j: acoplamento de Ising J >= 0
        g: campo transverso g >= 0
        dimensionality: 2 (quadrada) ou 3 (cúbica)
    """

    model_config = ConfigDict(frozen=True)

    j: float = Field(ge=0)
    g: float = Field(ge=0)
    dimensionality: Literal[2, 3] = 2

    @model_validator(mode='after')
    def check_not_both_zero(self):
        if self.j == 0 and self.g == 0:
            raise ValueError('j e g não podem ser ambos nulos')
        return self

    @property
    def phase(self) -> Phase:
        if self.j == 0:
            return 'paramagnetic'
        if self.g / self.j < CRITICAL_RATIO[self.dimensionality]:
            return 'ferromagnetic'
        return 'paramagnetic'

    @property
    def unit(self) -> str:
        # ferromagneto: Δ em unidades de J; paramagneto: em unidades de g
        return 'J' if self.phase == 'ferromagnetic' else 'g'

    @property
    def unit_energy(self) -> float:
        return self.j if self.phase == 'ferromagnetic' else self.g


class EvolutionParams(BaseModel):
    """Parâmetros da evolução em tempo imaginário.

    @Attributes
        dtau: passo de tempo imaginário
        max_steps: número máximo de varreduras (τ_max = dtau·max_steps)
        d_max: dimensão de ligação alvo D
        seed: semente da inicialização aleatória
        floor: limiar em |⟨[H,O_k]⟩| abaixo do qual o traço é encerrado
    """

    model_config = ConfigDict(frozen=True)

    dtau: float = Field(default=0.01, gt=0)
    max_steps: int = Field(default=2000, gt=0)
    d_max: int = Field(default=4, ge=1)
    seed: int = 0
    floor: float = Field(default=1e-12, gt=0)

    @model_validator(mode='after')
    def check_floor(self):
        if self.floor <= MACHINE_EPS:
            raise ValueError('floor deve exceder o épsilon da máquina')
        return self


# ===== SCHEMAS DA CONFIGURAÇÃO DE EXECUÇÃO =====


class MomentaSpec(BaseModel):
    """Seleção de momentos.

    @Attributes
        kind: 'path' (caminho de alta simetria), 'list' (pontos explícitos)
            ou 'grid' (grade completa de uma célula)
        points: rótulos/momentos em texto ('X', 'pi,0', 'pi/2,pi/2');
            em 'path' substitui o caminho padrão quando não vazio
        grid: dimensões da célula para 'grid'
    """

    kind: Literal['path', 'list', 'grid'] = 'path'
    points: List[str] = []
    grid: Optional[List[int]] = None

    @model_validator(mode='after')
    def check_kind(self):
        if self.kind == 'list' and not self.points:
            raise ValueError("kind='list' exige ao menos um ponto")
        if self.kind == 'grid' and not self.grid:
            raise ValueError("kind='grid' exige as dimensões da célula")
        return self


class OutputSpec(BaseModel):
    directory: str = 'resultados'
    svg: bool = False
    traces: bool = True


class PlateauSpec(BaseModel):
    rel_tol: float = Field(default=1e-3, gt=0)
    min_frac: float = Field(default=0.2, gt=0, lt=1)


class RunConfig(BaseModel):
    model: TfimParams
    evolution: EvolutionParams = EvolutionParams()
    momenta: MomentaSpec = MomentaSpec()
    trials: int = Field(default=1, ge=1)
    output: OutputSpec = OutputSpec()
    oracle: bool = True
    cell_policy: Literal['minimal', 'shared'] = 'minimal'
    plateau: PlateauSpec = PlateauSpec()
    d_values: List[int] = []


# ===== SCHEMAS DE RESULTADOS =====


class Provenance(BaseModel):
    seed: int
    started_at: datetime
    finished_at: datetime
    version: str
    workers: int = 1


class FitPoint(BaseModel):
    """Um ponto da curva de dispersão, já nas unidades reportadas.

    `status` é 'ok' (platô encontrado), 'no_plateau' (ajuste de melhor
    esforço) ou 'failed' (sem Δ; `message` explica).
    """

    k_label: Optional[str] = None
    components: List[float]
    cell: List[int]
    status: Literal['ok', 'no_plateau', 'failed']
    delta: Optional[float] = None
    slope_std: Optional[float] = None
    residual: Optional[float] = None
    intercept: Optional[float] = None
    window: Optional[List[float]] = None
    plateau_ok: bool = False
    samples: int = 0
    truncated_at: Optional[float] = None
    series_ref: Optional[float] = None
    series_valid: Optional[bool] = None
    message: Optional[str] = None


class DispersionCurve(BaseModel):
    params: TfimParams
    d_max: int
    dtau: float
    unit: str
    cell_policy: str = 'minimal'
    points: List[FitPoint]
    provenance: Provenance

    # traços C_k(τ) da execução (não serializados)
    _traces: list = PrivateAttr(default_factory=list)

    @model_validator(mode='after')
    def check_unique_points(self):
        keys = [
            tuple(round(c, 9) for c in p.components) for p in self.points
        ]
        if len(keys) != len(set(keys)):
            raise ValueError('momentos duplicados na curva')
        return self

    @property
    def traces(self) -> list:
        return self._traces

    def attach_traces(self, traces: list):
        self._traces = list(traces)

    @property
    def failed(self) -> List[FitPoint]:
        return [p for p in self.points if p.status == 'failed']


class ConvergenceRow(BaseModel):
    d: int
    values: List[Optional[float]]
    mean: Optional[float] = None
    std: float = 0.0
    std_defined: bool = False
    trials: int


class ConvergenceReport(BaseModel):
    params: TfimParams
    k_label: Optional[str] = None
    components: List[float]
    unit: str
    d_values: List[int]
    rows: List[ConvergenceRow]
    reference: Optional[float] = None
    reference_valid: Optional[bool] = None
    provenance: Provenance

    @model_validator(mode='after')
    def check_rows(self):
        for row in self.rows:
            if len(row.values) != row.trials:
                raise ValueError(
                    f'D={row.d}: {len(row.values)} valores para '
                    f'{row.trials} tentativas'
                )
        return self


# ===== SCHEMAS DA API =====


class MomentumPublic(BaseModel):
    components: List[float]
    label: Optional[str] = None


class OracleDeltaPublic(BaseModel):
    dimensionality: int
    phase: Phase
    coupling: float
    order: int
    k: MomentumPublic
    delta: float
    valid: bool


class PathSample(BaseModel):
    position: float
    components: List[float]
    delta: float


class PathVertex(BaseModel):
    label: str
    position: float


class OraclePathPublic(BaseModel):
    dimensionality: int
    phase: Phase
    coupling: float
    order: int
    valid: bool
    vertices: List[PathVertex]
    points: List[PathSample]


class GridPublic(BaseModel):
    dims: List[int]
    momenta: List[MomentumPublic]
