"""Hierarquia de erros do pacote.

Todos os erros levantados pelo código numérico derivam de `DispersaoError`;
a CLI e a API traduzem esses erros em códigos de saída / respostas HTTP.
"""


class DispersaoError(Exception):
    """Raiz de todos os erros do pacote."""


# ===== ÁLGEBRA DE TENSORES =====


class TensorError(DispersaoError):
    pass


class ShapeMismatchError(TensorError, ValueError):
    pass


class AxisIndexError(TensorError, IndexError):
    pass


class InvalidPermutationError(TensorError, ValueError):
    pass


class NonFiniteError(TensorError, ArithmeticError):
    pass


class DecompositionError(TensorError, ArithmeticError):
    """A decomposição (SVD/QR/eigh) não convergiu."""


# ===== REDE E MOMENTOS =====


class LatticeError(DispersaoError, ValueError):
    pass


class UnsupportedDimensionalityError(LatticeError):
    pass


class DimensionMismatchError(LatticeError):
    pass


class IncommensurateMomentumError(LatticeError):
    pass


# ===== EVOLUÇÃO iPEPS =====


class EvolutionError(DispersaoError):
    pass


class BondNotFoundError(EvolutionError, KeyError):
    pass


class NotAdjacentError(EvolutionError, ValueError):
    pass


class CellTooSmallError(EvolutionError, ValueError):
    pass


# ===== AJUSTE =====


class FitError(DispersaoError, ArithmeticError):
    pass


class TooFewSamplesError(FitError):
    pass


class WindowTooSmallError(FitError):
    pass


class ConfigError(DispersaoError, ValueError):
    pass


# Erros que a CLI reporta com código 3 (falha numérica)
NUMERICAL_ERRORS = (
    DecompositionError,
    NonFiniteError,
    FitError,
    EvolutionError,
)
