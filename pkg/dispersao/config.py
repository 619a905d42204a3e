"""Leitura da configuração de execução (TOML) com sobreposição por flags."""

import logging
import tomllib
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from dispersao.exceptions import ConfigError
from dispersao.schemas import RunConfig

logger = logging.getLogger(__name__)


def merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Mescla recursiva; valores `None` em `overrides` são ignorados."""
    out = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict):
            current = out.get(key)
            base_value = current if isinstance(current, dict) else {}
            out[key] = merge(base_value, value)
        else:
            out[key] = value
    return out


def parse_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f'configuração inválida:\n{exc}') from exc


def load_config(
    path: Optional[str | Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Arquivo TOML sobre `defaults`, com `overrides` por cima."""
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with path.open('rb') as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f'não foi possível ler {path}: {exc}') from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f'{path}: TOML inválido: {exc}') from exc
        logger.debug('configuração lida de %s', path)
    merged = merge(defaults or {}, data)
    return parse_config(merge(merged, overrides or {}))
