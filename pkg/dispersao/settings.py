from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file='.env', env_file_encoding='utf-8', env_prefix='DISPERSAO_'
    )

    WORKERS: int = 1
    LOG_LEVEL: str = 'INFO'
    OUTPUT_DIR: str = 'resultados'
    PLATEAU_REL_TOL: float = 1e-3
    PLATEAU_MIN_FRAC: float = 0.2


@lru_cache
def get_settings() -> Settings:
    return Settings()
