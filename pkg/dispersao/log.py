import logging
import sys

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level: str | int = 'INFO') -> logging.Logger:
    """Instala um único handler em stderr no logger do pacote.

    Chamadas repetidas só ajustam o nível.
    """
    logger = logging.getLogger('dispersao')
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger
