import os
import logging
from logging.handlers import RotatingFileHandler
from typing import List, Optional

from config import LOG_DIR, RESULTS_DIR, SEED_ENV_VAR, DEFAULT_SEED


def ensure_directories():
    for d in (LOG_DIR, RESULTS_DIR):
        os.makedirs(d, exist_ok=True)


_LEVEL = logging.INFO


def get_logger(name: str = "app", level: Optional[int] = None) -> logging.Logger:
    os.makedirs(LOG_DIR, exist_ok=True)
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger
    level = _LEVEL if level is None else level
    logger.setLevel(level)

    # Console handler
    ch = logging.StreamHandler()
    ch.setLevel(level)
    ch_fmt = logging.Formatter("%(asctime)s [%(levelname)s] %(message)s")
    ch.setFormatter(ch_fmt)

    # Rotating file handler
    fh = RotatingFileHandler(os.path.join(LOG_DIR, "app.log"), maxBytes=2 * 1024 * 1024, backupCount=3, encoding="utf-8")
    fh.setLevel(level)
    fh_fmt = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")
    fh.setFormatter(fh_fmt)

    logger.addHandler(ch)
    logger.addHandler(fh)
    return logger


def set_log_level(level: int):
    """调整所有已创建 logger 及其 handler 的级别（--verbose 时使用）。"""
    global _LEVEL
    _LEVEL = level
    for name in list(logging.root.manager.loggerDict):
        logger = logging.getLogger(name)
        if not logger.handlers:
            continue
        logger.setLevel(level)
        for h in logger.handlers:
            h.setLevel(level)


def parse_name_list(s: str) -> List[str]:
    """逗号分隔的名称列表，去空白、去空项，保持顺序。"""
    return [x.strip().lower() for x in str(s).split(",") if x.strip()]


def parse_float_list(s: str) -> List[float]:
    return [float(x) for x in str(s).split(",") if str(x).strip()]


def default_seed(explicit: Optional[int] = None) -> int:
    """--seed 优先；否则读取环境变量 OSCILSWARM_SEED；都没有则用配置默认值。"""
    if explicit is not None:
        return int(explicit)
    raw = os.environ.get(SEED_ENV_VAR, "").strip()
    if raw:
        return int(raw)
    return DEFAULT_SEED
