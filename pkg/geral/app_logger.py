"""
Módulo para gerenciamento de logs da aplicação.
Fornece funcionalidades para registrar logs em um buffer em memória e no console.
"""

import os
import logging
from collections import deque
from datetime import datetime

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

# Configurar logging básico
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("sensing")

MAX_LOGS = 100

_logs = deque(maxlen=MAX_LOGS)
_debug_mode = os.getenv("SENSING_DEBUG", "").lower() in ("1", "true", "sim", "yes")


def set_debug_mode(enabled):
    """
    Liga ou desliga o modo de depuração.

    Args:
        enabled (bool): True para registrar mensagens de debug
    """
    global _debug_mode
    _debug_mode = bool(enabled)
    logger.setLevel(logging.DEBUG if _debug_mode else logging.INFO)


def is_debug_mode():
    """Retorna True se o modo de depuração estiver ativo."""
    return _debug_mode


def add_log(message):
    """
    Adiciona uma entrada de log ao buffer e também ao logger do sistema.

    Args:
        message (str): Mensagem para registrar no log
    """
    timestamp = datetime.now().strftime("%H:%M:%S")
    _logs.append(f"{timestamp} - {message}")


def get_logs(max_count=10):
    """
    Retorna os logs mais recentes do buffer.

    Args:
        max_count (int): Número máximo de logs a retornar

    Returns:
        list: Lista com as entradas de log mais recentes
    """
    if max_count <= 0:
        return []
    return list(_logs)[-max_count:]


def clear_logs():
    """
    Limpa todos os logs do buffer.
    """
    _logs.clear()
    logger.info("Logs limpos")


def log_error(message):
    """
    Registra uma mensagem de erro.

    Args:
        message (str): Mensagem de erro
    """
    add_log(f"ERRO: {message}")
    logger.error(message)


def log_warning(message):
    """
    Registra uma mensagem de aviso.

    Args:
        message (str): Mensagem de aviso
    """
    add_log(f"AVISO: {message}")
    logger.warning(message)


def log_success(message):
    """
    Registra uma mensagem de sucesso.

    Args:
        message (str): Mensagem de sucesso
    """
    add_log(message)
    logger.info(message)


def log_debug(message):
    """
    Registra uma mensagem de debug, apenas com o modo de depuração ativo.

    Args:
        message (str): Mensagem de debug
    """
    if _debug_mode:
        add_log(f"DEBUG: {message}")
        logger.debug(message)
