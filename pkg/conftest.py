"""
Configuração do pytest: o diretório raiz entra no sys.path para que
geral, servicos_modularizados, app e config sejam importáveis.
"""

import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from geral.app_logger import clear_logs, set_debug_mode  # noqa: E402


@pytest.fixture(autouse=True)
def quiet_logger():
    """Sem mensagens de depuração durante os testes."""
    set_debug_mode(False)
    yield
    clear_logs()


@pytest.fixture
def rng():
    """Gerador com semente fixa."""
    return np.random.default_rng(0)
