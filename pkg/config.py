import os
import dotenv
import json
from pathlib import Path

# Carregar variáveis de ambiente
dotenv.load_dotenv()

# Arquivo de configuração da execução e diretório de saída
SENSING_CONFIG_PATH = os.getenv("SENSING_CONFIG_PATH", "config/sensing_config.json")
SENSING_OUTPUT_DIR = os.getenv("SENSING_OUTPUT_DIR", "saida")

# Semente mestre (sobrepõe [saida].semente quando definida)
SENSING_SEED = os.getenv("SENSING_SEED", "")

SENSING_DEBUG = os.getenv("SENSING_DEBUG", "").lower() in ("1", "true", "sim", "yes")


def master_seed():
    """Semente do ambiente, ou None se não definida."""
    return int(SENSING_SEED) if SENSING_SEED.strip() else None


def validate_config(config_path=None):
    """
    Valida as configurações de ambiente necessárias para a execução.

    Args:
        config_path: arquivo de configuração (padrão: SENSING_CONFIG_PATH)

    Returns:
        tuple: (is_valid, errors)
    """
    errors = []

    if SENSING_SEED.strip():
        try:
            int(SENSING_SEED)
        except ValueError:
            errors.append(f"SENSING_SEED deve ser inteiro (recebido '{SENSING_SEED}')")

    path = Path(config_path or SENSING_CONFIG_PATH)
    if not path.exists():
        errors.append(f"Arquivo de configuração não encontrado: {path}")

    return (len(errors) == 0, errors)


def ensure_config_dir(config_path=None):
    """Garante que o diretório de configuração e o arquivo padrão existem"""
    from servicos_modularizados.harness import default_config_dict

    path = Path(config_path or SENSING_CONFIG_PATH)
    path.parent.mkdir(parents=True, exist_ok=True)

    # Criar arquivo de configuração padrão se não existir
    if not path.exists():
        with open(path, "w", encoding="utf-8") as f:
            json.dump(default_config_dict(), f, indent=2, ensure_ascii=False)
    return path
