"""
Serviço de persistência de artefatos.
Este módulo grava e lê as tabelas CSV, os relatórios JSON, os logs JSONL e
os arquivos binários produzidos pelos módulos do sistema, sempre dentro de
um diretório de saída.
"""

import json
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

try:
    from .app_logger import log_debug, log_error, log_success
except ImportError:
    from app_logger import log_debug, log_error, log_success


def _json_default(value: Any) -> Any:
    """Converte tipos numpy para tipos nativos do JSON."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Tipo não serializável: {type(value).__name__}")


def to_json_text(data: Any) -> str:
    """Serializa com chaves ordenadas para saídas reprodutíveis."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default)


class ArtifactService:
    """
    Serviço de artefatos de um diretório de saída.

    Existe uma única instância por diretório (resolvido), de modo que todos
    os estágios de uma execução compartilham o mesmo serviço. O serviço só
    guarda o diretório; o cache mantém os MAX_INSTANCES diretórios usados
    mais recentemente e os demais são recriados sob demanda.
    """

    MAX_INSTANCES = 64
    _instances: "OrderedDict[str, ArtifactService]" = OrderedDict()

    def __new__(cls, base_dir: Union[str, Path] = "saida"):
        key = str(Path(base_dir).resolve())
        if key in cls._instances:
            cls._instances.move_to_end(key)
            return cls._instances[key]
        instance = super(ArtifactService, cls).__new__(cls)
        instance.base_dir = Path(key)
        cls._instances[key] = instance
        while len(cls._instances) > cls.MAX_INSTANCES:
            cls._instances.popitem(last=False)
        return instance

    def __init__(self, base_dir: Union[str, Path] = "saida"):
        # base_dir já definido em __new__
        pass

    def path(self, name: Union[str, Path]) -> Path:
        """Caminho absoluto de um artefato dentro do diretório de saída."""
        name = Path(name)
        return name if name.is_absolute() else self.base_dir / name

    def exists(self, name: Union[str, Path]) -> bool:
        return self.path(name).exists()

    def _prepare(self, name: Union[str, Path]) -> Path:
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def save_table(self, table: pd.DataFrame, name: Union[str, Path]) -> Optional[Path]:
        """
        Salva uma tabela como CSV com cabeçalho.

        Args:
            table: DataFrame a ser salvo
            name: nome relativo do arquivo

        Returns:
            Optional[Path]: caminho gravado ou None em caso de erro
        """
        try:
            target = self._prepare(name)
            table.to_csv(target, index=False)
            log_debug(f"Tabela salva: {target}")
            return target
        except Exception as e:
            log_error(f"Erro ao salvar tabela {name}: {str(e)}")
            return None

    def load_table(self, name: Union[str, Path]) -> Optional[pd.DataFrame]:
        try:
            return pd.read_csv(self.path(name), float_precision="round_trip")
        except Exception as e:
            log_error(f"Erro ao ler tabela {name}: {str(e)}")
            return None

    def save_json(self, data: Any, name: Union[str, Path]) -> Optional[Path]:
        """
        Salva um documento JSON (chaves ordenadas, tipos numpy convertidos).

        Args:
            data: documento
            name: nome relativo do arquivo

        Returns:
            Optional[Path]: caminho gravado ou None em caso de erro
        """
        try:
            target = self._prepare(name)
            target.write_text(to_json_text(data) + "\n", encoding="utf-8")
            log_debug(f"JSON salvo: {target}")
            return target
        except Exception as e:
            log_error(f"Erro ao salvar JSON {name}: {str(e)}")
            return None

    def load_json(self, name: Union[str, Path]) -> Optional[Any]:
        try:
            return json.loads(self.path(name).read_text(encoding="utf-8"))
        except Exception as e:
            log_error(f"Erro ao ler JSON {name}: {str(e)}")
            return None

    def append_jsonl(self, record: Dict[str, Any], name: Union[str, Path]) -> bool:
        """Acrescenta um registro a um arquivo JSON por linha."""
        try:
            target = self._prepare(name)
            line = json.dumps(record, sort_keys=True, ensure_ascii=False, default=_json_default)
            with open(target, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
            return True
        except Exception as e:
            log_error(f"Erro ao registrar em {name}: {str(e)}")
            return False

    def read_jsonl(self, name: Union[str, Path]) -> List[Dict[str, Any]]:
        target = self.path(name)
        if not target.exists():
            return []
        try:
            with open(target, encoding="utf-8") as handle:
                return [json.loads(line) for line in handle if line.strip()]
        except Exception as e:
            log_error(f"Erro ao ler {name}: {str(e)}")
            return []

    def save_text(self, text: str, name: Union[str, Path]) -> Optional[Path]:
        try:
            target = self._prepare(name)
            target.write_text(text, encoding="utf-8")
            return target
        except Exception as e:
            log_error(f"Erro ao salvar arquivo {name}: {str(e)}")
            return None

    def load_text(self, name: Union[str, Path]) -> Optional[str]:
        try:
            return self.path(name).read_text(encoding="utf-8")
        except Exception as e:
            log_error(f"Erro ao ler arquivo {name}: {str(e)}")
            return None

    def save_raw(self, values: np.ndarray, name: Union[str, Path]) -> Optional[Path]:
        """Grava float64 little-endian sem cabeçalho."""
        try:
            target = self._prepare(name)
            np.asarray(values, dtype="<f8").tofile(target)
            return target
        except Exception as e:
            log_error(f"Erro ao salvar binário {name}: {str(e)}")
            return None

    def load_raw(self, name: Union[str, Path]) -> Optional[np.ndarray]:
        try:
            return np.fromfile(self.path(name), dtype="<f8")
        except Exception as e:
            log_error(f"Erro ao ler binário {name}: {str(e)}")
            return None

    def clear(self, name: Union[str, Path]) -> bool:
        """Remove um artefato, se existir."""
        target = self.path(name)
        if target.exists():
            target.unlink()
            log_success(f"Artefato removido: {target}")
        return True
