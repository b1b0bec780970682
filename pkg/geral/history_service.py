"""
Serviço de histórico de eventos de detecção.
Este módulo grava os eventos da máquina de atribuição de feixes em um
arquivo JSON por linha, que pode ser relido para reproduzir a trajetória.
"""
from typing import Any, Dict, List, Optional

try:
    from .app_logger import log_error, log_success, log_warning
    from .artifact_service import ArtifactService
except ImportError:
    from app_logger import log_error, log_success, log_warning
    from artifact_service import ArtifactService

EVENT_TYPES = ("candidate", "assigned", "released", "capacity")


class DetectionLogService:
    """
    Serviço para gerenciar o log de eventos de detecção.
    """

    def __init__(self, artifacts: Optional[ArtifactService] = None, file_name: str = "deteccao_eventos.jsonl"):
        """
        Inicializa o serviço de histórico.

        Args:
            artifacts: Serviço de artefatos (opcional; sem ele os eventos ficam só em memória)
            file_name: Nome do arquivo JSONL dentro do diretório de saída
        """
        if artifacts is None:
            log_warning("Serviço de artefatos não informado, usando histórico em memória")
        self.artifacts = artifacts
        self.file_name = file_name
        self._memory: List[Dict[str, Any]] = []

    def add_entry(self, record: Dict[str, Any]) -> bool:
        """
        Adiciona um evento ao histórico.

        Args:
            record: Evento com as chaves t, direction, event e harmonic

        Returns:
            bool: True se adicionado com sucesso
        """
        try:
            if record.get("event") not in EVENT_TYPES:
                log_error(f"Tipo de evento desconhecido: {record.get('event')}")
                return False
            entry = {
                "t": float(record["t"]),
                "direction": int(record["direction"]),
                "event": record["event"],
                "harmonic": None if record.get("harmonic") is None else int(record["harmonic"]),
            }
            self._memory.append(entry)
            if self.artifacts is None:
                return True
            return self.artifacts.append_jsonl(entry, self.file_name)
        except Exception as e:
            log_error(f"Erro ao adicionar evento ao histórico: {str(e)}")
            return False

    def register_event(self, t: float, direction: int, event: str, harmonic: Optional[int] = None) -> bool:
        return self.add_entry({"t": t, "direction": direction, "event": event, "harmonic": harmonic})

    def get_events(self) -> List[Dict[str, Any]]:
        """
        Recupera todos os eventos em ordem cronológica de registro.

        Returns:
            List: eventos gravados
        """
        if self.artifacts is None:
            return list(self._memory)
        return self.artifacts.read_jsonl(self.file_name)

    def get_history(self, limit: int = 10, event_type: Optional[str] = None) -> List[Dict[str, Any]]:
        """
        Recupera os eventos mais recentes primeiro.

        Args:
            limit: Número máximo de eventos para retornar
            event_type: Filtrar por tipo de evento (opcional)

        Returns:
            List: Lista de eventos
        """
        entries = list(reversed(self.get_events()))
        if event_type:
            entries = [e for e in entries if e.get("event") == event_type]
        return entries[:limit]

    def clear_history(self) -> bool:
        """
        Limpa todo o histórico.

        Returns:
            bool: True se o histórico foi limpo com sucesso
        """
        try:
            self._memory.clear()
            if self.artifacts is not None:
                self.artifacts.clear(self.file_name)
            log_success("Histórico de detecção limpo")
            return True
        except Exception as e:
            log_error(f"Erro ao limpar histórico: {str(e)}")
            return False
