"""
Pacote central 'geral' - serviços compartilhados do sistema.

Este módulo funciona como um hub central que:
1. Fornece o sistema de logging
2. Persiste artefatos (CSV, JSON, JSONL, binários) num diretório de saída
3. Define as interfaces entre os módulos
4. Registra e executa os estágios do pipeline

Para usar o registro de estágios:
    from geral import ArtifactService, StageRegistry

    registro = StageRegistry(ArtifactService("saida"))
    registro.register_stage(meu_estagio)
    registro.run(contexto, resume=True)
"""

from .app_logger import (
    add_log,
    log_success,
    log_error,
    log_warning,
    log_debug,
    get_logs,
    clear_logs,
    set_debug_mode,
    is_debug_mode,
)
from .artifact_service import ArtifactService, to_json_text
from .history_service import DetectionLogService
from .module_interfaces import (
    CodingSynthesisInterface,
    DecompositionInterface,
    PipelineStageInterface,
)
from .module_registry import StageInfo, StageRegistry

__all__ = [
    # Sistema de logging
    "add_log",
    "log_success",
    "log_error",
    "log_warning",
    "log_debug",
    "get_logs",
    "clear_logs",
    "set_debug_mode",
    "is_debug_mode",
    # Serviços
    "ArtifactService",
    "to_json_text",
    "DetectionLogService",
    # Interfaces
    "CodingSynthesisInterface",
    "DecompositionInterface",
    "PipelineStageInterface",
    # Pipeline
    "StageInfo",
    "StageRegistry",
]
